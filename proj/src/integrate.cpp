#include "bfcnn/integrate.hpp"

#include <algorithm>
#include <cmath>

#include "bfcnn/csv.hpp"

namespace bfcnn {

namespace {

// Dormand & Prince (1980) coefficients, continuous extension from Hairer's dopri5.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double scaled_max(const std::vector<double>& v, const std::vector<double>& ref, double atol,
                  double rtol) {
  double m = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v[i]) / (atol + rtol * std::abs(ref[i])));
  return m;
}

double initial_step(const Rhs& f, const std::vector<double>& y0, const std::vector<double>& f0,
                    double hmax, double atol, double rtol) {
  const std::size_t n = y0.size();
  double dnf = scaled_max(f0, y0, atol, rtol);
  double dny = scaled_max(y0, y0, atol, rtol);
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
  h = std::min(h, hmax);
  std::vector<double> y1(n), f1(n);
  for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + h * f0[i];
  f(y1, f1);
  double der2 = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    der2 = std::max(der2, std::abs(f1[i] - f0[i]) / (atol + rtol * std::abs(y0[i])));
  der2 /= h;
  double der12 = std::max(der2, dnf);
  double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 1.0 / 5);
  return std::min({100 * h, h1, hmax});
}

}  // namespace

Trajectory integrate_rhs(const Rhs& f, const std::vector<double>& x0, double duration,
                         const IntegratorConfig& cfg, bool check_nonnegative) {
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw std::invalid_argument("integration duration must be positive");
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
    throw std::invalid_argument("integrator tolerances must be positive");
  const double hmax = cfg.max_step.value_or(duration / 10);
  if (!(hmax > 0.0)) throw std::invalid_argument("max_step must be positive");
  const double atol = cfg.abs_tol, rtol = cfg.rel_tol;

  const std::size_t n = x0.size();
  std::vector<double> y = x0, y1(n), ytmp(n), err(n);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);

  Trajectory traj;
  std::size_t samples = cfg.dense_samples.value_or(0);
  if (cfg.dense_samples && samples < 2) throw std::invalid_argument("dense_samples must be at least 2");
  std::size_t next_sample = 1;
  auto sample_time = [&](std::size_t k) {
    return k + 1 == samples ? duration : duration * static_cast<double>(k) / static_cast<double>(samples - 1);
  };
  traj.times.push_back(0.0);
  traj.states.push_back(y);

  double t = 0.0;
  f(y, k1);
  double h = initial_step(f, y, k1, hmax, atol, rtol);
  bool last_rejected = false;
  const double hmin = 1e-14 * std::max(1.0, duration);

  for (std::size_t step = 0;; ++step) {
    if (step >= cfg.max_steps)
      throw IntegrationFailure("maximum step count exceeded", y, t);
    if (h < hmin) throw IntegrationFailure("step size underflow", y, t);
    bool last = false;
    if (t + h >= duration * (1 - 1e-13)) {
      h = duration - t;
      last = true;
    }

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    f(ytmp, k2);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(ytmp, k3);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    f(y1, k7);

    double errn = 0.0;
    bool negative = false;
    for (std::size_t i = 0; i < n; ++i) {
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      double sk = atol + rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
      errn = std::max(errn, std::abs(err[i]) / sk);
      if (check_nonnegative && y1[i] < -kClampTol) negative = true;
    }
    if (!std::isfinite(errn)) throw IntegrationFailure("non-finite state", y, t);

    if (negative) {
      h *= 0.5;
      ++traj.rejected_steps;
      last_rejected = true;
      continue;
    }
    if (errn > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(errn, -0.2));
      ++traj.rejected_steps;
      last_rejected = true;
      continue;
    }

    ++traj.accepted_steps;
    const double t_new = last ? duration : t + h;
    if (samples) {
      while (next_sample < samples && sample_time(next_sample) <= t_new) {
        double ts = sample_time(next_sample);
        std::vector<double> s(n);
        if (ts == t_new) {
          s = y1;
        } else {
          double theta = (ts - t) / h, theta1 = 1.0 - theta;
          for (std::size_t i = 0; i < n; ++i) {
            double ydiff = y1[i] - y[i];
            double bspl = h * k1[i] - ydiff;
            double r4 = ydiff - h * k7[i] - bspl;
            double r5 = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            s[i] = y[i] + theta * (ydiff + theta1 * (bspl + theta * (r4 + theta1 * r5)));
          }
        }
        traj.times.push_back(ts);
        traj.states.push_back(std::move(s));
        ++next_sample;
      }
    }

    y.swap(y1);
    k1.swap(k7);  // first-same-as-last
    t = t_new;
    if (last) break;

    double fac = std::min(10.0, std::max(0.2, 0.9 * std::pow(std::max(errn, 1e-10), -0.2)));
    if (last_rejected) fac = std::min(fac, 1.0);
    last_rejected = false;
    h = std::min(h * fac, hmax);
  }

  if (!samples) {
    traj.times.push_back(duration);
    traj.states.push_back(y);
  }
  traj.endpoint = y;
  return traj;
}

Trajectory integrate(const Crn& crn, const ConcentrationState& x0, double duration,
                     const IntegratorConfig& cfg) {
  validate_state(crn, x0);
  if (cfg.parallel_rhs) {
    ParallelDerivative pd(crn);
    return integrate_rhs([&](std::span<const double> x, std::span<double> out) { pd(x, out); }, x0,
                         duration, cfg, true);
  }
  return integrate_rhs([&](std::span<const double> x, std::span<double> out) { derivative_into(crn, x, out); },
                       x0, duration, cfg, true);
}

ConcentrationState integrate_endpoint(const Crn& crn, const ConcentrationState& x0, double duration,
                                      const IntegratorConfig& cfg) {
  IntegratorConfig c = cfg;
  c.dense_samples.reset();
  return integrate(crn, x0, duration, c).endpoint;
}

void write_trajectory_csv(std::ostream& out, const Crn& crn, const Trajectory& traj) {
  out << "t";
  for (const auto& s : crn.species()) out << ',' << csv_field(s.name);
  out << '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << fmt(traj.times[k]);
    for (double v : traj.states[k]) out << ',' << fmt(v);
    out << '\n';
  }
}

}  // namespace bfcnn
