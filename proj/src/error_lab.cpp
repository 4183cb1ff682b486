#include "bfcnn/error_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bfcnn {

double max_abs(const Mat3& m, int row_begin, int row_end) {
  double v = 0.0;
  for (int i = row_begin; i < row_end; ++i)
    for (int j = 0; j < 3; ++j) v = std::max(v, std::abs(m[i][j]));
  return v;
}

ErrorRecord realization_error(const DualRailMatrices& sim, const DualRailMatrices& ref, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("error scale c must be positive");
  Mat3 dp = sim.pos - ref.pos, dn = sim.neg - ref.neg;
  ErrorRecord r;
  r.err_w1 = c * (max_abs(dp, 0, 2) + max_abs(dn, 0, 2));
  r.err_w2 = c * (max_abs(dp, 2, 3) + max_abs(dn, 2, 3));
  r.err_total = c * (max_abs(dp, 0, 3) + max_abs(dn, 0, 3));
  return r;
}

FitResult fit_convergence_order(const std::vector<double>& T, const std::vector<double>& err) {
  if (T.size() != err.size()) throw std::invalid_argument("T and error series differ in length");
  std::vector<double> xs, ys;
  FitResult fit;
  for (std::size_t i = 0; i < T.size(); ++i) {
    if (!(err[i] > 0.0) || !std::isfinite(err[i])) {
      ++fit.excluded;
      continue;
    }
    xs.push_back(T[i]);
    ys.push_back(std::log(err[i]));
  }
  std::vector<double> distinct = xs;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 4)
    throw std::invalid_argument("convergence fit needs at least 4 distinct T values with positive error");

  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  fit.v = -slope;
  fit.intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double r = ys[i] - (fit.intercept + slope * xs[i]);
    ss_res += r * r;
  }
  if (ss_res == 0.0 || syy == 0.0)
    fit.r2 = ss_res == 0.0 ? 1.0 : 0.0;
  else
    fit.r2 = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  fit.t_min = distinct.front();
  fit.t_max = distinct.back();
  fit.n_points = static_cast<int>(xs.size());
  return fit;
}

void trim_overshoot(std::vector<double>& T, std::vector<double>& err) {
  std::vector<std::size_t> order(T.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return T[a] < T[b]; });
  std::vector<double> t2, e2;
  for (auto i : order) {
    if (!e2.empty() && !(err[i] < e2.back())) continue;
    t2.push_back(T[i]);
    e2.push_back(err[i]);
  }
  T = std::move(t2);
  err = std::move(e2);
}

EnvelopeParams envelope_params(double a, double b, double delta) {
  if (!(a > 0 && b > 0 && delta > 0)) throw std::invalid_argument("envelope parameters must be positive");
  EnvelopeParams p{a, b, delta, 0, 0};
  p.U_min = std::exp(a * (std::log(a / b) - 1.0) + delta);
  p.v_max = b * (1.0 - std::exp(-delta / a));
  return p;
}

double multiplication_bound(const std::vector<double>& x, const std::vector<double>& f,
                            const std::vector<double>& eps) {
  const std::size_t n = x.size();
  if (n == 0 || f.size() != n || eps.size() != n)
    throw std::invalid_argument("multiplication bound needs equal, nonempty x, f, eps");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(eps[i] >= 0.0)) throw std::invalid_argument("error bounds must be nonnegative");
    if (f[i] < std::abs(x[i]) + eps[i])
      throw std::invalid_argument("factor bound f_" + std::to_string(i + 1) + " is below |x| + eps");
  }
  // suffix[i] = prod_{k > i} f_k
  std::vector<double> suffix(n, 1.0);
  for (std::size_t i = n - 1; i > 0; --i) suffix[i - 1] = suffix[i] * f[i];
  double bound = 0.0, prefix = 1.0;  // prefix = |x_1 ... x_{i-1}|
  for (std::size_t i = 0; i < n; ++i) {
    bound += prefix * suffix[i] * eps[i];
    prefix *= std::abs(x[i]);
  }
  return bound;
}

Vec2 operator*(const Mat2& m, const Vec2& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
  Mat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

Mat2 step_matrix(const IterationCoefficients& c, double T, int p_batch) {
  if (p_batch < 1) throw std::invalid_argument("batch size must be positive");
  if (!(T >= 0.0)) throw std::invalid_argument("phase length must be nonnegative");
  for (double d : c.D)
    if (d < 0) throw std::invalid_argument("D coefficients must be nonnegative");
  for (double v : c.C)
    if (v < 0) throw std::invalid_argument("C coefficients must be nonnegative");
  for (double v : c.rs)
    if (v < 0) throw std::invalid_argument("(R, S) entries must be nonnegative");

  const auto& D = c.D;
  const double B[3] = {5 * D[0] + 4 * c.C[0], 5 * D[1] + 4 * c.C[1], 5 * D[2]};
  const double F[3] = {3 * D[0] + c.C[0], 3 * D[1] + c.C[1], 3 * D[2]};
  double sb = 0, sf = 0, pw = 1;
  for (int r = 0; r < 3; ++r, pw *= T) {
    sb += B[r] * pw;
    sf += F[r] * pw;
  }
  const double s5 = 5 * (D[3] + D[4] * T), s3 = 3 * (D[3] + D[4] * T);
  const double q = 2.0 * p_batch;
  return {{{q * sb + 1.0, q * s5 + q}, {q * sf, q * s3 + 1.0 + q}}};
}

Vec2 iteration_error_bound(const std::vector<Vec2>& rs, const std::vector<Mat2>& steps, int m) {
  if (m < 1) throw std::invalid_argument("iteration must be at least 1");
  if (static_cast<int>(rs.size()) < m)
    throw std::invalid_argument("missing (R, S) coefficients for iteration " + std::to_string(rs.size() + 1));
  if (m >= 2 && static_cast<int>(steps.size()) < m)
    throw std::invalid_argument("missing step matrix for iteration " + std::to_string(steps.size() + 1));

  Vec2 total{0.0, 0.0};
  Mat2 prod{{{1.0, 0.0}, {0.0, 1.0}}};  // M_m ... M_{m-j+1}
  for (int j = 0; j <= m - 2; ++j) {
    Vec2 term = prod * rs[m - j - 1];
    total[0] += term[0];
    total[1] += term[1];
    prod = prod * steps[m - j - 1];
  }
  Vec2 tail = prod * rs[0];
  return {total[0] + tail[0], total[1] + tail[1]};
}

Vec2 iteration_error_bound(const std::vector<IterationCoefficients>& coeffs, double T, int p_batch, int m) {
  if (static_cast<int>(coeffs.size()) < m)
    throw std::invalid_argument("missing coefficients for iteration " + std::to_string(coeffs.size() + 1));
  std::vector<Vec2> rs;
  std::vector<Mat2> steps;
  for (int i = 0; i < m; ++i) {
    rs.push_back(coeffs[i].rs);
    steps.push_back(step_matrix(coeffs[i], T, p_batch));
  }
  return iteration_error_bound(rs, steps, m);
}

double closed_form_oracle(OracleKind kind, const std::vector<double>& p, double t) {
  auto need = [&](std::size_t k) {
    if (p.size() != k) throw std::invalid_argument("wrong number of oracle parameters");
  };
  switch (kind) {
    case OracleKind::Relaxation:
      need(2);
      return p[0] + (p[1] - p[0]) * std::exp(-t);
    case OracleKind::Decay:
      need(1);
      return p[0] * std::exp(-t);
    case OracleKind::Annihilation: {
      need(2);
      const double x0 = p[0], y0 = p[1];
      if (!(x0 > 0 && y0 >= 0)) throw std::invalid_argument("annihilation needs x0 > 0, y0 >= 0");
      const double d = x0 - y0;
      if (d == 0.0) return x0 / (1.0 + x0 * t);
      if (std::isinf(t)) return std::max(d, 0.0);
      return d / (1.0 - (y0 / x0) * std::exp(-d * t));
    }
    case OracleKind::Logistic: {
      need(2);
      const double p0 = p[0], n0 = p[1];
      if (!(p0 > 0 && p0 < 1)) throw std::invalid_argument("logistic oracle needs p0 in (0, 1)");
      return 1.0 / (1.0 + (1.0 - p0) / p0 * std::exp(-n0 * (1.0 - std::exp(-t))));
    }
  }
  throw std::invalid_argument("unknown oracle");
}

namespace {
std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = rank;
    i = j + 1;
  }
  return r;
}
}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("spearman needs two equal series of length >= 2");
  auto ra = average_ranks(a), rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0 || sbb == 0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

}  // namespace bfcnn
