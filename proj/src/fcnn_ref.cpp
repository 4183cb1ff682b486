#include "bfcnn/fcnn_ref.hpp"

#include <cmath>
#include <stdexcept>

#include "bfcnn/csv.hpp"
#include "bfcnn/monomials.hpp"

namespace bfcnn {

BatchView batch_for_iteration(const DatasetSpec& ds, int m, int p_batch) {
  if (p_batch < 1 || ds.p() % p_batch != 0)
    throw std::invalid_argument("batch size must divide the dataset size");
  BatchView b;
  for (int l = 1; l <= p_batch; ++l) {
    const auto& col = ds.chi[batch_column(m, l, p_batch, ds.p()) - 1];
    b.xi.push_back({col[0], col[1], 1.0});
    b.delta.push_back(col[2]);
  }
  return b;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Forward feedforward(const Mat3& W, const BatchView& batch) {
  Forward f;
  for (int l = 0; l < batch.size(); ++l) {
    const auto& x = batch.xi[l];
    std::array<double, 2> n{}, u{};
    for (int i = 0; i < 2; ++i) {
      n[i] = W[i][0] * x[0] + W[i][1] * x[1] + W[i][2] * x[2];
      u[i] = sigmoid(n[i]);
    }
    double nt = W[2][0] * u[0] + W[2][1] * u[1] + W[2][2];
    f.N.push_back(n);
    f.Upsilon.push_back(u);
    f.Ntilde.push_back(nt);
    f.y.push_back(sigmoid(nt));
  }
  return f;
}

double loss(const std::vector<double>& y, const std::vector<double>& delta) {
  if (y.size() != delta.size()) throw std::invalid_argument("output and target sizes differ");
  double s = 0.0;
  for (std::size_t l = 0; l < y.size(); ++l) s += (delta[l] - y[l]) * (delta[l] - y[l]);
  return 0.5 * s;
}

Mat3 gradients(const Mat3& W, const BatchView& batch, double eta) {
  Forward f = feedforward(W, batch);
  Mat3 d{};
  for (int l = 0; l < batch.size(); ++l) {
    double e = batch.delta[l] - f.y[l];
    double g_out = e * f.y[l] * (1.0 - f.y[l]);
    const auto& u = f.Upsilon[l];
    d[2][0] += eta * g_out * u[0];
    d[2][1] += eta * g_out * u[1];
    d[2][2] += eta * g_out;
    for (int i = 0; i < 2; ++i) {
      double g_hid = g_out * W[2][i] * u[i] * (1.0 - u[i]);
      for (int j = 0; j < 3; ++j) d[i][j] += eta * g_hid * batch.xi[l][j];
    }
  }
  return d;
}

Mat3 mbgd_step(const Mat3& W, const BatchView& batch, double eta) {
  Mat3 d = gradients(W, batch, eta);
  Mat3 out = W;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] += d[i][j];
  return out;
}

DualRailMatrices rail_partials(const DualRailMatrices& rails, const BatchView& batch) {
  Forward f = feedforward(rails.value(), batch);
  DualRailMatrices par;
  for (const auto& m : enumerate_monomials(batch.size())) {
    const int l = m.slot - 1;
    const double e = batch.delta[l] - f.y[l];
    std::vector<double> v;
    for (const auto& fac : m.factors) {
      switch (fac.kind) {
        case FactorKind::ErrorRail: v.push_back(std::max(0.0, fac.sign * e)); break;
        case FactorKind::HiddenOut: v.push_back(f.Upsilon[l][fac.index - 1]); break;
        case FactorKind::Output: v.push_back(f.y[l]); break;
        case FactorKind::OneMinusY: v.push_back(1.0 - f.y[l]); break;
        case FactorKind::OneMinusP: v.push_back(1.0 - f.Upsilon[l][fac.index - 1]); break;
        case FactorKind::OutputWeight:
          v.push_back(fac.sign > 0 ? rails.pos[2][fac.index - 1] : rails.neg[2][fac.index - 1]);
          break;
        case FactorKind::Input: v.push_back(batch.xi[l][fac.index - 1]); break;
      }
    }
    // Same pairing as the CRN product tree.
    for (const auto& level : product_tree(static_cast<int>(v.size()))) {
      std::vector<double> next;
      for (auto [a, b] : level.pairs) next.push_back(b < 0 ? v[a] : v[a] * v[b]);
      v = std::move(next);
    }
    auto& target = m.parity() > 0 ? par.pos : par.neg;
    target[m.row - 1][m.col - 1] += v[0];
  }
  return par;
}

ReferenceState dual_rail_step(const ReferenceState& s, const BatchView& batch, double eta) {
  DualRailMatrices par = rail_partials(s.rails, batch);
  ReferenceState out = s;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      out.rails.pos[i][j] += eta * par.pos[i][j];
      out.rails.neg[i][j] += eta * par.neg[i][j];
    }
  out.iteration = s.iteration + 1;
  return out;
}

void write_weight_rows(std::ostream& out, int iteration, const DualRailMatrices& w) {
  for (int rail : {1, -1}) {
    const Mat3& m = rail > 0 ? w.pos : w.neg;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        out << iteration << ',' << (rail > 0 ? '+' : '-') << ',' << i + 1 << ',' << j + 1 << ','
            << fmt(m[i][j]) << '\n';
  }
}

}  // namespace bfcnn
