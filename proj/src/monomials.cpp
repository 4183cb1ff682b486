#include "bfcnn/monomials.hpp"

#include <stdexcept>

namespace bfcnn {

std::string Monomial::key() const {
  std::string k = std::to_string(row) + "," + std::to_string(col) + "," + std::to_string(slot) + ",";
  k += e_sign > 0 ? "+" : "-";
  if (w_sign != 0) k += w_sign > 0 ? "+" : "-";
  return k;
}

std::vector<Monomial> enumerate_monomials(int p_batch) {
  if (p_batch < 1) throw std::invalid_argument("batch size must be positive");
  std::vector<Monomial> out;
  for (int l = 1; l <= p_batch; ++l) {
    for (int i = 1; i <= 2; ++i)
      for (int j = 1; j <= 3; ++j)
        for (int a : {1, -1})
          for (int b : {1, -1}) {
            Monomial m{i, j, l, a, b, {}};
            m.factors = {{FactorKind::ErrorRail, a, 0}, {FactorKind::HiddenOut, 0, i},
                         {FactorKind::Output, 0, 0},    {FactorKind::OneMinusY, 0, 0},
                         {FactorKind::OneMinusP, 0, i}, {FactorKind::OutputWeight, b, i}};
            if (j != 3) m.factors.push_back({FactorKind::Input, 0, j});
            out.push_back(std::move(m));
          }
    for (int j = 1; j <= 3; ++j)
      for (int a : {1, -1}) {
        Monomial m{3, j, l, a, 0, {}};
        m.factors = {{FactorKind::ErrorRail, a, 0}, {FactorKind::Output, 0, 0},
                     {FactorKind::OneMinusY, 0, 0}};
        if (j != 3) m.factors.push_back({FactorKind::HiddenOut, 0, j});
        out.push_back(std::move(m));
      }
  }
  return out;
}

std::vector<TreeLevel> product_tree(int n_factors) {
  if (n_factors < 1) throw std::invalid_argument("empty product");
  std::vector<TreeLevel> levels;
  int width = n_factors;
  while (width > 1) {
    TreeLevel lv;
    for (int k = 0; k + 1 < width; k += 2) lv.pairs.emplace_back(k, k + 1);
    if (width % 2) lv.pairs.emplace_back(width - 1, -1);
    width = static_cast<int>(lv.pairs.size());
    levels.push_back(std::move(lv));
  }
  return levels;
}

}  // namespace bfcnn
