#pragma once

// Signed gradient monomials. The negative gradient of the squared loss splits
// into products of nonnegative factors; a monomial belongs to the positive or
// negative rail by the parity of its negative-rail factors. The CRN builder
// and the reference model both enumerate through here.

#include <string>
#include <vector>

namespace bfcnn {

enum class FactorKind {
  ErrorRail,     // E^a_l, a = sign
  HiddenOut,     // PT_i,l (Upsilon_i)
  Output,        // YT_l (y)
  OneMinusY,     // SY_l (1 - y)
  OneMinusP,     // SP_i,l (1 - Upsilon_i)
  OutputWeight,  // W^b_3,i
  Input,         // S_j,l
};

struct Factor {
  FactorKind kind;
  int sign = 0;   // ErrorRail / OutputWeight only
  int index = 0;  // i or j where relevant
};

struct Monomial {
  int row = 0, col = 0;  // weight entry in the 3x3 layout, 1-based
  int slot = 0;          // batch slot l, 1-based
  int e_sign = 1;
  int w_sign = 0;        // 0 for output-layer entries
  std::vector<Factor> factors;

  int parity() const { return w_sign == 0 ? e_sign : e_sign * w_sign; }
  // Stable text key, e.g. "1,2,1,+-"; used for species names and ordering.
  std::string key() const;
};

// All monomials for a batch, sorted by (slot, row, col, e_sign desc, w_sign desc).
// Hidden entries carry 7 factors (6 for the bias column), output entries 4 (3 for the bias).
std::vector<Monomial> enumerate_monomials(int p_batch);

// Pairwise product tree: level 0 is the factor list, each next level multiplies
// adjacent pairs left to right and carries an odd element up.
// Returns the pairs (left, right) per level as indices into the previous level.
struct TreeLevel {
  std::vector<std::pair<int, int>> pairs;  // right == -1 means carried
};
std::vector<TreeLevel> product_tree(int n_factors);

}  // namespace bfcnn
