#pragma once

#include <array>
#include <string>
#include <vector>

namespace bfcnn {

// 3x3 weight layout: rows 0-1 are W1 (2x3), row 2 is W2 (1x3). Column 2 is the bias.
using Mat3 = std::array<std::array<double, 3>, 3>;

inline Mat3 operator-(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = a[i][j] - b[i][j];
  return r;
}

struct DualRailMatrices {
  Mat3 pos{};
  Mat3 neg{};
  Mat3 value() const { return pos - neg; }
};

struct DatasetSpec {
  std::string name;
  // Columns (x1, x2, d), one per sample.
  std::vector<std::array<double, 3>> chi;
  int p() const { return static_cast<int>(chi.size()); }
};

struct NetworkShape {
  int p = 0;
  int p_batch = 1;
};

// Dataset column (1-based) used by batch slot l at iteration m.
inline int batch_column(int m, int l, int p_batch, int p) {
  return ((m - 1) * p_batch + l - 1) % p + 1;
}

}  // namespace bfcnn
