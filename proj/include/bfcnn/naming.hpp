#pragma once

// Species names follow ROLE{sign}_{indices}. Indices are 1-based; weights live
// in a 3x3 layout whose rows 1-2 are the hidden layer and row 3 the output layer.

#include <string>

namespace bfcnn::names {

inline std::string sgn(int s) { return s > 0 ? "+" : "-"; }
inline std::string idx(int a) { return std::to_string(a); }
inline std::string idx(int a, int b) { return std::to_string(a) + "," + std::to_string(b); }

// Dataset column i: x1, x2 and the target d.
inline std::string sample(int row, int i) {
  return (row == 1 ? "X1_" : row == 2 ? "X2_" : "D_") + idx(i);
}
inline std::string input(int j, int l) { return "S_" + idx(j, l); }
inline std::string order(int l, int i) { return "C_" + idx(l, i); }
inline std::string order_aux(int l, int i) { return "CT_" + idx(l, i); }

inline std::string weight(int s, int r, int c) { return "W" + sgn(s) + "_" + idx(r, c); }
inline std::string snapshot(int s, int r, int c) { return "G" + sgn(s) + "_" + idx(r, c); }

// Net input of node i (1, 2 hidden; 3 output) for batch slot l.
inline std::string net(int s, int i, int l) { return "N" + sgn(s) + "_" + idx(i, l); }
inline std::string hidden_rail(int s, int i, int l) { return "P" + sgn(s) + "_" + idx(i, l); }
inline std::string hidden(int i, int l) { return "P_" + idx(i, l); }
inline std::string output_rail(int s, int l) { return "Y" + sgn(s) + "_" + idx(l); }
inline std::string output(int l) { return "Y_" + idx(l); }

// Pre-calculation species.
inline std::string y_copy(int l) { return "YT_" + idx(l); }
inline std::string y_err(int l) { return "YE_" + idx(l); }
inline std::string y_sub(int l) { return "YS_" + idx(l); }
inline std::string y_ind(int l) { return "IY_" + idx(l); }
inline std::string p_sub(int i, int l) { return "PS_" + idx(i, l); }
inline std::string p_copy(int i, int l) { return "PT_" + idx(i, l); }
inline std::string p_ind(int i, int l) { return "IP_" + idx(i, l); }
inline std::string err_rail(int s, int l) { return "E" + sgn(s) + "_" + idx(l); }
inline std::string err(int l) { return "E_" + idx(l); }
inline std::string one_minus_y(int l) { return "SY_" + idx(l); }
inline std::string one_minus_p(int i, int l) { return "SP_" + idx(i, l); }

// Learning species.
inline std::string partial(int s, int r, int c) { return "PAR" + sgn(s) + "_" + idx(r, c); }
inline std::string delta_w(int s, int r, int c) { return "DW" + sgn(s) + "_" + idx(r, c); }

}  // namespace bfcnn::names
