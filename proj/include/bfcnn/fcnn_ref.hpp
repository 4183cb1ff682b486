#pragma once

#include <ostream>
#include <vector>

#include "bfcnn/types.hpp"

namespace bfcnn {

struct ReferenceState {
  DualRailMatrices rails;
  int iteration = 0;
  Mat3 W() const { return rails.value(); }
};

// Inputs of one mini-batch: xi[l] = (x1, x2, 1), delta[l] = target.
struct BatchView {
  std::vector<std::array<double, 3>> xi;
  std::vector<double> delta;
  int size() const { return static_cast<int>(delta.size()); }
};

BatchView batch_for_iteration(const DatasetSpec& ds, int m, int p_batch);

struct Forward {
  std::vector<std::array<double, 2>> N;        // hidden net input per slot
  std::vector<std::array<double, 2>> Upsilon;  // hidden output
  std::vector<double> Ntilde;                  // output net input
  std::vector<double> y;
};

double sigmoid(double x);

Forward feedforward(const Mat3& W, const BatchView& batch);
double loss(const std::vector<double>& y, const std::vector<double>& delta);

// Delta W = -eta dE/dW, in the 3x3 layout.
Mat3 gradients(const Mat3& W, const BatchView& batch, double eta);
Mat3 mbgd_step(const Mat3& W, const BatchView& batch, double eta);

// Per-rail sums of the signed gradient monomials (without eta), in the
// enumeration order of enumerate_monomials.
DualRailMatrices rail_partials(const DualRailMatrices& rails, const BatchView& batch);
ReferenceState dual_rail_step(const ReferenceState& s, const BatchView& batch, double eta);

// Rows "iteration,rail,row,col,value" (rail is + or -), no header.
void write_weight_rows(std::ostream& out, int iteration, const DualRailMatrices& w);

}  // namespace bfcnn
