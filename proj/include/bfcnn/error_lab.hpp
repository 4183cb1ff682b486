#pragma once

#include <array>
#include <string>
#include <vector>

#include "bfcnn/types.hpp"

namespace bfcnn {

struct ErrorRecord {
  std::string dataset;
  double T = 0.0;
  int iteration = 0;
  double err_w1 = 0.0;
  double err_w2 = 0.0;
  double err_total = 0.0;
  double train_err_max = 0.0;
  bool terminated = false;
};

// Max absolute entry over the given rows.
double max_abs(const Mat3& m, int row_begin, int row_end);

// c * (|w+ - W+| + |w- - W-|) per layer; err_total uses all nine entries.
ErrorRecord realization_error(const DualRailMatrices& sim, const DualRailMatrices& ref, double c = 1.0);

struct FitResult {
  double v = 0.0;
  double intercept = 0.0;  // ln(m)
  double r2 = 0.0;
  double t_min = 0.0, t_max = 0.0;
  int n_points = 0;
  int excluded = 0;  // nonpositive errors dropped
};

// Least squares of ln(err) = ln(m) - v T. Throws std::invalid_argument with fewer than 4 usable points.
FitResult fit_convergence_order(const std::vector<double>& T, const std::vector<double>& err);

// Drops points that break the decreasing trend (overshoot), keeping the first point.
void trim_overshoot(std::vector<double>& T, std::vector<double>& err);

struct EnvelopeParams {
  double a = 0, b = 0, delta = 0;
  double U_min = 0, v_max = 0;
};
EnvelopeParams envelope_params(double a, double b, double delta);

// Bound on |prod xbar - prod x| for |xbar_i - x_i| <= eps_i, given f_i >= |x_i| + eps_i.
double multiplication_bound(const std::vector<double>& x, const std::vector<double>& f,
                            const std::vector<double>& eps);

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

Vec2 operator*(const Mat2& m, const Vec2& v);
Mat2 operator*(const Mat2& a, const Mat2& b);

// Coefficient families of one iteration. B and F are derived from D and C.
struct IterationCoefficients {
  Vec2 rs{};                   // (R~, S~)_m
  std::array<double, 5> D{};   // D_1..D_5
  std::array<double, 2> C{};   // C~_1, C~_2
};

// [BFD]_m + P~ for phase length T and batch size p~. Throws on negative coefficients.
Mat2 step_matrix(const IterationCoefficients& c, double T, int p_batch);

// Closed sum over iterations 1..m. rs[i] and steps[i] belong to iteration i+1;
// steps[0] is never used. Products are left products M_m ... M_{m-j+1}.
Vec2 iteration_error_bound(const std::vector<Vec2>& rs, const std::vector<Mat2>& steps, int m);
Vec2 iteration_error_bound(const std::vector<IterationCoefficients>& coeffs, double T, int p_batch, int m);

enum class OracleKind { Relaxation, Decay, Annihilation, Logistic };
// Relaxation {a, x0}; Decay {x0}; Annihilation {x0, y0} -> x(t); Logistic {p0, n0}.
double closed_form_oracle(OracleKind kind, const std::vector<double>& params, double t);

// Spearman rank correlation with average ranks for ties. NaN if a side is constant.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace bfcnn
