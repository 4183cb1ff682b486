#include <omp.h>

#include <algorithm>

#include "bfcnn/crn.hpp"

namespace bfcnn {

ParallelDerivative::ParallelDerivative(const Crn& crn) : crn_(&crn) {
  // CSR by species; within a row, entries stay in reaction order.
  std::vector<std::size_t> count(crn.size(), 0);
  for (const auto& r : crn.reactions())
    for (const auto& [s, d] : r.net) ++count[s];
  row_start_.assign(crn.size() + 1, 0);
  for (std::size_t i = 0; i < crn.size(); ++i) row_start_[i + 1] = row_start_[i] + count[i];
  col_.resize(row_start_.back());
  weight_.resize(row_start_.back());
  std::vector<std::size_t> fill(row_start_.begin(), row_start_.end() - 1);
  for (std::size_t j = 0; j < crn.reaction_count(); ++j)
    for (const auto& [s, d] : crn.reactions()[j].net) {
      col_[fill[s]] = j;
      weight_[fill[s]] = static_cast<double>(d);
      ++fill[s];
    }
  rates_.resize(crn.reaction_count());
}

void ParallelDerivative::operator()(std::span<const double> x, std::span<double> out) const {
  const Crn& crn = *crn_;
  if (x.size() != crn.size() || out.size() != crn.size())
    throw StructuralError("state dimension " + std::to_string(x.size()) +
                          " does not match " + std::to_string(crn.size()) + " species");
  const auto& reactions = crn.reactions();
  const long nr = static_cast<long>(reactions.size());
  const long ns = static_cast<long>(crn.size());
  double* rates = rates_.data();
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (long j = 0; j < nr; ++j) rates[j] = reaction_rate(reactions[j], x);
#pragma omp for schedule(static)
    for (long i = 0; i < ns; ++i) {
      double acc = 0.0;
      for (std::size_t e = row_start_[i]; e < row_start_[i + 1]; ++e) acc += weight_[e] * rates[col_[e]];
      out[i] = acc;
    }
  }
}

std::vector<double> ParallelDerivative::operator()(std::span<const double> x) const {
  std::vector<double> out(crn_->size());
  (*this)(x, out);
  return out;
}

}  // namespace bfcnn
