#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bfcnn/errors.hpp"

namespace bfcnn {

// States below -kClampTol count as solver failures; anything above is read as max(x, 0).
inline constexpr double kClampTol = 1e-12;

struct Species {
  std::size_t id = 0;
  std::string name;
};

struct Term {
  std::size_t species = 0;
  unsigned coeff = 0;
  friend bool operator==(const Term&, const Term&) = default;
};

struct Reaction {
  std::vector<Term> reactants;  // sorted by species id, coeff > 0
  std::vector<Term> products;
  double rate = 0.0;
  // Nonzero entries of products - reactants, sorted by species id.
  std::vector<std::pair<std::size_t, int>> net;
};

using ConcentrationState = std::vector<double>;
using IntMatrix = std::vector<std::vector<int>>;

class Crn {
 public:
  Crn() = default;

  const std::vector<Species>& species() const { return species_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }
  std::size_t size() const { return species_.size(); }
  std::size_t reaction_count() const { return reactions_.size(); }

  std::optional<std::size_t> find(std::string_view name) const;
  // Throws StructuralError if absent.
  std::size_t id(std::string_view name) const;
  const std::string& name(std::size_t id) const { return species_.at(id).name; }

  // Species touched with a nonzero net change by some reaction.
  std::vector<std::size_t> written_species() const;

 private:
  friend class CrnBuilder;
  std::vector<Species> species_;
  std::vector<Reaction> reactions_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Builds a Crn. Complexes are given as name lists; a repeated name adds to its coefficient.
class CrnBuilder {
 public:
  CrnBuilder() = default;
  explicit CrnBuilder(const Crn& start);

  std::size_t species(std::string_view name);
  CrnBuilder& add(const std::vector<std::string>& reactants,
                  const std::vector<std::string>& products, double rate);
  CrnBuilder& add_terms(const std::vector<std::pair<std::string, unsigned>>& reactants,
                        const std::vector<std::pair<std::string, unsigned>>& products,
                        double rate);
  Crn build() const;

 private:
  Crn crn_;
};

double reaction_rate(const Reaction& r, std::span<const double> x);

// Serial reference: Gamma * K(x), accumulated reaction by reaction.
std::vector<double> derivative(const Crn& crn, std::span<const double> x);
void derivative_into(const Crn& crn, std::span<const double> x, std::span<double> out);

IntMatrix stoichiometric_matrix(const Crn& crn);

// Throws StructuralError when x has the wrong size or an entry below -kClampTol.
void validate_state(const Crn& crn, std::span<const double> x);

struct Composition {
  Crn crn;
  std::vector<std::size_t> a_ids;  // a species id -> composed id
  std::vector<std::size_t> b_ids;  // b species id -> composed id
};

// Union of a and b. shared maps b names onto existing a names; any other
// b name already present in a is a clash.
Composition compose(const Crn& a, const Crn& b,
                    const std::map<std::string, std::string>& shared = {});

// Line format: "A + 2 B -> C ; k=1.5". "0" is the empty complex, '#' starts a comment.
Crn parse_crn_text(std::string_view text);
std::string to_text(const Crn& crn);

// OpenMP derivative. Rates are computed in parallel, then each species sums
// its contributions in reaction order, so the result is bit-identical to
// derivative(). Holds a scratch buffer: one evaluator per thread.
class ParallelDerivative {
 public:
  explicit ParallelDerivative(const Crn& crn);
  void operator()(std::span<const double> x, std::span<double> out) const;
  std::vector<double> operator()(std::span<const double> x) const;

 private:
  const Crn* crn_;
  std::vector<std::size_t> row_start_;
  std::vector<std::size_t> col_;   // reaction index
  std::vector<double> weight_;     // net coefficient
  mutable std::vector<double> rates_;
};

}  // namespace bfcnn
