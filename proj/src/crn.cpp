#include "bfcnn/crn.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace bfcnn {

std::optional<std::size_t> Crn::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Crn::id(std::string_view name) const {
  auto found = find(name);
  if (!found) throw StructuralError("unknown species '" + std::string(name) + "'");
  return *found;
}

std::vector<std::size_t> Crn::written_species() const {
  std::vector<char> mark(species_.size(), 0);
  for (const auto& r : reactions_)
    for (const auto& [s, d] : r.net) mark[s] = 1;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mark.size(); ++i)
    if (mark[i]) out.push_back(i);
  return out;
}

CrnBuilder::CrnBuilder(const Crn& start) : crn_(start) {}

std::size_t CrnBuilder::species(std::string_view name) {
  if (name.empty()) throw StructuralError("empty species name");
  std::string key(name);
  auto it = crn_.index_.find(key);
  if (it != crn_.index_.end()) return it->second;
  std::size_t id = crn_.species_.size();
  crn_.species_.push_back({id, key});
  crn_.index_.emplace(std::move(key), id);
  return id;
}

namespace {

std::vector<Term> merge_terms(CrnBuilder& b,
                              const std::vector<std::pair<std::string, unsigned>>& side) {
  std::map<std::size_t, unsigned> acc;
  for (const auto& [name, coeff] : side) {
    std::size_t id = b.species(name);
    if (coeff) acc[id] += coeff;
  }
  std::vector<Term> out;
  for (auto [id, c] : acc) out.push_back({id, c});
  return out;
}

}  // namespace

CrnBuilder& CrnBuilder::add_terms(const std::vector<std::pair<std::string, unsigned>>& reactants,
                                  const std::vector<std::pair<std::string, unsigned>>& products,
                                  double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw StructuralError("rate constant must be positive and finite");
  Reaction r;
  r.reactants = merge_terms(*this, reactants);
  r.products = merge_terms(*this, products);
  if (r.reactants.empty() && r.products.empty())
    throw StructuralError("reaction with empty reactant and product complexes");
  r.rate = rate;
  std::map<std::size_t, int> net;
  for (const auto& t : r.products) net[t.species] += static_cast<int>(t.coeff);
  for (const auto& t : r.reactants) net[t.species] -= static_cast<int>(t.coeff);
  for (auto [s, d] : net)
    if (d != 0) r.net.emplace_back(s, d);
  crn_.reactions_.push_back(std::move(r));
  return *this;
}

CrnBuilder& CrnBuilder::add(const std::vector<std::string>& reactants,
                            const std::vector<std::string>& products, double rate) {
  std::vector<std::pair<std::string, unsigned>> lhs, rhs;
  for (const auto& n : reactants) lhs.emplace_back(n, 1u);
  for (const auto& n : products) rhs.emplace_back(n, 1u);
  return add_terms(lhs, rhs, rate);
}

Crn CrnBuilder::build() const { return crn_; }

double reaction_rate(const Reaction& r, std::span<const double> x) {
  double v = r.rate;
  for (const auto& t : r.reactants) {
    double xi = std::max(0.0, x[t.species]);
    switch (t.coeff) {
      case 1: v *= xi; break;
      case 2: v *= xi * xi; break;
      default: v *= std::pow(xi, static_cast<double>(t.coeff));
    }
  }
  return v;
}

void derivative_into(const Crn& crn, std::span<const double> x, std::span<double> out) {
  if (x.size() != crn.size() || out.size() != crn.size())
    throw StructuralError("state dimension " + std::to_string(x.size()) +
                          " does not match " + std::to_string(crn.size()) + " species");
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& r : crn.reactions()) {
    double rate = reaction_rate(r, x);
    for (const auto& [s, d] : r.net) out[s] += static_cast<double>(d) * rate;
  }
}

std::vector<double> derivative(const Crn& crn, std::span<const double> x) {
  std::vector<double> out(crn.size());
  derivative_into(crn, x, out);
  return out;
}

IntMatrix stoichiometric_matrix(const Crn& crn) {
  IntMatrix g(crn.size(), std::vector<int>(crn.reaction_count(), 0));
  for (std::size_t j = 0; j < crn.reaction_count(); ++j)
    for (const auto& [s, d] : crn.reactions()[j].net) g[s][j] = d;
  return g;
}

void validate_state(const Crn& crn, std::span<const double> x) {
  if (x.size() != crn.size())
    throw StructuralError("state dimension " + std::to_string(x.size()) +
                          " does not match " + std::to_string(crn.size()) + " species");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] >= -kClampTol))
      throw StructuralError("species '" + crn.name(i) + "' has invalid concentration " +
                            std::to_string(x[i]));
}

Composition compose(const Crn& a, const Crn& b, const std::map<std::string, std::string>& shared) {
  std::set<std::string> targets;
  for (const auto& [from, to] : shared) {
    if (!b.find(from)) throw StructuralError("shared species '" + from + "' not in second network");
    if (!a.find(to)) throw StructuralError("shared species '" + to + "' not in first network");
    if (!targets.insert(to).second)
      throw StructuralError("species '" + to + "' is the target of two shared names");
  }

  CrnBuilder builder(a);
  Composition out;
  out.a_ids.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.a_ids[i] = i;

  std::vector<std::string> rename(b.size());
  for (const auto& s : b.species()) {
    auto it = shared.find(s.name);
    if (it != shared.end()) {
      rename[s.id] = it->second;
    } else {
      if (a.find(s.name))
        throw StructuralError("species '" + s.name + "' exists in both networks but is not shared");
      rename[s.id] = s.name;
    }
  }
  // Unshared b species are appended in b's id order so composition is deterministic.
  out.b_ids.resize(b.size());
  for (const auto& s : b.species()) out.b_ids[s.id] = builder.species(rename[s.id]);

  for (const auto& r : b.reactions()) {
    std::vector<std::pair<std::string, unsigned>> lhs, rhs;
    for (const auto& t : r.reactants) lhs.emplace_back(rename[t.species], t.coeff);
    for (const auto& t : r.products) rhs.emplace_back(rename[t.species], t.coeff);
    builder.add_terms(lhs, rhs, r.rate);
  }
  out.crn = builder.build();
  return out;
}

}  // namespace bfcnn
