#include "bfcnn/netbuild.hpp"

#include <algorithm>
#include <set>

#include "bfcnn/csv.hpp"
#include "bfcnn/monomials.hpp"
#include "bfcnn/naming.hpp"

namespace bfcnn {

namespace n = names;

std::size_t BfcnnBlueprint::id(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw StructuralError("unknown species '" + name + "'");
  return it->second;
}

std::size_t BfcnnBlueprint::module_position(const std::string& label) const {
  for (std::size_t i = 0; i < modules.size(); ++i)
    if (modules[i].label == label) return i;
  throw StructuralError("no module labelled '" + label + "'");
}

const PhasedModule& BfcnnBlueprint::module(const std::string& label) const {
  return modules[module_position(label)];
}

void validate_shape(const NetworkShape& shape) {
  if (shape.p < 1) throw ConfigError("dataset size p must be positive");
  if (shape.p_batch < 1 || shape.p_batch > shape.p)
    throw ConfigError("batch size must lie in [1, p]");
  if (shape.p % shape.p_batch != 0)
    throw ConfigError("batch size " + std::to_string(shape.p_batch) + " does not divide p = " +
                      std::to_string(shape.p));
}

PhasedModule make_module(std::string label, int phase, Crn crn) {
  PhasedModule m;
  m.label = std::move(label);
  m.phase_index = phase;
  std::set<std::size_t> reads;
  for (const auto& r : crn.reactions())
    for (const auto& t : r.reactants) reads.insert(t.species);
  for (auto s : reads) m.reads.push_back(crn.name(s));
  for (auto s : crn.written_species()) m.writes.push_back(crn.name(s));
  m.crn = std::move(crn);
  return m;
}

std::vector<PhasedModule> build_assignment(const NetworkShape& shape, double k) {
  validate_shape(shape);
  if (!(k > 1.0))
    throw ConfigError("assignment rate constant k must exceed 1 (got " + fmt(k) +
                      "); the error bounds for later iterations assume it");
  const int p = shape.p, pb = shape.p_batch;

  CrnBuilder load;
  for (int l = 1; l <= pb; ++l)
    for (int j = 1; j <= 3; ++j) {
      for (int i = 1; i <= p; ++i)
        load.add({n::sample(j, i), n::order(l, i)}, {n::sample(j, i), n::order(l, i), n::input(j, l)}, 1.0);
      load.add({n::input(j, l)}, {}, 1.0);
    }

  CrnBuilder park;
  for (int l = 1; l <= pb; ++l)
    for (int i = 1; i <= p; ++i) park.add({n::order(l, i)}, {n::order_aux(l, i)}, k);

  // Row l selects columns l, l+pb, ...; each moves one batch forward, the last wraps to l.
  CrnBuilder shift;
  for (int l = 1; l <= pb; ++l)
    for (int i = 1; i <= p; ++i) {
      int target = i;
      if (i >= l && (i - l) % pb == 0) target = i + pb <= p ? i + pb : l;
      shift.add({n::order_aux(l, i)}, {n::order(l, target)}, k);
    }

  std::vector<PhasedModule> out;
  out.push_back(make_module("M^a_1", 1, load.build()));
  out.push_back(make_module("M^a_2", 3, park.build()));
  out.push_back(make_module("M^a_3", 5, shift.build()));
  return out;
}

std::vector<PhasedModule> build_feedforward_layer(int layer, const NetworkShape& shape) {
  validate_shape(shape);
  if (layer != 1 && layer != 2) throw ConfigError("layer must be 1 or 2");
  const int pb = shape.p_batch;
  const std::vector<int> nodes = layer == 1 ? std::vector<int>{1, 2} : std::vector<int>{3};
  auto input = [&](int j, int l) { return layer == 1 ? n::input(j, l) : n::hidden(j, l); };
  auto rail_out = [&](int s, int i, int l) {
    return layer == 1 ? n::hidden_rail(s, i, l) : n::output_rail(s, l);
  };
  auto out_name = [&](int i, int l) { return layer == 1 ? n::hidden(i, l) : n::output(l); };

  CrnBuilder lws, annih, sig1, sig2;
  for (int i : nodes)
    for (int l = 1; l <= pb; ++l) {
      for (int s : {1, -1}) {
        const auto N = n::net(s, i, l);
        for (int j = 1; j <= 2; ++j)
          lws.add({n::weight(s, i, j), input(j, l)}, {n::weight(s, i, j), input(j, l), N}, 1.0);
        lws.add({n::weight(s, i, 3)}, {n::weight(s, i, 3), N}, 1.0);
        lws.add({N}, {}, 1.0);

        const auto P = rail_out(s, i, l);
        sig1.add({N}, {N, P}, 0.5);
        sig1.add({N, P}, {N}, 1.0);

        if (s > 0) {
          sig2.add({N, P}, {N, P, P}, 1.0);
          sig2.add({N, P, P}, {N, P}, 1.0);
        } else {
          sig2.add({N, P, P}, {N, P, P, P}, 1.0);
          sig2.add({N, P}, {N}, 1.0);
        }
        sig2.add({N}, {}, 1.0);
        sig2.add({P}, {P, out_name(i, l)}, 1.0);
      }
      annih.add({n::net(1, i, l), n::net(-1, i, l)}, {}, 1.0);
      sig2.add({out_name(i, l)}, {}, 1.0);
    }

  const int base = layer == 1 ? 7 : 15;
  const std::string tag = layer == 1 ? "L1" : "L2";
  std::vector<PhasedModule> out;
  out.push_back(make_module("lws-" + tag, base, lws.build()));
  out.push_back(make_module("annih-" + tag, base + 2, annih.build()));
  out.push_back(make_module("sig1-" + tag, base + 4, sig1.build()));
  out.push_back(make_module("sig2-" + tag, base + 6, sig2.build()));
  return out;
}

Crn build_snapshot_copy() {
  CrnBuilder b;
  for (int s : {1, -1})
    for (int r = 1; r <= 3; ++r)
      for (int c = 1; c <= 3; ++c) {
        b.add({n::weight(s, r, c)}, {n::weight(s, r, c), n::snapshot(s, r, c)}, 1.0);
        b.add({n::snapshot(s, r, c)}, {}, 1.0);
      }
  return b.build();
}

PhasedModule build_precalc(const NetworkShape& shape, double k_pre) {
  validate_shape(shape);
  if (!(k_pre > 1.0)) throw ConfigError("pre-calculation rate constant k_pre must exceed 1");
  CrnBuilder b;
  for (int l = 1; l <= shape.p_batch; ++l) {
    const auto Y = n::output(l), YE = n::y_err(l), YS = n::y_sub(l), IY = n::y_ind(l);
    const auto S3 = n::input(3, l);
    // Boundary equilibrium reactions.
    b.add({Y}, {n::y_copy(l), YE, YS}, k_pre);
    b.add({YE, S3}, {}, k_pre);
    b.add({YS, IY}, {}, k_pre);
    for (int i = 1; i <= 2; ++i) {
      b.add({n::hidden(i, l)}, {n::p_sub(i, l), n::p_copy(i, l)}, k_pre);
      b.add({n::p_sub(i, l), n::p_ind(i, l)}, {}, k_pre);
    }
    // Type-I relaxations: target tracks its catalyst.
    auto track = [&](const std::string& cat, const std::string& target) {
      b.add({cat}, {cat, target}, 1.0);
    };
    track(S3, n::err_rail(1, l));
    track(YE, n::err_rail(-1, l));
    track(IY, n::one_minus_y(l));
    for (int i = 1; i <= 2; ++i) track(n::p_ind(i, l), n::one_minus_p(i, l));
    track(n::err_rail(1, l), n::err(l));
    track(n::err_rail(-1, l), n::err(l));
    for (const auto& d : {n::err_rail(1, l), n::err_rail(-1, l), n::one_minus_y(l), n::err(l)})
      b.add({d}, {}, 1.0);
    for (int i = 1; i <= 2; ++i) b.add({n::one_minus_p(i, l)}, {}, 1.0);
  }
  return make_module("pBCRN", 23, b.build());
}

PhasedModule build_judgment_standin(double threshold) {
  if (!(threshold > 0.0)) throw ConfigError("termination threshold must be positive");
  PhasedModule m;
  m.label = "judgment";
  m.phase_index = 25;
  m.kind = ModuleKind::Judgment;
  m.threshold = threshold;
  return m;
}

std::string tree_species(const std::string& key, int level, int pos, bool last) {
  if (last) return "Q_" + key;
  return "U" + std::to_string(level) + "." + std::to_string(pos) + "_" + key;
}

namespace {

std::string factor_species(const Factor& f, int l) {
  switch (f.kind) {
    case FactorKind::ErrorRail: return n::err_rail(f.sign, l);
    case FactorKind::HiddenOut: return n::p_copy(f.index, l);
    case FactorKind::Output: return n::y_copy(l);
    case FactorKind::OneMinusY: return n::one_minus_y(l);
    case FactorKind::OneMinusP: return n::one_minus_p(f.index, l);
    case FactorKind::OutputWeight: return n::weight(f.sign, 3, f.index);
    case FactorKind::Input: return n::input(f.index, l);
  }
  return {};
}

// Adds the product-tree reactions for one monomial; returns the species names created.
std::vector<std::string> add_product_tree(CrnBuilder& b, const Monomial& m) {
  std::vector<std::string> level_names;
  for (const auto& f : m.factors) level_names.push_back(factor_species(f, m.slot));
  std::vector<std::string> created;
  auto levels = product_tree(static_cast<int>(level_names.size()));
  for (std::size_t lv = 0; lv < levels.size(); ++lv) {
    const bool last = lv + 1 == levels.size();
    std::vector<std::string> next;
    int pos = 0;
    for (auto [a, c] : levels[lv].pairs) {
      if (c < 0) {
        next.push_back(level_names[a]);
      } else {
        auto u = tree_species(m.key(), static_cast<int>(lv) + 1, pos, last);
        b.add({level_names[a], level_names[c]}, {level_names[a], level_names[c], u}, 1.0);
        b.add({u}, {}, 1.0);
        next.push_back(u);
        created.push_back(u);
      }
      ++pos;
    }
    level_names = std::move(next);
  }
  return created;
}

std::vector<std::string> tree_intermediates(const NetworkShape& shape) {
  CrnBuilder scratch;
  std::vector<std::string> all;
  for (const auto& m : enumerate_monomials(shape.p_batch)) {
    auto c = add_product_tree(scratch, m);
    all.insert(all.end(), c.begin(), c.end());
  }
  return all;
}

}  // namespace

std::vector<PhasedModule> build_learning(const NetworkShape& shape, double eta) {
  validate_shape(shape);
  if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("learning rate eta must lie in (0, 1]");

  CrnBuilder grad;
  for (const auto& m : enumerate_monomials(shape.p_batch)) {
    add_product_tree(grad, m);
    auto q = tree_species(m.key(), 0, 0, true);
    grad.add({q}, {q, n::partial(m.parity(), m.row, m.col)}, 1.0);
  }
  for (int s : {1, -1})
    for (int r = 1; r <= 3; ++r)
      for (int c = 1; c <= 3; ++c) grad.add({n::partial(s, r, c)}, {}, 1.0);

  CrnBuilder update;
  for (int s : {1, -1})
    for (int r = 1; r <= 3; ++r)
      for (int c = 1; c <= 3; ++c) {
        const auto P = n::partial(s, r, c), D = n::delta_w(s, r, c), G = n::snapshot(s, r, c),
                   W = n::weight(s, r, c);
        update.add({P}, {P, D}, eta);
        update.add({D}, {}, 1.0);
        update.add({G}, {G, W}, 1.0);
        update.add({D}, {D, W}, 1.0);
        update.add({W}, {}, 1.0);
      }

  std::vector<PhasedModule> out;
  out.push_back(make_module("learn-grad", 27, grad.build()));
  out.push_back(make_module("learn-update", 29, update.build()));
  return out;
}

PhasedModule build_clearout(const NetworkShape& shape) {
  validate_shape(shape);
  CrnBuilder b;
  auto decay = [&](const std::string& s) { b.add({s}, {}, 1.0); };
  for (int l = 1; l <= shape.p_batch; ++l) {
    for (int s : {1, -1}) {
      for (int i = 1; i <= 2; ++i) decay(n::hidden_rail(s, i, l));
      decay(n::output_rail(s, l));
      for (int i = 1; i <= 3; ++i) decay(n::net(s, i, l));
    }
    decay(n::y_sub(l));
    decay(n::y_err(l));
    decay(n::y_copy(l));
    for (int i = 1; i <= 2; ++i) {
      decay(n::p_sub(i, l));
      decay(n::p_copy(i, l));
    }
    // Indicators relax back to one.
    b.add({}, {n::y_ind(l)}, 1.0);
    decay(n::y_ind(l));
    for (int i = 1; i <= 2; ++i) {
      b.add({}, {n::p_ind(i, l)}, 1.0);
      decay(n::p_ind(i, l));
    }
  }
  for (const auto& u : tree_intermediates(shape)) decay(u);
  return make_module("clearout", 31, b.build());
}

BfcnnBlueprint build_bfcnn(const NetworkShape& shape, const DatasetSpec& dataset,
                           const BuildOptions& opts, const DualRailMatrices& initial) {
  validate_shape(shape);
  if (dataset.p() != shape.p)
    throw ConfigError("dataset has " + std::to_string(dataset.p()) + " samples but p = " +
                      std::to_string(shape.p));
  for (const auto& col : dataset.chi)
    if (col[0] < 0 || col[1] < 0 || col[2] < 0)
      throw ConfigError("dataset entries must be nonnegative concentrations");
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (initial.pos[i][j] < 0 || initial.neg[i][j] < 0)
        throw ConfigError("initial weight rails must be nonnegative");

  BfcnnBlueprint bp;
  bp.shape = shape;
  bp.dataset = dataset;
  bp.options = opts;

  auto add_all = [&](std::vector<PhasedModule> ms) {
    for (auto& m : ms) bp.modules.push_back(std::move(m));
  };
  add_all(build_assignment(shape, opts.k));
  auto layer1 = build_feedforward_layer(1, shape);
  {
    // The snapshot copy shares the first weighted-sum phase.
    auto merged = compose(layer1[0].crn, build_snapshot_copy(), [&] {
      std::map<std::string, std::string> shared;
      for (int s : {1, -1})
        for (int r = 1; r <= 2; ++r)
          for (int c = 1; c <= 3; ++c) shared[n::weight(s, r, c)] = n::weight(s, r, c);
      return shared;
    }());
    layer1[0] = make_module(layer1[0].label, layer1[0].phase_index, std::move(merged.crn));
  }
  add_all(std::move(layer1));
  add_all(build_feedforward_layer(2, shape));
  bp.modules.push_back(build_precalc(shape, opts.k_pre));
  bp.modules.push_back(build_judgment_standin(opts.threshold));
  add_all(build_learning(shape, opts.eta));
  bp.modules.push_back(build_clearout(shape));

  for (const auto& m : bp.modules) {
    std::vector<std::size_t> map;
    for (const auto& s : m.crn.species()) {
      auto [it, inserted] = bp.index_.emplace(s.name, bp.global_species.size());
      if (inserted) bp.global_species.push_back(s.name);
      map.push_back(it->second);
    }
    std::vector<std::size_t> writes;
    for (auto w : m.crn.written_species()) writes.push_back(map[w]);
    bp.local_to_global.push_back(std::move(map));
    bp.write_ids.push_back(std::move(writes));
  }

  ConcentrationState x(bp.global_species.size(), 0.0);
  auto set = [&](const std::string& name, double v) { x[bp.id(name)] = v; };
  for (int i = 1; i <= shape.p; ++i)
    for (int r = 1; r <= 3; ++r) set(n::sample(r, i), dataset.chi[i - 1][r - 1]);
  for (int l = 1; l <= shape.p_batch; ++l) {
    set(n::order(l, batch_column(1, l, shape.p_batch, shape.p)), 1.0);
    set(n::y_ind(l), 1.0);
    for (int i = 1; i <= 2; ++i) set(n::p_ind(i, l), 1.0);
  }
  for (int r = 1; r <= 3; ++r)
    for (int c = 1; c <= 3; ++c) {
      set(n::weight(1, r, c), initial.pos[r - 1][c - 1]);
      set(n::weight(-1, r, c), initial.neg[r - 1][c - 1]);
      set(n::snapshot(1, r, c), initial.pos[r - 1][c - 1]);
      set(n::snapshot(-1, r, c), initial.neg[r - 1][c - 1]);
    }
  bp.initial_state = std::move(x);
  return bp;
}

std::string emit_blueprint(const BfcnnBlueprint& bp) {
  std::string out;
  for (const auto& m : bp.modules) {
    out += "# phase " + std::to_string(m.phase_index) + ": " + m.label + "\n";
    if (m.kind == ModuleKind::Judgment)
      out += "# comparator: terminate when max_l E_l < " + fmt(m.threshold) + "\n";
    else
      out += to_text(m.crn);
  }
  return out;
}

}  // namespace bfcnn
