#include <doctest.h>

#include <cmath>
#include <random>

#include "bfcnn/errors.hpp"
#include "bfcnn/fcnn_ref.hpp"
#include "bfcnn/harness.hpp"
#include "bfcnn/monomials.hpp"
#include "bfcnn/naming.hpp"
#include "bfcnn/netbuild.hpp"
#include "module_run.hpp"

using namespace bfcnn;
using bfcnn::testing::at;
using bfcnn::testing::run_module;
using bfcnn::testing::Values;
namespace n = bfcnn::names;

namespace {

DatasetSpec or_data() { return load_dataset("OR"); }

BfcnnBlueprint or_blueprint(int pb = 2) {
  return build_bfcnn({4, pb}, or_data(), {}, default_initial_weights(42));
}

IntegratorConfig tight() {
  IntegratorConfig c;
  c.rel_tol = 1e-11;
  c.abs_tol = 1e-13;
  return c;
}

}  // namespace

TEST_CASE("the OR blueprint has 16 phased modules on odd phases") {
  auto bp = or_blueprint();
  REQUIRE(bp.modules.size() == 16);
  const std::vector<std::string> labels = {"M^a_1",   "M^a_2",    "M^a_3",      "lws-L1",       "annih-L1", "sig1-L1",
                                           "sig2-L1", "lws-L2",   "annih-L2",   "sig1-L2",      "sig2-L2",  "pBCRN",
                                           "judgment", "learn-grad", "learn-update", "clearout"};
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(bp.modules[i].label == labels[i]);
    CHECK(bp.modules[i].phase_index == static_cast<int>(2 * i + 1));
  }
  CHECK(bp.initial_state.size() == bp.global_species.size());
}

TEST_CASE("blueprints are deterministic") {
  CHECK(emit_blueprint(or_blueprint()) == emit_blueprint(or_blueprint()));
  auto text = emit_blueprint(or_blueprint());
  CHECK(text.find("# phase 7: lws-L1\n") != std::string::npos);
  CHECK(text.find("# phase 25: judgment\n") != std::string::npos);
}

TEST_CASE("shape and rate preconditions") {
  CHECK_THROWS_AS(build_bfcnn({4, 3}, or_data(), {}, {}), ConfigError);
  CHECK_THROWS_AS(build_bfcnn({5, 1}, or_data(), {}, {}), ConfigError);
  CHECK_THROWS_AS(build_assignment({4, 2}, 1.0), ConfigError);
  CHECK_THROWS_AS(build_precalc({4, 2}, 0.5), ConfigError);
  CHECK_THROWS_AS(build_learning({4, 2}, 0.0), ConfigError);
  CHECK_THROWS_AS(build_learning({4, 2}, 1.5), ConfigError);
  CHECK_THROWS_AS(build_judgment_standin(0.0), ConfigError);
  DualRailMatrices bad;
  bad.neg[0][0] = -1;
  CHECK_THROWS_AS(build_bfcnn({4, 2}, or_data(), {}, bad), ConfigError);
}

TEST_CASE("M^a_1 loads the selected columns") {
  auto m = build_assignment({4, 2}, 2.0)[0];
  auto ds = or_data();
  Values init;
  for (int i = 1; i <= 4; ++i)
    for (int r = 1; r <= 3; ++r) init[n::sample(r, i)] = ds.chi[i - 1][r - 1];
  init[n::order(1, 3)] = 1.0;
  init[n::order(2, 4)] = 1.0;
  auto end = run_module(m.crn, init, 50.0, tight());
  for (int j = 1; j <= 3; ++j) {
    CHECK(at(end, n::input(j, 1)) == doctest::Approx(ds.chi[2][j - 1]).epsilon(1e-9));
    CHECK(at(end, n::input(j, 2)) == doctest::Approx(ds.chi[3][j - 1]).epsilon(1e-9));
  }
}

TEST_CASE("M^a_2 parks the selectors and M^a_3 wraps them to the first batch") {
  auto a = build_assignment({4, 2}, 2.0);
  Values init{{n::order(1, 3), 1.0}, {n::order(2, 4), 1.0}};
  auto parked = run_module(a[1].crn, init, 50.0, tight());
  CHECK(at(parked, n::order_aux(1, 3)) == doctest::Approx(1.0));
  CHECK(at(parked, n::order_aux(2, 4)) == doctest::Approx(1.0));
  CHECK(std::abs(at(parked, n::order(1, 3))) < 1e-12);

  auto shifted = run_module(a[2].crn, parked, 50.0, tight());
  CHECK(at(shifted, n::order(1, 1)) == doctest::Approx(1.0));
  CHECK(at(shifted, n::order(2, 2)) == doctest::Approx(1.0));
  CHECK(std::abs(at(shifted, n::order(1, 3))) < 1e-12);

  // From the first batch the shift moves forward to the second.
  Values first{{n::order_aux(1, 1), 1.0}, {n::order_aux(2, 2), 1.0}};
  auto next = run_module(a[2].crn, first, 50.0, tight());
  CHECK(at(next, n::order(1, 3)) == doctest::Approx(1.0));
  CHECK(at(next, n::order(2, 4)) == doctest::Approx(1.0));
}

TEST_CASE("sigmoid stages reproduce the logistic of the net input") {
  auto layer = build_feedforward_layer(2, {4, 1});
  auto run_chain = [&](double np, double nn) {
    Values v{{n::net(1, 3, 1), np}, {n::net(-1, 3, 1), nn}};
    for (int k = 1; k <= 3; ++k) v = run_module(layer[k].crn, v, 50.0, tight());
    return v;
  };
  auto pos = run_chain(1.0, 0.0);
  CHECK(at(pos, n::output(1)) == doctest::Approx(0.731059).epsilon(1e-5));
  auto neg = run_chain(0.5, 2.5);
  CHECK(at(neg, n::output(1)) == doctest::Approx(0.119203).epsilon(1e-5));
  CHECK(at(neg, n::output_rail(1, 1)) < 1e-9);  // carried by the negative rail
}

TEST_CASE("lws computes the weighted sums and the first lws copies the snapshots") {
  auto bp = or_blueprint(1);
  const auto& lws = bp.module("lws-L1");
  Values init{{n::input(1, 1), 0.7}, {n::input(2, 1), 0.2}};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int s : {1, -1})
    for (int r = 1; r <= 2; ++r)
      for (int c = 1; c <= 3; ++c) init[n::weight(s, r, c)] = u(rng);
  auto end = run_module(lws.crn, init, 50.0, tight());
  for (int s : {1, -1})
    for (int i = 1; i <= 2; ++i) {
      double expect = init[n::weight(s, i, 1)] * 0.7 + init[n::weight(s, i, 2)] * 0.2 + init[n::weight(s, i, 3)];
      CHECK(at(end, n::net(s, i, 1)) == doctest::Approx(expect).epsilon(1e-9));
      for (int c = 1; c <= 3; ++c)
        CHECK(at(end, n::snapshot(s, i, c)) == doctest::Approx(init[n::weight(s, i, c)]).epsilon(1e-9));
    }
}

TEST_CASE("pBCRN boundary values") {
  auto m = build_precalc({4, 1}, 4.0);
  Values init{{n::output(1), 0.7}, {n::input(3, 1), 1.0}, {n::hidden(1, 1), 0.5}, {n::hidden(2, 1), 0.2},
              {n::y_ind(1), 1.0},  {n::p_ind(1, 1), 1.0},  {n::p_ind(2, 1), 1.0}};
  auto end = run_module(m.crn, init, 50.0, tight());
  CHECK(at(end, n::err_rail(1, 1)) == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(std::abs(at(end, n::err_rail(-1, 1))) < 1e-9);
  CHECK(at(end, n::err(1)) == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(at(end, n::one_minus_y(1)) == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(at(end, n::y_copy(1)) == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(at(end, n::one_minus_p(1, 1)) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(at(end, n::p_copy(1, 1)) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(at(end, n::one_minus_p(2, 1)) == doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("pBCRN with y equal to d leaves only the algebraic annihilation tail") {
  auto m = build_precalc({4, 1}, 4.0);
  Values init{{n::output(1), 1.0}, {n::input(3, 1), 1.0}, {n::y_ind(1), 1.0}};
  const double T = 50.0;
  auto end = run_module(m.crn, init, T, tight());
  // Equal YE and S3 annihilate like 1/(1 + k t), not exponentially. YE is
  // produced with a lag, so each rail sits a little above 1/(k T).
  CHECK(at(end, n::err_rail(1, 1)) == doctest::Approx(at(end, n::err_rail(-1, 1))).epsilon(1e-6));
  CHECK(at(end, n::err(1)) <= 2.5 / (4.0 * T));
  auto longer = run_module(m.crn, init, 2 * T, tight());
  CHECK(at(end, n::err(1)) / at(longer, n::err(1)) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("judgment compares E_l strictly against the threshold") {
  auto bp = or_blueprint(2);
  const auto& j = bp.module("judgment");
  CHECK(j.kind == ModuleKind::Judgment);
  auto state = bp.initial_state;
  auto set = [&](double e1, double e2) {
    state[bp.id(n::err(1))] = e1;
    state[bp.id(n::err(2))] = e2;
  };
  set(0.01, 0.02);
  CHECK(judge(bp, j, state));
  set(0.3, 0.0);
  CHECK_FALSE(judge(bp, j, state));
  set(0.1, 0.0);
  CHECK_FALSE(judge(bp, j, state));
}

TEST_CASE("monomial counts and product tree layout") {
  auto ms = enumerate_monomials(2);
  // Per slot: 6 hidden entries x 4 signs, 3 output entries x 2 signs.
  CHECK(ms.size() == 2 * (6 * 4 + 3 * 2));
  auto tree = product_tree(7);
  REQUIRE(tree.size() == 3);
  CHECK(tree[0].pairs.size() == 4);
  CHECK(tree[0].pairs[3] == std::pair<int, int>{6, -1});
  CHECK(tree[1].pairs == std::vector<std::pair<int, int>>{{0, 1}, {2, 3}});
  CHECK(tree[2].pairs == std::vector<std::pair<int, int>>{{0, 1}});
  CHECK(product_tree(1).empty());
}

TEST_CASE("a single hidden monomial multiplies its seven factors") {
  auto grad = build_learning({4, 1}, 0.5)[0];
  Values init{{n::err_rail(1, 1), 0.5}, {n::p_copy(1, 1), 0.5},    {n::y_copy(1), 0.5}, {n::one_minus_y(1), 0.5},
              {n::one_minus_p(1, 1), 0.5}, {n::weight(1, 3, 1), 1.0}, {n::input(1, 1), 1.0}};
  auto end = run_module(grad.crn, init, 100.0, tight());
  CHECK(at(end, tree_species("1,1,1,++", 0, 0, true)) == doctest::Approx(0.03125).epsilon(1e-9));
  CHECK(at(end, n::partial(1, 1, 1)) == doctest::Approx(0.03125).epsilon(1e-9));
  CHECK(std::abs(at(end, n::partial(-1, 1, 1))) < 1e-12);
}

TEST_CASE("learn-grad matches the reference rail partials") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto grad = build_learning({4, 2}, 0.5)[0];
  for (int trial = 0; trial < 5; ++trial) {
    DualRailMatrices rails;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        rails.pos[i][j] = 2 * u(rng);
        rails.neg[i][j] = 2 * u(rng);
      }
    BatchView batch;
    for (int l = 0; l < 2; ++l) {
      batch.xi.push_back({u(rng), u(rng), 1.0});
      batch.delta.push_back(u(rng) < 0.5 ? 0.0 : 1.0);
    }
    auto f = feedforward(rails.value(), batch);
    Values init;
    for (int l = 1; l <= 2; ++l) {
      double e = batch.delta[l - 1] - f.y[l - 1];
      init[n::err_rail(1, l)] = std::max(0.0, e);
      init[n::err_rail(-1, l)] = std::max(0.0, -e);
      init[n::y_copy(l)] = f.y[l - 1];
      init[n::one_minus_y(l)] = 1 - f.y[l - 1];
      for (int i = 1; i <= 2; ++i) {
        init[n::p_copy(i, l)] = f.Upsilon[l - 1][i - 1];
        init[n::one_minus_p(i, l)] = 1 - f.Upsilon[l - 1][i - 1];
        init[n::input(i, l)] = batch.xi[l - 1][i - 1];
      }
    }
    for (int s : {1, -1})
      for (int c = 1; c <= 3; ++c) init[n::weight(s, 3, c)] = s > 0 ? rails.pos[2][c - 1] : rails.neg[2][c - 1];
    auto end = run_module(grad.crn, init, 100.0, tight());
    auto par = rail_partials(rails, batch);
    for (int r = 1; r <= 3; ++r)
      for (int c = 1; c <= 3; ++c) {
        CHECK(std::abs(at(end, n::partial(1, r, c)) - par.pos[r - 1][c - 1]) < 1e-4);
        CHECK(std::abs(at(end, n::partial(-1, r, c)) - par.neg[r - 1][c - 1]) < 1e-4);
      }
  }
}

TEST_CASE("learn-update adds eta times the partials to the snapshot") {
  auto upd = build_learning({4, 1}, 0.5)[1];
  Values init{{n::snapshot(1, 2, 3), 0.4}, {n::weight(1, 2, 3), 0.4}, {n::partial(1, 2, 3), 0.3},
              {n::snapshot(-1, 1, 1), 0.2}, {n::weight(-1, 1, 1), 0.2}};
  auto end = run_module(upd.crn, init, 100.0, tight());
  CHECK(at(end, n::weight(1, 2, 3)) == doctest::Approx(0.55).epsilon(1e-9));
  CHECK(at(end, n::weight(-1, 1, 1)) == doctest::Approx(0.2).epsilon(1e-9));  // zero gradient
}

TEST_CASE("clear-out decays intermediates and restores indicators") {
  auto m = build_clearout({4, 1});
  Values init{{n::y_copy(1), 0.8}, {n::y_ind(1), 0.3}, {n::net(1, 3, 1), 0.8}};
  auto end = run_module(m.crn, init, 30.0, tight());
  CHECK(at(end, n::y_copy(1)) < 1e-12);
  CHECK(at(end, n::y_ind(1)) == doctest::Approx(1.0 - 0.7 * std::exp(-30.0)).epsilon(1e-9));
  CHECK(at(end, n::p_ind(1, 1)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("initial state seeds data, batch-1 selectors, indicators and weights") {
  auto bp = or_blueprint(2);
  const auto& x = bp.initial_state;
  CHECK(x[bp.id(n::order(1, 1))] == 1.0);
  CHECK(x[bp.id(n::order(2, 2))] == 1.0);
  CHECK(x[bp.id(n::order(1, 3))] == 0.0);
  CHECK(x[bp.id(n::sample(3, 2))] == 1.0);
  CHECK(x[bp.id(n::y_ind(2))] == 1.0);
  auto w = default_initial_weights(42);
  CHECK(x[bp.id(n::weight(1, 2, 3))] == w.pos[1][2]);
  CHECK(x[bp.id(n::snapshot(1, 2, 3))] == w.pos[1][2]);
}
