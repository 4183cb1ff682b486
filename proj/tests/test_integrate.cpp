#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bfcnn/crn.hpp"
#include "bfcnn/error_lab.hpp"
#include "bfcnn/integrate.hpp"

using namespace bfcnn;

TEST_CASE("relaxation 0 -> A, A -> 0 matches a + (x0 - a) e^-t") {
  Crn c = CrnBuilder().add({}, {"A"}, 2.0).add({"A"}, {}, 1.0).build();
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-11;
  cfg.abs_tol = 1e-13;
  for (double t : {0.5, 1.0, 5.0, 30.0}) {
    double x = integrate_endpoint(c, {0.0}, t, cfg)[0];
    CHECK(x == doctest::Approx(2.0 - 2.0 * std::exp(-t)).epsilon(1e-9));
  }
  CHECK(integrate_endpoint(c, {0.0}, 1.0)[0] == doctest::Approx(1.264241).epsilon(1e-6));
}

TEST_CASE("annihilation keeps x - y constant") {
  Crn c = CrnBuilder().add({"X", "Y"}, {}, 1.0).build();
  IntegratorConfig cfg;
  auto tr = integrate(c, {2.0, 1.0}, 20.0, cfg);
  for (const auto& s : tr.states) CHECK(std::abs((s[0] - s[1]) - 1.0) < 1e-9);
  CHECK(tr.endpoint[0] == doctest::Approx(closed_form_oracle(OracleKind::Annihilation, {2, 1}, 20)).epsilon(1e-8));
}

TEST_CASE("dense output has the requested uniform samples") {
  Crn c = CrnBuilder().add({"A"}, {}, 1.0).build();
  IntegratorConfig cfg;
  cfg.dense_samples = 11;
  auto tr = integrate(c, {1.0}, 2.0, cfg);
  REQUIRE(tr.times.size() == 11);
  CHECK(tr.times.front() == 0.0);
  CHECK(tr.times.back() == 2.0);
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    CHECK(tr.states[i][0] == doctest::Approx(std::exp(-tr.times[i])).epsilon(1e-7));
  CHECK(tr.states.back() == tr.endpoint);
}

TEST_CASE("without dense output only the two ends are kept") {
  Crn c = CrnBuilder().add({"A"}, {}, 1.0).build();
  auto tr = integrate(c, {1.0}, 3.0);
  CHECK(tr.times == std::vector<double>{0.0, 3.0});
  CHECK(tr.accepted_steps > 0);
}

TEST_CASE("zero duration is rejected; the scheduler skips empty phases itself") {
  Crn c = CrnBuilder().add({"A"}, {}, 1.0).build();
  CHECK_THROWS_AS(integrate_endpoint(c, {0.7}, 0.0), std::invalid_argument);
}

TEST_CASE("bad inputs are rejected") {
  Crn c = CrnBuilder().add({"A"}, {}, 1.0).build();
  CHECK_THROWS(integrate(c, {-0.5}, 1.0));
  CHECK_THROWS(integrate(c, {1.0}, -1.0));
  IntegratorConfig tight;
  tight.max_steps = 3;
  tight.max_step = 0.01;
  CHECK_THROWS_AS(integrate(c, {1.0}, 1.0, tight), IntegrationFailure);
}

TEST_CASE("species order does not change the endpoint") {
  Crn a = CrnBuilder().add({"X", "Y"}, {"Z"}, 1.3).add({"Z"}, {"X"}, 0.4).build();
  Crn b = CrnBuilder().add({"Z"}, {"X"}, 0.4).add({"Y", "X"}, {"Z"}, 1.3).build();
  auto ea = integrate_endpoint(a, {1.0, 0.5, 0.2}, 7.0);
  ConcentrationState xb(3);
  xb[b.id("X")] = 1.0;
  xb[b.id("Y")] = 0.5;
  xb[b.id("Z")] = 0.2;
  auto eb = integrate_endpoint(b, xb, 7.0);
  for (const char* s : {"X", "Y", "Z"}) CHECK(ea[a.id(s)] == eb[b.id(s)]);
}

TEST_CASE("parallel right-hand side gives the same trajectory") {
  Crn c = CrnBuilder().add({"A", "B"}, {"C"}, 1.0).add({"C"}, {"A"}, 0.5).add({}, {"B"}, 0.3).build();
  IntegratorConfig s, p;
  p.parallel_rhs = true;
  auto es = integrate_endpoint(c, {1.0, 1.0, 0.0}, 10.0, s);
  auto ep = integrate_endpoint(c, {1.0, 1.0, 0.0}, 10.0, p);
  CHECK(es == ep);
}

TEST_CASE("integrate_rhs handles a non-chemical system") {
  // Harmonic oscillator; energy is conserved to tolerance.
  Rhs f = [](std::span<const double> x, std::span<double> d) {
    d[0] = x[1];
    d[1] = -x[0];
  };
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-12;
  auto tr = integrate_rhs(f, {1.0, 0.0}, 2 * M_PI, cfg, false);
  CHECK(tr.endpoint[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(tr.endpoint[1]) < 1e-8);
}

TEST_CASE("trajectory CSV quotes species names with commas") {
  Crn c = CrnBuilder().add({"N+_1,2"}, {}, 1.0).build();
  IntegratorConfig cfg;
  cfg.dense_samples = 2;
  std::ostringstream out;
  write_trajectory_csv(out, c, integrate(c, {1.0}, 1.0, cfg));
  CHECK(out.str().rfind("t,\"N+_1,2\"\n0,1\n", 0) == 0);
}
