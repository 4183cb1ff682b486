#include <doctest.h>

#include <random>

#include "bfcnn/crn.hpp"
#include "bfcnn/errors.hpp"

using namespace bfcnn;

TEST_CASE("derivative of A + B -> C") {
  Crn c = CrnBuilder().add({"A", "B"}, {"C"}, 2.0).build();
  auto d = derivative(c, std::vector<double>{1.0, 3.0, 0.0});
  CHECK(d[c.id("A")] == doctest::Approx(-6.0));
  CHECK(d[c.id("B")] == doctest::Approx(-6.0));
  CHECK(d[c.id("C")] == doctest::Approx(6.0));
}

TEST_CASE("stoichiometric coefficients enter the rate as powers") {
  Crn c = CrnBuilder().add({"A", "A"}, {"B"}, 1.0).build();
  auto d = derivative(c, std::vector<double>{3.0, 0.0});
  CHECK(d[0] == doctest::Approx(-18.0));
  CHECK(d[1] == doctest::Approx(9.0));
  auto g = stoichiometric_matrix(c);
  CHECK(g[0][0] == -2);
  CHECK(g[1][0] == 1);
}

TEST_CASE("catalysts cancel out of the net change") {
  Crn c = CrnBuilder().add({"W", "S"}, {"W", "S", "N"}, 1.0).build();
  auto w = c.written_species();
  REQUIRE(w.size() == 1);
  CHECK(c.name(w[0]) == "N");
}

TEST_CASE("slightly negative reads are clamped, larger ones rejected") {
  Crn c = CrnBuilder().add({"A"}, {}, 1.0).build();
  CHECK(derivative(c, std::vector<double>{-1e-13})[0] == 0.0);
  CHECK_THROWS_AS(validate_state(c, std::vector<double>{-1e-6}), StructuralError);
  CHECK_THROWS_AS(validate_state(c, std::vector<double>{1.0, 2.0}), StructuralError);
  CHECK_THROWS_AS(derivative(c, std::vector<double>{1.0, 2.0}), StructuralError);
}

TEST_CASE("builder rejects bad rates and empty reactions") {
  CrnBuilder b;
  CHECK_THROWS_AS(b.add({"A"}, {}, 0.0), StructuralError);
  CHECK_THROWS_AS(b.add({"A"}, {}, -1.0), StructuralError);
  CHECK_THROWS_AS(b.add({}, {}, 1.0), StructuralError);
}

TEST_CASE("text round trip") {
  const char* text =
      "# two reactions\n"
      "A + 2 B -> C ; k=1.5\n"
      "0 -> A ; k=0.25\n";
  Crn c = parse_crn_text(text);
  CHECK(c.size() == 3);
  CHECK(c.reaction_count() == 2);
  Crn again = parse_crn_text(to_text(c));
  CHECK(to_text(again) == to_text(c));
  auto d = derivative(c, std::vector<double>{1.0, 2.0, 0.0});
  CHECK(d[c.id("A")] == doctest::Approx(-6.0 + 0.25));
  CHECK(d[c.id("B")] == doctest::Approx(-12.0));
}

TEST_CASE("parse errors carry the line number") {
  try {
    parse_crn_text("A -> B ; k=1\nA -> ; k=1\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
  CHECK_THROWS_AS(parse_crn_text("A -> B\n"), ParseError);
  CHECK_THROWS_AS(parse_crn_text("A -> B ; k=-1\n"), ParseError);
  CHECK_THROWS_AS(parse_crn_text("A => B ; k=1\n"), ParseError);
}

TEST_CASE("compose shares mapped names and rejects clashes") {
  Crn a = CrnBuilder().add({"X"}, {"Y"}, 1.0).build();
  Crn b = CrnBuilder().add({"U"}, {"V"}, 2.0).build();
  auto c = compose(a, b, {{"U", "Y"}});
  CHECK(c.crn.size() == 3);
  CHECK(c.crn.reaction_count() == 2);
  CHECK(c.b_ids[b.id("U")] == c.a_ids[a.id("Y")]);

  CHECK_THROWS_AS(compose(a, b, {{"Q", "Y"}}), StructuralError);
  CHECK_THROWS_AS(compose(a, b, {{"U", "Q"}}), StructuralError);
  Crn clash = CrnBuilder().add({"X"}, {}, 1.0).build();
  CHECK_THROWS_AS(compose(a, clash), StructuralError);
  Crn two = CrnBuilder().add({"U", "V"}, {}, 1.0).build();
  CHECK_THROWS_AS(compose(a, two, {{"U", "Y"}, {"V", "Y"}}), StructuralError);
}

TEST_CASE("parallel derivative is bit-identical to the serial loop") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pick(0, 59);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  CrnBuilder b;
  for (int s = 0; s < 60; ++s) b.species("S" + std::to_string(s));
  for (int r = 0; r < 400; ++r) {
    std::vector<std::string> lhs, rhs;
    int nl = 1 + pick(rng) % 3, nr = pick(rng) % 4;
    for (int i = 0; i < nl; ++i) lhs.push_back("S" + std::to_string(pick(rng)));
    for (int i = 0; i < nr; ++i) rhs.push_back("S" + std::to_string(pick(rng)));
    b.add(lhs, rhs, u(rng));
  }
  Crn c = b.build();
  ParallelDerivative par(c);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(c.size());
    for (auto& v : x) v = u(rng);
    auto serial = derivative(c, x);
    auto parallel = par(x);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i] == parallel[i]);
  }
}
