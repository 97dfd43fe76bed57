#include <doctest.h>

#include <cmath>

#include "plapd/nonlinearity.hpp"

using namespace plapd;
namespace nl = plapd::nonlinearities;

TEST_CASE("critical exponents") {
  auto e = critical_exponents(2, 3);
  CHECK(*e.p_star == doctest::Approx(6));
  CHECK(*e.p_lower == doctest::Approx(4));
  CHECK(*e.p_star_conj == doctest::Approx(1.2));
  CHECK(e.p_conj == doctest::Approx(2));
  CHECK(1 / *e.p_star + 1 / *e.p_star_conj == doctest::Approx(1));
  CHECK_FALSE(critical_exponents(3, 3).p_star);
  auto f = critical_exponents(1.5, 3);
  CHECK(*f.p_star == doctest::Approx(3));
  CHECK(f.p_conj == doctest::Approx(3));
  CHECK_THROWS_AS(critical_exponents(1.0, 3), Error);
}

TEST_CASE("quadrature primitive matches closed forms") {
  for (double q : {0.0, 0.5, 1.0, 3.0, 5.0}) {
    auto f = nl::power(q);
    CHECK(f.primitive(0) == 0);
    for (double s : {1e-3, 0.3, 1.0, 7.5, 42.0, 100.0})
      CHECK(f.primitive_by_quadrature(s) == doctest::Approx(f.primitive(s)).epsilon(1e-10));
  }
  // F' = f for a primitive without closed form
  auto g = nl::log_critical(2, 3, 3);
  for (double s : {0.5, 3.0, 50.0}) {
    const double d = 1e-5 * s;
    const double fd = (g.primitive(s + d) - g.primitive(s - d)) / (2 * d);
    CHECK(fd == doctest::Approx(g(s)).epsilon(1e-8));
  }
}

TEST_CASE("weight is positive and nonincreasing") {
  auto g = nl::log_critical(2, 3, 3);
  double prev = g.weight(1.0);
  for (double s = 2; s < 1e18; s *= 2) {
    CHECK(g.weight(s) > 0);
    CHECK(g.weight(s) <= prev);
    prev = g.weight(s);
  }
}

TEST_CASE("parse") {
  auto f = nl::parse("power:q=3", 2, 2);
  CHECK(f(2.0) == doctest::Approx(8));
  auto g = nl::parse("power:q=3,shift=1.5", 2, 2);
  CHECK(g(2.0) == doctest::Approx(9.5));
  CHECK(g.primitive(2.0) == doctest::Approx(4 + 3));
  CHECK_THROWS_AS(nl::parse("nope", 2, 2), Error);
  CHECK_THROWS_AS(nl::parse("power", 2, 2), Error);
  CHECK_THROWS_AS(nl::parse("power:q", 2, 2), Error);
}

TEST_CASE("Lambda estimate") {
  CHECK(estimate_Lambda(nl::power(3), 2).value == 0);
  auto f = nl::custom("cubic-minus-linear", [](double s) { return s * s * s - s; });
  auto est = estimate_Lambda(f, 2);
  CHECK(est.verdict == Verdict::holds);
  CHECK(est.value >= 1.0);
  CHECK(est.value <= 1.1 + 1e-9);
  CHECK_THROWS_AS(estimate_Lambda(nl::constant(-1), 2), Error);
}

TEST_CASE("H0") {
  const double l1 = 5.78;
  CHECK(check_H0(nl::power(3), 2, l1).verdict == Verdict::holds);
  CHECK(check_H0(nl::homogeneous(10, 2), 2, l1).verdict == Verdict::fails);
  CHECK(check_H0(nl::homogeneous(l1, 2), 2, l1).verdict == Verdict::fails);
}

TEST_CASE("H1") {
  CHECK(check_H1(nl::power(3), 2).verdict == Verdict::holds);
  CHECK(check_H1(nl::constant(-1), 2).verdict == Verdict::fails);
  CHECK(check_H1(nl::power(0.5), 2).verdict == Verdict::fails);
  // p > 2 needs f > 0 away from 0
  CHECK(check_H1(nl::custom("s2-s", [](double s) { return s * s - s; }), 3).verdict == Verdict::fails);
}

TEST_CASE("H2") {
  auto r = check_H2(nl::power(3), 2);
  CHECK(r.result.verdict == Verdict::holds);
  CHECK(*r.tau == 1.0);
  // ratio s^3/s^2 = s, so the tail minimum is the first tail sample 2^30
  CHECK(*r.C1 == doctest::Approx(std::ldexp(1.0, 30)));
  CHECK(check_H2(nl::power(1), 2).result.verdict == Verdict::fails);
  CHECK(check_H2(nl::power(2), 3).result.verdict == Verdict::fails);
  auto ex = check_H2(nl::log_critical(2, 3, 3), 2);
  CHECK(ex.result.verdict == Verdict::holds);
  CHECK(*ex.tau <= 4.0);
}

TEST_CASE("H3 family") {
  for (double q : {1.5, 3.0, 5.0}) {
    auto r = check_H3(nl::power(q));
    CHECK(r.verdict == Verdict::holds);
    CHECK(*r.constant == doctest::Approx(1 / (q + 1)).epsilon(1e-10));
  }
  CHECK(check_H3p(nl::critical_power(2, 3), 2, 3).verdict == Verdict::fails);
  CHECK(check_H3p(nl::power(3), 2, 3).verdict == Verdict::holds);

  auto ex = nl::log_critical(2, 3, 3);
  auto pp = check_H3pp(ex, 2, 3);
  CHECK(pp.verdict == Verdict::holds);
  CHECK(std::abs(*pp.constant - 0.5) <= 0.05);
  // without the weight the ratio decays logarithmically
  CHECK(check_H3p(ex, 2, 3).verdict == Verdict::fails);

  CHECK(check_H3(nl::constant(-1)).verdict == Verdict::inconclusive);
}

TEST_CASE("H3'' with unit weight agrees with H3'") {
  const std::vector<Nonlinearity> lib = {nl::power(3), nl::power(5), nl::perturbed_power(2),
                                         nl::log_critical(2, 3, 3), nl::linear_at_zero(3, 1, 2),
                                         nl::critical_power(2, 3), nl::constant(1)};
  for (const auto& f : lib) {
    CAPTURE(f.name());
    CHECK(check_H3pp(f, 2, 3, [](double) { return 1.0; }).verdict == check_H3p(f, 2, 3).verdict);
  }
}

TEST_CASE("H4 family") {
  auto h4 = check_H4(nl::power(3));
  CHECK(h4.verdict == Verdict::holds);
  CHECK(*h4.constant == 3.0);
  CHECK(check_H4p(nl::power(6 - 1 - 0.1), 2, 3).verdict == Verdict::holds);
  CHECK(check_H4p(nl::critical_power(2, 3), 2, 3).verdict == Verdict::fails);
  CHECK(check_H4pp(nl::log_critical(2, 3, 3), 2, 3).verdict == Verdict::holds);
  // alpha below p/(N-p): the weighted ratio grows
  CHECK(check_H4pp(nl::log_critical(2, 3, 1), 2, 3).verdict == Verdict::fails);
}

TEST_CASE("H5") {
  auto r = check_H5(nl::power(3));
  CHECK(r.result.verdict == Verdict::holds);
  CHECK(*r.C4 == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(*r.C5 == doctest::Approx(1.0).epsilon(1e-12));

  auto osc = check_H5(nl::perturbed_power(2));
  CHECK(osc.result.verdict == Verdict::holds);
  CHECK(*osc.C4 >= 0.25 / 3 - 1e-12);

  CHECK(check_H5(nl::log_critical(2, 3, 3)).result.verdict == Verdict::holds);
}

TEST_CASE("classification is deterministic and carries witnesses") {
  auto f = nl::log_critical(2, 3, 3);
  auto a = classify(f, 2, 3, 9.87);
  auto b = classify(f, 2, 3, 9.87);
  CHECK(a.h3pp.constant == b.h3pp.constant);
  CHECK(a.h4pp.verdict == Verdict::holds);
  for (const auto* c : {&a.h0, &a.h1, &a.h2, &a.h3, &a.h4, &a.h3p, &a.h4p, &a.h3pp, &a.h4pp, &a.h5}) {
    if (c->verdict == Verdict::holds) CHECK(c->constant.has_value());
    if (c->verdict == Verdict::fails) CHECK(c->witness.has_value());
  }
  auto crit = classify(nl::critical_power(2, 3), 2, 3);
  CHECK(crit.h3p.verdict == Verdict::fails);
  CHECK(crit.h4p.verdict == Verdict::fails);
  CHECK(crit.h0.verdict == Verdict::inconclusive);
}
