#include <doctest.h>

#include <cmath>

#include "plapd/error.hpp"
#include "plapd/existence.hpp"
#include "plapd/identities.hpp"
#include "plapd/radial.hpp"

using namespace plapd;
namespace nl = plapd::nonlinearities;

TEST_CASE("operator K on simple inputs") {
  auto mesh = mesh_disc(1.0, 0.05);
  const auto zero = FeFunction::zero(mesh);
  const auto k0 = operator_K(zero, nl::power(3), 2, 0, 0, 0);
  REQUIRE(k0.converged);
  CHECK(k0.solution.sup_norm() == 0.0);

  const auto torsion = InnerSolver(mesh, 2).solve(Eigen::VectorXd::Ones(mesh->num_nodes()));
  const auto k1 = operator_K(zero, nl::constant(1.0), 2, 0, 0, 0);
  CHECK((k1.solution.values - torsion.solution.values).cwiseAbs().maxCoeff() <= 1e-10);

  const auto eig = first_eigenpair(2, mesh);
  const auto ke = operator_K(eig.phi, nl::homogeneous(eig.lambda, 2), 2, 0, 0, 0);
  CHECK((ke.solution.values - eig.phi.values).cwiseAbs().maxCoeff() <= 1e-6 * eig.phi.sup_norm());

  // K(0) at parameter t scales like the torsion function
  for (double p : {1.5, 3.0}) {
    const auto tor = InnerSolver(mesh, p).solve(Eigen::VectorXd::Ones(mesh->num_nodes())).solution.sup_norm();
    const auto k = operator_K(zero, nl::power(3), p, 0, 0.5, 8.0);
    CHECK(k.solution.sup_norm() == doctest::Approx(std::pow(4.0, 1 / (p - 1)) * tor).epsilon(1e-6));
  }

  FeFunction neg(mesh, -Eigen::VectorXd::Ones(mesh->num_nodes()));
  CHECK_THROWS_AS(operator_K(neg, nl::power(3), 2, 0, 0, 0), Error);
}

TEST_CASE("K preserves the cone") {
  auto mesh = mesh_disc(1.0, 0.1);
  for (std::uint32_t seed = 1; seed <= 5; ++seed) {
    FeFunction u(mesh, random_smooth_load(*mesh, seed));
    u.apply_dirichlet_zero();
    for (double p : {1.5, 2.0, 3.0})
      CHECK(operator_K(u, nl::power(3), p, 0, 1, 0.5).solution.values.minCoeff() >= 0);
  }
}

TEST_CASE("config validation") {
  HomotopyConfig c;
  CHECK_NOTHROW(c.validate());
  c.theta = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.tol = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.t_grid = {};
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.t_grid = {0, 1, 0.5};
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.lambda_grid = {2, 1};
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("cubic problem on the disc matches the radial oracle") {
  auto mesh = mesh_disc(1.0, 0.05);
  const auto f = nl::power(3);
  const auto bp = fixed_point_solve(f, 2, HomotopyConfig{}, mesh, 0.0);
  REQUIRE(bp.converged);
  const auto radial = radial_solve_bvp(2, 2, f, 1.0);
  REQUIRE(radial.found);
  CHECK(bp.sup_norm == doctest::Approx(radial.m).epsilon(0.05));
  CHECK(bp.residual <= HomotopyConfig{}.residual_tol);
  CHECK(hopf_boundary_check(bp.solution).pass);
  CHECK(monotonicity_diagnostic(bp.solution).pass);
  CHECK(energy_identity_residual(bp.solution, f, 2).pass);
  const auto eig = first_eigenpair(2, mesh);
  CHECK(picone_value(bp.solution, f, 2, eig).pass);
  CHECK(boundary_gradient_bound(bp.solution, f, 2, 0.2).pass);

  // a far start either lands on the same solution or says it did not
  FeFunction far = eig.phi;
  far.values *= 100 / far.sup_norm();
  const auto b2 = fixed_point_solve(f, 2, HomotopyConfig{}, mesh, 0.0, &far);
  if (b2.converged)
    CHECK(b2.sup_norm == doctest::Approx(bp.sup_norm).epsilon(1e-4));
  else
    CHECK(b2.status != BranchStatus::converged);

  // determinism
  const auto again = fixed_point_solve(f, 2, HomotopyConfig{}, mesh, 0.0);
  CHECK(again.outer_iterations == bp.outer_iterations);
  CHECK(again.solution.values == bp.solution.values);
}

TEST_CASE("sublinear problem is reported trivial") {
  auto mesh = mesh_disc(1.0, 0.1);
  const auto eig = first_eigenpair(2, mesh);
  const auto bp = fixed_point_solve(nl::homogeneous(eig.lambda / 2, 2), 2, HomotopyConfig{}, mesh, 0.0);
  CHECK_FALSE(bp.converged);
  CHECK(bp.status == BranchStatus::trivial);
}

TEST_CASE("plain picard from a small start collapses for the cubic") {
  auto mesh = mesh_disc(1.0, 0.1);
  HomotopyConfig c;
  c.mode = FixedPointMode::picard;
  const auto bp = fixed_point_solve(nl::power(3), 2, c, mesh, 0.0);
  CHECK(bp.status == BranchStatus::trivial);
}

TEST_CASE("krasnoselskii probe a") {
  auto mesh = mesh_disc(1.0, 0.1);
  const auto eig = first_eigenpair(2, mesh);
  const auto ok = krasnoselskii_probe_a(nl::power(3), 2, 0.01, mesh, {0, 0.25, 0.5, 0.75, 1}, {}, &eig);
  CHECK(ok.verdict == Verdict::holds);
  CHECK(ok.ratio_max < ok.lambda1);
  CHECK_FALSE(ok.near_fixed_point[0]);

  const auto bad = krasnoselskii_probe_a(nl::homogeneous(2 * eig.lambda, 2), 2, 0.01, mesh,
                                         {0, 0.25, 0.5, 0.75, 1}, {}, &eig);
  CHECK(bad.verdict == Verdict::fails);
  CHECK_FALSE(bad.near_fixed_point[0]);
}

TEST_CASE("homotopy branch") {
  auto mesh = mesh_disc(1.0, 0.1);
  const auto f = nl::power(3);
  HomotopyConfig c;
  c.lambda0 = 1.0;
  const auto br = homotopy_branch(f, 2, c, mesh);
  REQUIRE(br.points.size() == c.t_grid.size());
  for (const auto& b : br.points) CHECK(b.converged);
  const auto direct = fixed_point_solve(f, 2, HomotopyConfig{}, mesh, 0.0);
  CHECK(br.points.back().sup_norm == doctest::Approx(direct.sup_norm).epsilon(1e-5));
  CHECK_FALSE(br.threshold_exceeded);

  c.lambda0 = 1e6;
  const auto huge = homotopy_branch(f, 2, c, mesh);
  CHECK(huge.points.front().status == BranchStatus::diverged);
  CHECK(huge.threshold_exceeded);

  c.t_grid = {0.0};
  const auto single = homotopy_branch(f, 2, c, mesh);
  REQUIRE(single.points.size() == 1);
  CHECK(single.points[0].sup_norm == doctest::Approx(direct.sup_norm).epsilon(1e-5));
}

TEST_CASE("lambda threshold") {
  const auto f = nl::power(3);
  HomotopyConfig c;
  c.lambda_grid = {1, 2, 4, 8, 16};
  const auto coarse = estimate_lambda_max(f, 2, mesh_disc(1.0, 0.1), c);
  const auto fine = estimate_lambda_max(f, 2, mesh_disc(1.0, 0.05), c);
  for (const auto* r : {&coarse, &fine}) {
    REQUIRE(r->lambda_hat);
    CHECK(r->evaluations.front().converged);
    CHECK(r->monotone);
    CHECK(*r->lambda_hat > 0);
    CHECK(r->lower < *r->upper);
  }
  CHECK(*coarse.lambda_hat / *fine.lambda_hat < 2);
  CHECK(*fine.lambda_hat / *coarse.lambda_hat < 2);

  // f = 0: lambda^{1/(p-1)} times torsion for every lambda
  const auto none = estimate_lambda_max(nl::constant(0.0), 2, mesh_disc(1.0, 0.1), c);
  CHECK(none.lower_bound_only);
  CHECK_FALSE(none.lambda_hat);

  c.lambda_grid = {1e6};
  const auto wide = estimate_lambda_max(f, 2, mesh_disc(1.0, 0.1), c, 0);
  REQUIRE(wide.upper);
  CHECK(wide.lower == 0.0);
  CHECK(*wide.upper == 1e6);
}

TEST_CASE("alpha sweep") {
  const auto rows = sweep_alpha(2, 3, {0, 2.5, 3, 4}, 1.0);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].alpha == 0);
  CHECK_FALSE(rows[0].found);
  CHECK(rows[0].h4pp == Verdict::fails);
  CHECK(rows[0].message.rfind("no-solution-found", 0) == 0);
  for (int i = 1; i < 4; ++i) {
    CAPTURE(rows[i].alpha);
    CHECK(rows[i].found);
    CHECK(std::isfinite(rows[i].sup_norm));
    CHECK(rows[i].h3pp == Verdict::holds);
    CHECK(rows[i].h4pp == Verdict::holds);
  }
  CHECK_THROWS_AS(sweep_alpha(3, 3, {1}, 1.0), Error);
}
