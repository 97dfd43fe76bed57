#include <doctest.h>

#include <cmath>
#include <numbers>

#include "plapd/error.hpp"
#include "plapd/identities.hpp"
#include "plapd/radial.hpp"

using namespace plapd;
namespace nl = plapd::nonlinearities;

namespace {

constexpr double pi = std::numbers::pi;

FeFunction exact_torsion(MeshPtr mesh) {
  Eigen::VectorXd v(mesh->num_nodes());
  for (int i = 0; i < mesh->num_nodes(); ++i) v[i] = 0.25 * (1 - mesh->nodes()[i].squaredNorm());
  FeFunction u(mesh, v);
  u.apply_dirichlet_zero();
  return u;
}

FeFunction fem_torsion(MeshPtr mesh, double p = 2.0) {
  auto rep = InnerSolver(mesh, p).solve(Eigen::VectorXd::Ones(mesh->num_nodes()));
  REQUIRE(rep.converged);
  return rep.solution;
}

}  // namespace

TEST_CASE("pohozaev on the exact torsion equals pi/4 on both sides") {
  auto mesh = mesh_disc(1.0, 0.05);
  const auto r = pohozaev_residual(exact_torsion(mesh), nl::constant(1.0), 2.0);
  CHECK(r.left == doctest::Approx(pi / 4).epsilon(0.01));
  CHECK(r.right == doctest::Approx(pi / 4).epsilon(0.05));

  RadialProfile prof;
  prof.dimension = 2;
  for (int i = 0; i <= 2000; ++i) {
    prof.r.push_back(i / 2000.0);
    prof.u.push_back(0.25 * (1 - prof.r.back() * prof.r.back()));
  }
  const auto rr = pohozaev_radial(prof, nl::constant(1.0), 2.0);
  CHECK(rr.left == doctest::Approx(pi / 4).epsilon(1e-6));
  CHECK(rr.right == doctest::Approx(pi / 4).epsilon(1e-6));
  CHECK(rr.pass);
}

TEST_CASE("pohozaev of zero is zero") {
  auto mesh = mesh_disc(1.0, 0.2);
  const auto r = pohozaev_residual(FeFunction::zero(mesh), nl::power(3), 2.0);
  CHECK(r.left == 0.0);
  CHECK(r.right == 0.0);
}

TEST_CASE("pohozaev residual of FEM torsion decreases under refinement") {
  for (double p : {1.5, 2.0, 3.0}) {
    CAPTURE(p);
    const auto coarse = pohozaev_residual(fem_torsion(mesh_disc(1.0, 0.1), p), nl::constant(1.0), p);
    const auto fine = pohozaev_residual(fem_torsion(mesh_disc(1.0, 0.05), p), nl::constant(1.0), p);
    CHECK(coarse.relative / fine.relative >= 1.3);
    if (p == 2.0) {
      CHECK(fine.relative <= 0.05);
      CHECK(fine.pass);
    }
  }
  // the reaction-based flux is the sharper of the two
  auto mesh = mesh_disc(1.0, 0.05);
  PohozaevOptions opt;
  opt.flux = BoundaryFlux::variational;
  const auto v = pohozaev_residual(fem_torsion(mesh), nl::constant(1.0), 2.0, opt);
  CHECK(v.relative <= 0.01);
}

TEST_CASE("critical growth makes the pohozaev left side vanish") {
  // candidate from the shooting trajectory, shifted to vanish at R = 1
  ShootOptions so;
  for (int i = 0; i <= 1000; ++i) so.output_radii.push_back(i / 1000.0);
  const auto s = radial_shoot(2, 3, nl::critical_power(2, 3), 1.0, 1.0, so);
  REQUIRE(s.u.size() == 1001);
  RadialProfile prof;
  prof.dimension = 3;
  prof.r = s.r;
  for (double x : s.u) prof.u.push_back(x - s.u.back());
  const auto rep = pohozaev_radial(prof, nl::critical_power(2, 3), 2.0);
  CHECK_FALSE(rep.pass);
  CHECK(rep.right > 0);
  REQUIRE_FALSE(rep.notes.empty());
  CHECK(rep.notes.back().find("critical") != std::string::npos);
}

TEST_CASE("picone value") {
  auto mesh = mesh_disc(1.0, 0.05);
  const auto eig = first_eigenpair(2, mesh);
  REQUIRE(eig.converged);
  const auto eq = picone_value(eig.phi, nl::homogeneous(eig.lambda, 2), 2, eig);
  CHECK(eq.left == doctest::Approx(eig.lambda).epsilon(1e-12));
  CHECK(eq.pass);

  const auto t = picone_value(fem_torsion(mesh), nl::constant(1.0), 2, eig);
  CHECK(std::isfinite(t.left));
  CHECK(t.pass);
  CHECK_THROWS_AS(picone_value(FeFunction::zero(mesh), nl::constant(1.0), 2, eig), Error);
}

TEST_CASE("energy identity") {
  auto small = mesh_disc(1.0, 0.2);
  const auto z = energy_identity_residual(FeFunction::zero(small), nl::power(3), 2);
  CHECK(z.left == 0.0);
  CHECK(z.right == 0.0);
  CHECK(z.pass);

  auto mesh = mesh_disc(1.0, 0.05);
  const auto t = energy_identity_residual(fem_torsion(mesh), nl::constant(1.0), 2);
  CHECK(t.pass);
  CHECK(t.left == doctest::Approx(pi / 8).epsilon(0.02));
  CHECK(t.right == doctest::Approx(pi / 8).epsilon(0.02));
}

TEST_CASE("comparison principle on ordered loads") {
  auto mesh = mesh_disc(1.0, 0.1);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(mesh->num_nodes());
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(mesh->num_nodes());
  CHECK(comparison_check(zero, one, 2, mesh).pass);
  CHECK(comparison_check(one, 2 * one, 3, mesh).pass);
  CHECK_THROWS_AS(comparison_check(one, zero, 2, mesh), Error);
  for (double p : {1.5, 2.0, 3.0})
    for (std::uint32_t seed = 1; seed <= 20; ++seed) {
      CAPTURE(p);
      CAPTURE(seed);
      const Eigen::VectorXd g1 = random_smooth_load(*mesh, seed);
      const Eigen::VectorXd g2 = g1 + random_smooth_load(*mesh, seed + 1000, 0.5);
      CHECK(comparison_check(g1, g2, p, mesh).pass);
    }
  CHECK(random_smooth_load(*mesh, 4) == random_smooth_load(*mesh, 4));
  CHECK(random_smooth_load(*mesh, 4).minCoeff() >= 0);
}

TEST_CASE("hopf boundary check") {
  auto mesh = mesh_disc(1.0, 0.05);
  const auto t = hopf_boundary_check(exact_torsion(mesh));
  CHECK(t.pass);
  CHECK(t.left == doctest::Approx(0.5).epsilon(0.1));
  CHECK_FALSE(hopf_boundary_check(FeFunction::zero(mesh)).pass);
}

TEST_CASE("monotonicity diagnostic") {
  auto mesh = mesh_disc(1.0, 0.05);
  auto u = exact_torsion(mesh);
  MonotonicityOptions opt;
  opt.theta_half_deg = 60;
  CHECK(monotonicity_diagnostic(u, opt).pass);
  CHECK(monotonicity_diagnostic(u).pass);

  // spike at a node next to the boundary
  int spike = -1;
  for (int i : mesh->interior_nodes())
    if (mesh->domain().distance_to_boundary(mesh->nodes()[i]) < 0.06) {
      spike = i;
      break;
    }
  REQUIRE(spike >= 0);
  u.values[spike] = 10 * u.sup_norm();
  CHECK_FALSE(monotonicity_diagnostic(u).pass);

  auto hex = mesh_polygon(regular_polygon(6, 1.0), 0.05);
  CHECK(monotonicity_diagnostic(fem_torsion(hex)).pass);
}

TEST_CASE("boundary gradient bound") {
  auto mesh = mesh_disc(1.0, 0.05);
  const auto u = fem_torsion(mesh);
  CHECK(boundary_gradient_bound(u, nl::constant(1.0), 2, 0.2).pass);
  FeFunction twice(mesh, 2 * u.values);
  CHECK(boundary_gradient_bound(twice, nl::constant(1.0), 2, 0.2).pass);
  CHECK_THROWS_AS(boundary_gradient_bound(u, nl::constant(1.0), 2, 0.0), Error);
}
