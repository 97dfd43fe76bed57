#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "plapd/error.hpp"
#include "plapd/fem.hpp"
#include "plapd/identities.hpp"

using namespace plapd;

namespace {

// Closed-form radial torsion on the unit ball of R^N, written out here
// rather than taken from the library.
double torsion(double p, int N, double r) {
  const double q = p / (p - 1);
  return (p - 1) / p * std::pow(1.0 / N, 1 / (p - 1)) * (1 - std::pow(r, q));
}

double torsion_error(double p, double h) {
  auto mesh = mesh_disc(1.0, h);
  const auto rep = inner_solve(InnerProblem::with_load(mesh, p, [](const Point&) { return 1.0; }));
  REQUIRE(rep.converged);
  double err = 0;
  for (int i = 0; i < mesh->num_nodes(); ++i)
    err = std::max(err, std::abs(rep.solution.values[i] - torsion(p, 2, mesh->nodes()[i].norm())));
  return err / torsion(p, 2, 0.0);
}

MeshPtr two_triangle_square() {
  std::vector<Point> nodes = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  return std::make_shared<const Mesh>(Domain::polygon(unit_square()), nodes,
                                      std::vector<std::array<int, 3>>{{0, 1, 2}, {0, 2, 3}},
                                      std::vector<std::uint8_t>{1, 1, 1, 1});
}

}  // namespace

TEST_CASE("energy of the zero function vanishes") {
  auto mesh = mesh_disc(1.0, 0.2);
  for (double p : {1.5, 2.0, 3.0}) {
    auto prob = InnerProblem::with_load(mesh, p, [](const Point& x) { return 1 + x.x(); }, 0.5);
    CHECK(energy(FeFunction::zero(mesh), prob, 0.0) == 0.0);
    CHECK(energy(FeFunction::zero(mesh), prob, 0.1) == 0.0);
  }
}

TEST_CASE("energy matches hand assembly on two triangles") {
  auto mesh = two_triangle_square();
  InnerProblem prob;
  prob.mesh = mesh;
  prob.p = 2;
  prob.load = Eigen::VectorXd::Ones(4);
  // v = (0, 1, 0, 2): gradients (1,-1) and (-2,2); lumped masses 1/3, 1/6, 1/3, 1/6
  FeFunction v(mesh, Eigen::Vector4d(0, 1, 0, 2));
  const double dirichlet = 0.5 * (2.0 + 8.0) / 2;
  const double load = 1.0 / 6 + 2.0 / 6;
  CHECK(energy(v, prob, 0.0) == doctest::Approx(dirichlet - load).epsilon(1e-14));
}

TEST_CASE("energy is p-homogeneous without load") {
  auto mesh = mesh_disc(1.0, 0.2);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(0, 1);
  for (double p : {1.5, 2.0, 3.0}) {
    InnerProblem prob;
    prob.mesh = mesh;
    prob.p = p;
    prob.load = Eigen::VectorXd::Zero(mesh->num_nodes());
    FeFunction v(mesh, Eigen::VectorXd::NullaryExpr(mesh->num_nodes(), [&] { return U(rng); }));
    v.apply_dirichlet_zero();
    const double s = 2.5;
    FeFunction sv(mesh, s * v.values);
    CHECK(energy(sv, prob, 0.0) == doctest::Approx(std::pow(s, p) * energy(v, prob, 0.0)).epsilon(1e-12));
  }
}

TEST_CASE("energy gradient matches central differences") {
  auto mesh = mesh_disc(1.0, 0.25);
  std::mt19937 rng(11);
  std::normal_distribution<double> G;
  for (double p : {1.5, 2.0, 3.0}) {
    auto prob = InnerProblem::with_load(mesh, p, [](const Point& x) { return 1 + x.y(); }, 0.7);
    const double eps = 0.05;
    FeFunction v(mesh, Eigen::VectorXd::NullaryExpr(mesh->num_nodes(), [&] { return 0.3 + 0.1 * G(rng); }));
    v.apply_dirichlet_zero();
    const Eigen::VectorXd g = energy_gradient(v, prob, eps);
    for (int k = 0; k < 20; ++k) {
      Eigen::VectorXd d = Eigen::VectorXd::NullaryExpr(mesh->num_nodes(), [&] { return G(rng); });
      d /= d.norm();
      const double step = 1e-5;
      FeFunction a(mesh, v.values + step * d), b(mesh, v.values - step * d);
      const double fd = (energy(a, prob, eps) - energy(b, prob, eps)) / (2 * step);
      const double an = g.dot(d);
      CHECK(std::abs(fd - an) <= 1e-5 * std::max(std::abs(an), g.norm()));
    }
  }
}

TEST_CASE("zero load gives the zero solution") {
  auto mesh = mesh_disc(1.0, 0.1);
  for (double p : {1.5, 2.0, 3.0}) {
    const auto rep = InnerSolver(mesh, p).solve(Eigen::VectorXd::Zero(mesh->num_nodes()));
    CHECK(rep.converged);
    CHECK(rep.solution.sup_norm() == 0.0);
  }
}

TEST_CASE("torsion converges to the closed form") {
  for (double p : {1.5, 2.0, 3.0}) {
    CAPTURE(p);
    const double coarse = torsion_error(p, 0.1);
    const double fine = torsion_error(p, 0.05);
    CHECK(fine <= 0.05);
    CHECK(coarse / fine >= 1.5);
  }
}

TEST_CASE("solution map is homogeneous of degree 1/(p-1)") {
  auto mesh = mesh_disc(1.0, 0.05);
  for (double p : {1.5, 3.0}) {
    CAPTURE(p);
    const InnerSolver solver(mesh, p);
    const Eigen::VectorXd g = random_smooth_load(*mesh, 5);
    const auto v1 = solver.solve(g);
    const auto v7 = solver.solve(7 * g);
    REQUIRE(v1.converged);
    REQUIRE(v7.converged);
    const Eigen::VectorXd scaled = std::pow(7.0, 1 / (p - 1)) * v1.solution.values;
    CHECK((v7.solution.values - scaled).cwiseAbs().maxCoeff() <= 1e-6 * scaled.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("iteration budget exhaustion is reported, not hidden") {
  auto mesh = mesh_disc(1.0, 0.1);
  SolverSettings s;
  s.max_iter = 1;
  const auto rep = InnerSolver(mesh, 3.0, 0.0, s).solve(Eigen::VectorXd::Ones(mesh->num_nodes()));
  CHECK_FALSE(rep.converged);
  CHECK(rep.gradient_norm > rep.threshold);
  CHECK_FALSE(rep.message.empty());
}

TEST_CASE("invalid inner problems are rejected") {
  auto mesh = mesh_disc(1.0, 0.2);
  CHECK_THROWS_AS(InnerSolver(mesh, 1.0), Error);
  CHECK_THROWS_AS(InnerSolver(mesh, 2.0, -1.0), Error);
  SolverSettings s;
  s.tol = 0;
  CHECK_THROWS_AS(InnerSolver(mesh, 2.0, 0.0, s), Error);
  CHECK_THROWS_AS(InnerSolver(mesh, 2.0).solve(Eigen::VectorXd::Ones(3)), Error);
}

TEST_CASE("gradient Lp norm") {
  auto mesh = mesh_polygon(unit_square(), 0.2);
  CHECK(gradient_lp_norm(FeFunction::zero(mesh), 2.0) == 0.0);
  Eigen::VectorXd x(mesh->num_nodes());
  for (int i = 0; i < mesh->num_nodes(); ++i) x[i] = mesh->nodes()[i].x();
  for (double s : {1.0, 1.5, 2.0, 4.0})
    CHECK(gradient_lp_norm(FeFunction(mesh, x), s) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(gradient_lp_norm(FeFunction(mesh, x), 0.5), Error);

  // torsion (p = 2): int |grad u|^2 = int u = pi / 8
  auto disc = mesh_disc(1.0, 0.05);
  const auto rep = InnerSolver(disc, 2.0).solve(Eigen::VectorXd::Ones(disc->num_nodes()));
  CHECK(gradient_lp_norm(rep.solution, 2.0) == doctest::Approx(std::sqrt(std::numbers::pi / 8)).epsilon(0.02));
}

TEST_CASE("regularity exponent") {
  auto a = regularity_exponent(2, 3, 2);
  CHECK(a.r == doctest::Approx(6));
  CHECK(a.exceeds_N);
  auto b = regularity_exponent(2, 3, 1.4);
  CHECK(b.r == doctest::Approx(2.625));
  CHECK_FALSE(b.exceeds_N);
  auto c = regularity_exponent(3, 3, 1.5);
  CHECK(c.r == doctest::Approx(6));
  CHECK(c.exceeds_N);
  CHECK_THROWS_AS(regularity_exponent(2, 3, 3), Error);
  CHECK_THROWS_AS(regularity_exponent(2, 3, 0.5), Error);
}
