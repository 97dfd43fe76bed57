#include "plapd/identities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

#include "plapd/error.hpp"

namespace plapd {

void finish_equality(IdentityReport& r, double floor) {
  r.residual = std::abs(r.left - r.right);
  r.relative = r.residual / std::max({std::abs(r.left), std::abs(r.right), floor});
  r.pass = r.relative <= r.tolerance;
  r.verdict = r.pass ? Verdict::holds : Verdict::fails;
}

namespace {

// edge-midpoint rule, exact for quadratics on each triangle
double element_integral(const FeFunction& u, const std::function<double(double)>& g) {
  const Mesh& mesh = *u.mesh;
  double s = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const double a = u.values[tri[0]], b = u.values[tri[1]], c = u.values[tri[2]];
    s += mesh.area(t) / 3 * (g(0.5 * (a + b)) + g(0.5 * (b + c)) + g(0.5 * (c + a)));
  }
  return s;
}

void require_same_mesh(const FeFunction& a, const FeFunction& b) {
  if (a.mesh != b.mesh && (a.mesh->num_nodes() != b.mesh->num_nodes() ||
                           a.mesh->num_triangles() != b.mesh->num_triangles()))
    throw Error(ErrorKind::invalid_input, "functions live on different meshes");
}

bool edge_touches_corner(const Mesh& mesh, const BoundaryEdge& e) {
  const double tol = 1e-9 * mesh.domain().diameter();
  return mesh.domain().is_corner(mesh.nodes()[e.a], tol) || mesh.domain().is_corner(mesh.nodes()[e.b], tol);
}

double sphere_area(int N) {
  // |S^{N-1}| = 2 pi^{N/2} / Gamma(N/2)
  return 2 * std::pow(std::numbers::pi, N / 2.0) / boost::math::tgamma(N / 2.0);
}

}  // namespace

IdentityReport pohozaev_residual(const FeFunction& u, const Nonlinearity& f, double p, const PohozaevOptions& opt) {
  const Mesh& mesh = *u.mesh;
  const int N = 2;
  IdentityReport r;
  r.name = "pohozaev";
  r.tolerance = opt.tol;
  r.left = N * element_integral(u, [&](double s) { return f.primitive(s); }) -
           (N - p) / p * element_integral(u, [&](double s) { return f(s) * s; });

  const Point c = mesh.domain().centroid();
  double rhs = 0.0;
  int nonpositive = 0;
  if (opt.flux == BoundaryFlux::element) {
    for (const auto& e : mesh.boundary_edges()) {
      const double xn = (e.midpoint - c).dot(e.outward_normal);
      if (xn <= 0) ++nonpositive;
      const double dn = u.gradient(e.triangle).dot(e.outward_normal);
      rhs += std::pow(std::abs(dn), p) * xn * e.length;
    }
    r.notes.push_back("normal derivative from the adjacent element gradient");
  } else {
    InnerProblem prob;
    prob.mesh = u.mesh;
    prob.p = p;
    prob.load = u.values.unaryExpr([&](double s) { return f(s); });
    const Eigen::VectorXd reaction = energy_gradient(u, prob, 0.0);
    std::vector<double> len(mesh.num_nodes(), 0.0);
    std::vector<Point> nrm(mesh.num_nodes(), Point::Zero());
    for (const auto& e : mesh.boundary_edges()) {
      for (int v : {e.a, e.b}) {
        len[v] += 0.5 * e.length;
        nrm[v] += e.length * e.outward_normal;
      }
    }
    for (int i = 0; i < mesh.num_nodes(); ++i) {
      if (!mesh.is_boundary(i) || len[i] == 0) continue;
      const Point n = nrm[i].normalized();
      const double xn = (mesh.nodes()[i] - c).dot(n);
      if (xn <= 0) ++nonpositive;
      const double dn = std::pow(std::abs(reaction[i]) / len[i], 1 / (p - 1));
      rhs += std::pow(dn, p) * xn * len[i];
    }
    r.notes.push_back("normal derivative from the boundary reaction of the discrete equation");
  }
  r.right = (p - 1) / p * rhs;
  if (nonpositive > 0) r.notes.push_back("x.nu <= 0 on " + std::to_string(nonpositive) + " boundary pieces");
  r.details["origin_x"] = c.x();
  r.details["origin_y"] = c.y();
  finish_equality(r);
  return r;
}

IdentityReport pohozaev_radial(const RadialProfile& u, const Nonlinearity& f, double p, double tol) {
  const int N = u.dimension;
  const std::size_t M = u.r.size();
  if (M < 3) throw Error(ErrorKind::invalid_input, "radial profile needs at least 3 points");
  IdentityReport r;
  r.name = "pohozaev-radial";
  r.tolerance = tol;
  const double S = sphere_area(N);
  // trapezoid in r with weight r^{N-1}
  double lhs = 0.0;
  for (std::size_t i = 0; i + 1 < M; ++i) {
    auto g = [&](std::size_t k) {
      const double s = u.u[k];
      return (N * f.primitive(s) - (N - p) / p * f(s) * s) * std::pow(u.r[k], N - 1);
    };
    lhs += 0.5 * (g(i) + g(i + 1)) * (u.r[i + 1] - u.r[i]);
  }
  r.left = S * lhs;
  // second-order one-sided derivative at R
  const double dr = u.r[M - 1] - u.r[M - 2];
  const double du = (3 * u.u[M - 1] - 4 * u.u[M - 2] + u.u[M - 3]) / (2 * dr);
  const double R = u.radius;
  r.right = (p - 1) / p * std::pow(std::abs(du), p) * R * S * std::pow(R, N - 1);
  r.details["du_dr_at_R"] = du;
  finish_equality(r);
  if (!r.pass && std::abs(r.left) <= 1e-12 * std::max(1.0, r.right))
    r.notes.push_back("left side vanishes identically: critical growth obstructs a positive solution");
  return r;
}

IdentityReport picone_value(const FeFunction& u, const Nonlinearity& f, double p, const EigenPair& eig,
                            double tol) {
  require_same_mesh(u, eig.phi);
  const Mesh& mesh = *u.mesh;
  IdentityReport r;
  r.name = "picone";
  r.tolerance = tol;
  const double floor = 1e-12 * u.sup_norm();
  const auto& m = mesh.lumped_mass();
  double value = 0.0;
  int skipped = 0;
  for (int i : mesh.interior_nodes()) {
    const double ui = u.values[i];
    if (!(ui > 0)) throw Error(ErrorKind::invalid_input, "picone_value needs u > 0 at interior nodes");
    if (ui < floor) {
      ++skipped;
      continue;
    }
    value += m[i] * f(ui) * std::pow(std::max(eig.phi.values[i], 0.0), p) / std::pow(ui, p - 1);
  }
  r.left = value;
  r.right = eig.lambda;
  r.residual = std::max(0.0, value - eig.lambda);
  r.relative = r.residual / eig.lambda;
  r.pass = value <= eig.lambda * (1 + tol);
  r.verdict = r.pass ? Verdict::holds : Verdict::fails;
  r.details["nodes_below_floor"] = skipped;
  return r;
}

IdentityReport energy_identity_residual(const FeFunction& u, const Nonlinearity& f, double p, double tol) {
  IdentityReport r;
  r.name = "energy";
  r.tolerance = tol;
  r.left = std::pow(gradient_lp_norm(u, p), p);
  r.right = lumped_integral(u, [&](double s) { return f(s) * s; });
  finish_equality(r);
  return r;
}

IdentityReport comparison_check(const Eigen::VectorXd& g1, const Eigen::VectorXd& g2, double p, MeshPtr mesh,
                                double tol, SolverSettings settings) {
  IdentityReport r;
  r.name = "comparison";
  r.tolerance = tol;
  if (g1.size() != mesh->num_nodes() || g2.size() != mesh->num_nodes())
    throw Error(ErrorKind::invalid_input, "load length differs from node count");
  if ((g2 - g1).minCoeff() < 0) throw Error(ErrorKind::invalid_input, "comparison_check needs g1 <= g2");
  const InnerSolver solver(mesh, p, 0.0, settings);
  const auto a = solver.solve(g1), b = solver.solve(g2);
  if (!a.converged || !b.converged) {
    r.notes.push_back("inner solve did not converge");
    r.verdict = Verdict::inconclusive;
    return r;
  }
  const double scale = std::max(b.solution.sup_norm(), 1e-300);
  const double worst = (a.solution.values - b.solution.values).maxCoeff();
  r.left = worst;
  r.right = tol * scale;
  r.residual = std::max(0.0, worst);
  r.relative = r.residual / scale;
  r.pass = worst <= tol * scale;
  r.verdict = r.pass ? Verdict::holds : Verdict::fails;
  return r;
}

Eigen::VectorXd random_smooth_load(const Mesh& mesh, std::uint32_t seed, double amplitude) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Point c = mesh.domain().centroid();
  const double L = mesh.domain().diameter();
  struct Bump {
    Point x;
    double w, a;
  };
  std::vector<Bump> bumps(4);
  for (auto& b : bumps) b = {c + L * Point(U(gen) - 0.5, U(gen) - 0.5), 0.1 * L + 0.3 * L * U(gen), U(gen)};
  Eigen::VectorXd g(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    double s = 0;
    for (const auto& b : bumps) s += b.a * std::exp(-(mesh.nodes()[i] - b.x).squaredNorm() / (b.w * b.w));
    g[i] = amplitude * s;
  }
  return g;
}

IdentityReport hopf_boundary_check(const FeFunction& u) {
  const Mesh& mesh = *u.mesh;
  IdentityReport r;
  r.name = "hopf";
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  int used = 0, corner = 0;
  for (const auto& e : mesh.boundary_edges()) {
    if (edge_touches_corner(mesh, e)) {
      ++corner;
      continue;
    }
    const double d = -u.gradient(e.triangle).dot(e.outward_normal);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    ++used;
  }
  r.left = used ? lo : 0.0;
  r.right = 0.0;
  r.residual = r.left;
  r.pass = used > 0 && lo > 0;
  r.verdict = used == 0 ? Verdict::inconclusive : (r.pass ? Verdict::holds : Verdict::fails);
  r.details["min_inward_derivative"] = r.left;
  r.details["max_inward_derivative"] = used ? hi : 0.0;
  r.details["corner_edges_skipped"] = corner;
  return r;
}

IdentityReport monotonicity_diagnostic(const FeFunction& u, const MonotonicityOptions& opt) {
  const Mesh& mesh = *u.mesh;
  const Domain& dom = mesh.domain();
  IdentityReport r;
  r.name = "monotone";
  r.tolerance = opt.tol;
  const double eps = opt.eps > 0 ? opt.eps : 0.2 * dom.inradius();
  const double cos_t = std::cos(opt.theta_half_deg * std::numbers::pi / 180);
  const double scale = u.sup_norm();
  std::vector<double> dist(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) dist[i] = dom.distance_to_boundary(mesh.nodes()[i]);

  double worst = 0.0;
  int checked = 0, empty = 0, violations = 0;
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    if (mesh.is_boundary(i) || !(dist[i] > 0 && dist[i] < eps)) continue;
    const Point x = mesh.nodes()[i];
    const Point n = dom.inward_normal(x);
    double umin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < mesh.num_nodes(); ++j) {
      if (dist[j] <= dist[i]) continue;
      const Point d = mesh.nodes()[j] - x;
      const double len = d.norm();
      if (len > 2 * eps || d.dot(n) < cos_t * len) continue;
      umin = std::min(umin, u.values[j]);
    }
    if (!std::isfinite(umin)) {
      ++empty;
      continue;
    }
    ++checked;
    const double drop = u.values[i] - umin;  // > 0 is a violation
    worst = std::max(worst, drop);
    if (drop > opt.tol * scale) ++violations;
  }
  r.left = worst;
  r.right = opt.tol * scale;
  r.residual = worst;
  r.relative = scale > 0 ? worst / scale : 0.0;
  r.details["nodes_checked"] = checked;
  r.details["empty_cones"] = empty;
  r.details["violations"] = violations;
  r.details["eps"] = eps;
  if (checked == 0) {
    r.verdict = Verdict::inconclusive;
    r.notes.push_back("every cone is empty; refine the mesh");
    return r;
  }
  r.pass = violations == 0;
  r.verdict = r.pass ? Verdict::holds : Verdict::fails;
  return r;
}

IdentityReport boundary_gradient_bound(const FeFunction& u, const Nonlinearity& f, double p, double delta,
                                       double tol, SolverSettings settings) {
  const Mesh& mesh = *u.mesh;
  const Domain& dom = mesh.domain();
  IdentityReport r;
  r.name = "boundary";
  r.tolerance = tol;
  if (!(delta > 0)) throw Error(ErrorKind::invalid_parameter, "strip width must be > 0");

  const auto torsion = InnerSolver(u.mesh, p, 0.0, settings).solve(Eigen::VectorXd::Ones(mesh.num_nodes()));
  const FeFunction& v = torsion.solution;
  double M = 0.0, vmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const double d = dom.distance_to_boundary(mesh.nodes()[i]);
    // closed strip: the layer carrying vmin belongs to it
    if (d <= delta + mesh.h()) M = std::max({M, std::abs(u.values[i]), std::abs(f(u.values[i]))});
    if (d >= delta && d <= delta + mesh.h()) vmin = std::min(vmin, v.values[i]);
  }
  if (!std::isfinite(vmin) || !(vmin > 0)) {
    r.verdict = Verdict::inconclusive;
    r.notes.push_back("torsion function not positive on the inner strip boundary");
    return r;
  }
  const double scale = std::max(std::pow(M, 1 / (p - 1)), M / vmin);
  double du = 0.0, dv = 0.0;
  for (const auto& e : mesh.boundary_edges()) {
    du = std::max(du, -u.gradient(e.triangle).dot(e.outward_normal));
    dv = std::max(dv, v.gradient(e.triangle).norm());
  }
  r.left = du;
  r.right = scale * dv;
  r.residual = std::max(0.0, du - r.right);
  r.relative = r.right > 0 ? r.residual / r.right : 0.0;
  r.pass = du <= r.right * (1 + tol);
  r.verdict = r.pass ? Verdict::holds : Verdict::fails;
  r.details["M"] = M;
  r.details["N_scale"] = scale;
  r.details["min_torsion_on_strip"] = vmin;
  if (!torsion.converged) r.notes.push_back("torsion solve did not converge");
  return r;
}

}  // namespace plapd
