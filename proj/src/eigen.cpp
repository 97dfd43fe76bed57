#include "plapd/eigen.hpp"

#include <cmath>

#include "plapd/error.hpp"

namespace plapd {

double lumped_lp_norm(const FeFunction& v, double p) {
  return std::pow(lumped_integral(v, [p](double s) { return std::pow(std::abs(s), p); }), 1 / p);
}

double rayleigh(const FeFunction& v, double p) {
  if (!(p > 1)) throw Error(ErrorKind::invalid_parameter, "p must be > 1");
  const double den = std::pow(lumped_lp_norm(v, p), p);
  if (!(den > 0)) throw Error(ErrorKind::invalid_input, "Rayleigh quotient of the zero function");
  return std::pow(gradient_lp_norm(v, p), p) / den;
}

EigenPair first_eigenpair(double p, MeshPtr mesh, const EigenOptions& opt) {
  if (!mesh) throw Error(ErrorKind::invalid_input, "first_eigenpair needs a mesh");
  if (!(opt.tol > 0)) throw Error(ErrorKind::invalid_parameter, "tolerance must be > 0");
  const InnerSolver solver(mesh, p, 0.0, opt.inner);

  EigenPair out;
  Eigen::VectorXd start(mesh->num_nodes());
  for (int i = 0; i < mesh->num_nodes(); ++i)
    start[i] = mesh->is_boundary(i) ? 0.0 : std::max(mesh->domain().distance_to_boundary(mesh->nodes()[i]), 0.0);
  FeFunction v(mesh, start);
  v.values /= lumped_lp_norm(v, p);
  double lambda = rayleigh(v, p);

  for (int k = 0; k < opt.max_iter; ++k) {
    // load |v|^{p-2} v with v normalized in lumped L^p
    Eigen::VectorXd load = v.values.unaryExpr([p](double s) { return std::copysign(std::pow(std::abs(s), p - 1), s); });
    // the solution is ~ lambda^{-1/(p-1)} v; start there
    FeFunction guess(mesh, v.values * std::pow(lambda, -1 / (p - 1)));
    const auto rep = solver.solve(load, &guess);
    ++out.iterations;
    if (!rep.converged) {
      out.message = "inner solve failed: " + rep.message;
      break;
    }
    FeFunction w = rep.solution;
    const double norm = lumped_lp_norm(w, p);
    if (!(norm > 0)) {
      out.message = "iterate collapsed to zero";
      break;
    }
    w.values /= norm;
    const double next = rayleigh(w, p);
    out.trace.push_back(next);
    v = std::move(w);
    const bool done = std::abs(next - lambda) < opt.tol * next;
    lambda = next;
    if (done && k > 0) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged && out.message.empty()) out.message = "iteration budget exhausted";
  out.lambda = lambda;
  out.phi = std::move(v);
  return out;
}

}  // namespace plapd
