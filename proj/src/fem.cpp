#include "plapd/fem.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "plapd/error.hpp"

namespace plapd {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

InnerProblem InnerProblem::with_load(MeshPtr mesh, double p, const std::function<double(const Point&)>& g,
                                     double Lambda, SolverSettings s) {
  InnerProblem prob;
  prob.mesh = std::move(mesh);
  prob.p = p;
  prob.Lambda = Lambda;
  prob.settings = s;
  prob.load.resize(prob.mesh->num_nodes());
  for (int i = 0; i < prob.mesh->num_nodes(); ++i) prob.load[i] = g(prob.mesh->nodes()[i]);
  return prob;
}

void InnerProblem::validate() const {
  if (!mesh) throw Error(ErrorKind::invalid_input, "inner problem needs a mesh");
  if (!(p > 1)) throw Error(ErrorKind::invalid_parameter, "p must be > 1");
  if (!(Lambda >= 0)) throw Error(ErrorKind::invalid_parameter, "Lambda must be >= 0");
  if (!(settings.tol > 0)) throw Error(ErrorKind::invalid_parameter, "tolerance must be > 0");
  if (settings.max_iter < 1) throw Error(ErrorKind::invalid_parameter, "max_iter must be >= 1");
  if (load.size() != mesh->num_nodes())
    throw Error(ErrorKind::invalid_input, "load length differs from node count");
  if (!load.allFinite()) throw Error(ErrorKind::invalid_input, "load has non-finite values");
}

double InnerProblem::eps_final() const {
  return settings.eps_final >= 0 ? settings.eps_final : 1e-8 * mesh->domain().diameter();
}

namespace {

struct Assembly {
  double energy = 0.0;
  Eigen::VectorXd grad;  // dofs only
  SpMat hess;
};

// Energy, gradient and Hessian restricted to interior dofs.
class Energy {
 public:
  Energy(const Mesh& mesh, double p, double Lambda) : mesh_(mesh), p_(p), Lambda_(Lambda) {}

  double value(const Eigen::VectorXd& v, const Eigen::VectorXd& load, double eps) const {
    const double ep = std::pow(eps, p_);
    double E = 0.0;
    for (int t = 0; t < mesh_.num_triangles(); ++t) {
      const Point g = element_gradient(v, t);
      E += mesh_.area(t) * (std::pow(g.squaredNorm() + eps * eps, p_ / 2) - ep) / p_;
    }
    const auto& m = mesh_.lumped_mass();
    for (int i = 0; i < mesh_.num_nodes(); ++i) {
      if (Lambda_ != 0.0) E += Lambda_ * m[i] * std::pow(std::abs(v[i]), p_) / p_;
      E -= m[i] * load[i] * v[i];
    }
    return E;
  }

  // Full nodal gradient (boundary rows included).
  Eigen::VectorXd nodal_gradient(const Eigen::VectorXd& v, const Eigen::VectorXd& load, double eps) const {
    Eigen::VectorXd G = Eigen::VectorXd::Zero(mesh_.num_nodes());
    for (int t = 0; t < mesh_.num_triangles(); ++t) {
      const Point g = element_gradient(v, t);
      const double s2 = g.squaredNorm() + eps * eps;
      if (s2 == 0.0) continue;
      const double a = mesh_.area(t) * std::pow(s2, (p_ - 2) / 2);
      const auto& tri = mesh_.triangles()[t];
      const auto& dphi = mesh_.basis_gradients(t);
      for (int k = 0; k < 3; ++k) G[tri[k]] += a * g.dot(dphi[k]);
    }
    const auto& m = mesh_.lumped_mass();
    for (int i = 0; i < mesh_.num_nodes(); ++i) {
      if (Lambda_ != 0.0) G[i] += Lambda_ * m[i] * std::copysign(std::pow(std::abs(v[i]), p_ - 1), v[i]);
      G[i] -= m[i] * load[i];
    }
    return G;
  }

  Assembly assemble(const Eigen::VectorXd& v, const Eigen::VectorXd& load, double eps, bool hessian) const {
    Assembly out;
    out.energy = value(v, load, eps);
    const auto G = nodal_gradient(v, load, eps);
    const auto dof = mesh_.dof_of_node();
    const auto interior = mesh_.interior_nodes();
    out.grad.resize(static_cast<Eigen::Index>(interior.size()));
    for (std::size_t k = 0; k < interior.size(); ++k) out.grad[static_cast<Eigen::Index>(k)] = G[interior[k]];
    if (!hessian) return out;

    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(mesh_.num_triangles()) * 9 + interior.size());
    for (int t = 0; t < mesh_.num_triangles(); ++t) {
      const Point g = element_gradient(v, t);
      const double s2 = g.squaredNorm() + eps * eps;
      const double a = std::pow(s2, (p_ - 2) / 2);
      const double b = (p_ == 2.0 || s2 == 0.0) ? 0.0 : (p_ - 2) * std::pow(s2, (p_ - 4) / 2);
      const auto& tri = mesh_.triangles()[t];
      const auto& dphi = mesh_.basis_gradients(t);
      const double A = mesh_.area(t);
      for (int i = 0; i < 3; ++i) {
        const int di = dof[tri[i]];
        if (di < 0) continue;
        for (int j = 0; j < 3; ++j) {
          const int dj = dof[tri[j]];
          if (dj < 0) continue;
          trip.emplace_back(di, dj, A * (a * dphi[i].dot(dphi[j]) + b * g.dot(dphi[i]) * g.dot(dphi[j])));
        }
      }
    }
    const auto& m = mesh_.lumped_mass();
    const double vmax = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
    const double floor = 1e-8 * std::max(1.0, vmax);
    for (std::size_t k = 0; k < interior.size(); ++k) {
      const int i = interior[k];
      double d = 0.0;
      if (Lambda_ != 0.0) d = Lambda_ * (p_ - 1) * m[i] * std::pow(std::max(std::abs(v[i]), floor), p_ - 2);
      trip.emplace_back(static_cast<int>(k), static_cast<int>(k), d);
    }
    const auto n = static_cast<Eigen::Index>(interior.size());
    out.hess.resize(n, n);
    out.hess.setFromTriplets(trip.begin(), trip.end());
    return out;
  }

  Point element_gradient(const Eigen::VectorXd& v, int t) const {
    const auto& tri = mesh_.triangles()[t];
    const auto& dphi = mesh_.basis_gradients(t);
    return v[tri[0]] * dphi[0] + v[tri[1]] * dphi[1] + v[tri[2]] * dphi[2];
  }

 private:
  const Mesh& mesh_;
  double p_;
  double Lambda_;
};

Eigen::VectorXd scatter(const Mesh& mesh, const Eigen::VectorXd& x) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(mesh.num_nodes());
  const auto interior = mesh.interior_nodes();
  for (std::size_t k = 0; k < interior.size(); ++k) v[interior[k]] = x[static_cast<Eigen::Index>(k)];
  return v;
}

Eigen::VectorXd gather(const Mesh& mesh, const Eigen::VectorXd& v) {
  const auto interior = mesh.interior_nodes();
  Eigen::VectorXd x(static_cast<Eigen::Index>(interior.size()));
  for (std::size_t k = 0; k < interior.size(); ++k) x[static_cast<Eigen::Index>(k)] = v[interior[k]];
  return x;
}

std::vector<double> eps_schedule(double p, double eps_final) {
  if (p == 2.0) return {eps_final};
  std::vector<double> out;
  for (double e = 1e-1; e > eps_final * 1.0001; e *= 0.1) out.push_back(e);
  out.push_back(eps_final);
  return out;
}

}  // namespace

double energy(const FeFunction& v, const InnerProblem& prob, double eps) {
  prob.validate();
  return Energy(*prob.mesh, prob.p, prob.Lambda).value(v.values, prob.load, eps);
}

Eigen::VectorXd energy_gradient(const FeFunction& v, const InnerProblem& prob, double eps) {
  prob.validate();
  return Energy(*prob.mesh, prob.p, prob.Lambda).nodal_gradient(v.values, prob.load, eps);
}

struct InnerSolver::Impl {
  // p = 2: the energy is quadratic, so one factorization serves every load
  std::optional<Eigen::SimplicialLDLT<SpMat>> linear;
};

InnerSolver::InnerSolver(MeshPtr mesh, double p, double Lambda, SolverSettings settings)
    : mesh_(std::move(mesh)), p_(p), Lambda_(Lambda), settings_(settings), impl_(std::make_shared<Impl>()) {
  InnerProblem probe;
  probe.mesh = mesh_;
  probe.p = p_;
  probe.Lambda = Lambda_;
  probe.settings = settings_;
  probe.load = Eigen::VectorXd::Zero(mesh_ ? mesh_->num_nodes() : 0);
  probe.validate();
  if (p_ == 2.0) {
    const Energy E(*mesh_, p_, Lambda_);
    const auto a = E.assemble(Eigen::VectorXd::Zero(mesh_->num_nodes()), probe.load, 0.0, true);
    impl_->linear.emplace();
    impl_->linear->compute(a.hess);
    if (impl_->linear->info() != Eigen::Success) impl_->linear.reset();
  }
}

SolveReport InnerSolver::solve(const Eigen::VectorXd& load, const FeFunction* warm_start) const {
  InnerProblem prob;
  prob.mesh = mesh_;
  prob.p = p_;
  prob.Lambda = Lambda_;
  prob.settings = settings_;
  prob.load = load;
  prob.validate();
  if (warm_start && warm_start->values.size() != mesh_->num_nodes())
    throw Error(ErrorKind::invalid_input, "warm start lives on a different mesh");

  const Mesh& mesh = *mesh_;
  const Energy E(mesh, p_, Lambda_);
  const double tol = settings_.tol;
  const double eps_final = prob.eps_final();
  SolveReport rep;
  Eigen::VectorXd x = warm_start ? gather(mesh, warm_start->values) : Eigen::VectorXd::Zero(mesh.interior_nodes().size());

  if (impl_->linear) {
    // quadratic energy: Newton from any start lands on the minimizer in one
    // step; one refinement sweep mops up roundoff
    for (int k = 0; k < 2 && rep.iterations < settings_.max_iter; ++k) {
      const auto a = E.assemble(scatter(mesh, x), load, eps_final, false);
      rep.energy = a.energy;
      rep.gradient_norm = a.grad.norm();
      if (rep.gradient_norm <= tol * (1 + std::abs(a.energy))) break;
      x -= impl_->linear->solve(a.grad);
      ++rep.iterations;
    }
    const auto a = E.assemble(scatter(mesh, x), load, eps_final, false);
    rep.energy = a.energy;
    rep.gradient_norm = a.grad.norm();
    rep.threshold = tol * (1 + std::abs(a.energy));
    rep.converged = rep.gradient_norm <= rep.threshold;
    rep.trace.push_back({eps_final, rep.iterations, rep.gradient_norm, rep.converged});
    rep.solution = FeFunction(mesh_, scatter(mesh, x));
    if (!rep.converged) rep.message = "iteration budget exhausted";
    return rep;
  }

  const auto schedule = eps_schedule(p_, eps_final);
  Eigen::SimplicialLDLT<SpMat> ldlt;
  bool analysed = false;
  Eigen::VectorXd x_prev, g_prev;
  double bb_alpha = 0.0;
  bool budget_left = true;

  for (std::size_t st = 0; st < schedule.size() && budget_left; ++st) {
    const double eps = schedule[st];
    const bool last = st + 1 == schedule.size();
    const double stage_tol = last ? tol : std::max(tol, 1e-6);
    EpsStage stage{eps, 0, 0.0, false};
    x_prev.resize(0);
    for (;;) {
      auto a = E.assemble(scatter(mesh, x), load, eps, false);
      const double gnorm = a.grad.norm();
      stage.gradient_norm = gnorm;
      rep.energy = a.energy;
      rep.gradient_norm = gnorm;
      rep.threshold = tol * (1 + std::abs(a.energy));
      if (gnorm <= stage_tol * (1 + std::abs(a.energy))) {
        stage.converged = true;
        break;
      }
      if (rep.iterations >= settings_.max_iter) {
        budget_left = false;
        break;
      }
      ++rep.iterations;
      ++stage.iterations;

      a = E.assemble(scatter(mesh, x), load, eps, true);
      Eigen::VectorXd d;
      bool newton = false;
      if (!analysed) {
        ldlt.analyzePattern(a.hess);
        analysed = true;
      }
      ldlt.factorize(a.hess);
      if (ldlt.info() == Eigen::Success) {
        d = ldlt.solve(-a.grad);
        newton = d.allFinite() && d.dot(a.grad) < 0;
      }
      if (!newton) {
        // Barzilai-Borwein step when the Hessian is unusable
        if (x_prev.size() == x.size()) {
          const Eigen::VectorXd s = x - x_prev, y = a.grad - g_prev;
          const double sy = s.dot(y);
          if (sy > 0) bb_alpha = s.squaredNorm() / sy;
        }
        if (!(bb_alpha > 0)) bb_alpha = 1.0 / std::max(1.0, a.hess.diagonal().cwiseAbs().maxCoeff());
        d = -bb_alpha * a.grad;
        ++rep.bb_steps;
      }

      // Armijo backtracking; near roundoff level accept a full step that
      // does not raise the energy and shrinks the gradient
      const double slope = d.dot(a.grad);
      double alpha = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        const Eigen::VectorXd trial = x + alpha * d;
        const double Et = E.value(scatter(mesh, trial), load, eps);
        if (!std::isfinite(Et)) continue;
        if (Et <= a.energy + 1e-4 * alpha * slope) {
          accepted = true;
          break;
        }
        if (ls == 0 && Et <= a.energy + 1e-12 * (1 + std::abs(a.energy))) {
          const auto gt = E.assemble(scatter(mesh, trial), load, eps, false).grad.norm();
          if (gt < gnorm) {
            accepted = true;
            break;
          }
        }
      }
      if (!accepted) {
        rep.message = "line search failed at eps = " + std::to_string(eps);
        budget_left = false;
        break;
      }
      x_prev = x;
      g_prev = a.grad;
      x += alpha * d;
    }
    rep.trace.push_back(stage);
    if (!stage.converged) break;
  }

  rep.converged = !rep.trace.empty() && rep.trace.size() == schedule.size() && rep.trace.back().converged &&
                  rep.gradient_norm <= rep.threshold;
  if (!rep.converged && rep.message.empty()) rep.message = "iteration budget exhausted";
  rep.solution = FeFunction(mesh_, scatter(mesh, x));
  return rep;
}

SolveReport inner_solve(const InnerProblem& prob, const FeFunction* warm_start) {
  prob.validate();
  return InnerSolver(prob.mesh, prob.p, prob.Lambda, prob.settings).solve(prob.load, warm_start);
}

double gradient_lp_norm(const FeFunction& v, double sigma) {
  if (!(sigma >= 1)) throw Error(ErrorKind::invalid_parameter, "gradient norm exponent must be >= 1");
  const Mesh& mesh = *v.mesh;
  double s = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) s += mesh.area(t) * std::pow(v.gradient(t).norm(), sigma);
  return std::pow(s, 1.0 / sigma);
}

double lumped_integral(const FeFunction& v, const std::function<double(double)>& g) {
  const auto& m = v.mesh->lumped_mass();
  double s = 0.0;
  for (int i = 0; i < v.mesh->num_nodes(); ++i) s += m[i] * g(v.values[i]);
  return s;
}

RegularityExponent regularity_exponent(double p, int N, double q) {
  if (!(p > 1)) throw Error(ErrorKind::invalid_parameter, "p must be > 1");
  if (!(q >= 1) || !(q < N)) throw Error(ErrorKind::invalid_parameter, "regularity exponent needs 1 <= q < N");
  RegularityExponent r;
  r.r = N * q * (p - 1) / (N - q);
  r.exceeds_N = r.r > N;
  return r;
}

}  // namespace plapd
