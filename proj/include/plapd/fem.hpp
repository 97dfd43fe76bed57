#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "plapd/geometry.hpp"

namespace plapd {

struct SolverSettings {
  double tol = 1e-8;
  int max_iter = 500;
  /// Final regularization; a negative value means 1e-8 * diam(domain).
  double eps_final = -1.0;
};

/// -Delta_p v + Lambda |v|^{p-2} v = g, v = 0 on the boundary.
struct InnerProblem {
  MeshPtr mesh;
  double p = 2.0;
  double Lambda = 0.0;
  Eigen::VectorXd load;  // nodal g
  SolverSettings settings;

  static InnerProblem with_load(MeshPtr mesh, double p, const std::function<double(const Point&)>& g,
                                double Lambda = 0.0, SolverSettings s = {});
  void validate() const;
  double eps_final() const;
};

struct EpsStage {
  double eps = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
};

struct SolveReport {
  FeFunction solution;
  double energy = 0.0;
  double gradient_norm = 0.0;
  /// gradient_norm must not exceed this for convergence: tol * (1 + |energy|)
  double threshold = 0.0;
  int iterations = 0;
  int bb_steps = 0;
  bool converged = false;
  std::vector<EpsStage> trace;
  std::string message;
};

/// Discrete energy of the regularized problem at regularization eps.
double energy(const FeFunction& v, const InnerProblem& prob, double eps);
/// Gradient of `energy` with respect to all nodal values (boundary rows included).
Eigen::VectorXd energy_gradient(const FeFunction& v, const InnerProblem& prob, double eps);

/// Reusable solver for one (mesh, p, Lambda, settings); caches the
/// factorization when the problem is linear (p = 2).
class InnerSolver {
 public:
  InnerSolver(MeshPtr mesh, double p, double Lambda = 0.0, SolverSettings settings = {});

  SolveReport solve(const Eigen::VectorXd& load, const FeFunction* warm_start = nullptr) const;

  const MeshPtr& mesh() const { return mesh_; }
  double p() const { return p_; }
  double Lambda() const { return Lambda_; }
  const SolverSettings& settings() const { return settings_; }

 private:
  struct Impl;
  MeshPtr mesh_;
  double p_;
  double Lambda_;
  SolverSettings settings_;
  std::shared_ptr<Impl> impl_;
};

SolveReport inner_solve(const InnerProblem& prob, const FeFunction* warm_start = nullptr);

/// (sum_T |T| |grad v|_T^sigma)^{1/sigma}
double gradient_lp_norm(const FeFunction& v, double sigma);

/// Lumped integral sum_i m_i g(v_i).
double lumped_integral(const FeFunction& v, const std::function<double(double)>& g);

struct RegularityExponent {
  double r = 0.0;
  bool exceeds_N = false;
};
RegularityExponent regularity_exponent(double p, int N, double q);

}  // namespace plapd
