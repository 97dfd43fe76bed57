#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plapd/eigen.hpp"
#include "plapd/fem.hpp"
#include "plapd/nonlinearity.hpp"

namespace plapd {

enum class FixedPointMode {
  picard,     // relaxed u <- (1-theta) u + theta K(u)
  nehari,     // K applied to the Nehari projection of u
  automatic,  // picard, then nehari if picard ends trivial or diverged
};

const char* to_string(FixedPointMode m);

struct HomotopyConfig {
  double Lambda = 0.0;
  double theta = 0.5;
  double tol = 1e-8;  // relative sup-norm change of successive iterates
  int max_outer = 500;
  double lambda0 = 0.0;
  std::vector<double> t_grid = {1.0, 0.75, 0.5, 0.25, 0.0};
  std::vector<double> lambda_grid;
  /// diverged once ||u|| > ceiling_factor * (1 + ||u_0||)
  double ceiling_factor = 1e6;
  /// PDE residual gate relative to the load norm
  double residual_tol = 1e-5;
  FixedPointMode mode = FixedPointMode::automatic;
  SolverSettings inner;

  void validate() const;
};

enum class BranchStatus { converged, trivial, diverged, stalled, inner_failure };
const char* to_string(BranchStatus s);

struct BranchPoint {
  double parameter = 0.0;
  FeFunction solution;
  double sup_norm = 0.0;
  double residual = 0.0;  // relative PDE residual of the final iterate
  int outer_iterations = 0;
  bool converged = false;
  BranchStatus status = BranchStatus::stalled;
  FixedPointMode mode_used = FixedPointMode::picard;
  double theta_final = 0.0;
  std::string message;
};

/// v solving -Delta_p v + Lambda v^{p-1} = f(u) + t lambda0 + Lambda u^{p-1}.
SolveReport operator_K(const FeFunction& u, const Nonlinearity& f, double p, double Lambda, double t,
                       double lambda0, const InnerSolver* solver = nullptr);

/// Relative PDE residual of -Delta_p u = f(u) + c at interior nodes.
double pde_residual(const FeFunction& u, const Nonlinearity& f, double p, double c);

/// Fixed point of u = H(t, u). The default start is half the sup-norm
/// scale of the torsion solution times the normalized eigenfunction.
BranchPoint fixed_point_solve(const Nonlinearity& f, double p, const HomotopyConfig& cfg, MeshPtr mesh, double t,
                              const FeFunction* start = nullptr);

struct ProbeResult {
  Verdict verdict = Verdict::inconclusive;
  double ratio_max = 0.0;  // max f(s)/s^{p-1} on (0, r]
  double lambda1 = 0.0;
  std::vector<double> s_samples;
  std::vector<bool> near_fixed_point;
  std::string note;
};

/// Krasnoselskii condition a): no u = sK(u) with ||u|| = r for s in [0, 1].
ProbeResult krasnoselskii_probe_a(const Nonlinearity& f, double p, double r, MeshPtr mesh,
                                  const std::vector<double>& s_samples = {0.0, 0.25, 0.5, 0.75, 1.0},
                                  const HomotopyConfig& cfg = {}, const EigenPair* eig = nullptr);

struct BranchReport {
  std::vector<BranchPoint> points;
  bool threshold_exceeded = false;  // every t > 0 diverged
  std::string message;
};

/// Continuation in t along cfg.t_grid (warm-started), following the
/// upper branch through the Nehari projection.
BranchReport homotopy_branch(const Nonlinearity& f, double p, const HomotopyConfig& cfg, MeshPtr mesh);

struct LambdaMaxReport {
  std::optional<double> lambda_hat;  // midpoint of the final bracket
  double lower = 0.0;                // largest lambda with a converged solve
  std::optional<double> upper;       // smallest lambda that failed
  bool lower_bound_only = false;
  bool monotone = true;
  std::vector<BranchPoint> evaluations;
  std::string message;
};

/// Bracket for the largest lambda with a solution of -Delta_p u = f(u) + lambda.
LambdaMaxReport estimate_lambda_max(const Nonlinearity& f, double p, MeshPtr mesh, const HomotopyConfig& cfg,
                                    int bisection_steps = 8);

struct AlphaRow {
  double alpha = 0.0;
  bool found = false;
  double sup_norm = 0.0;
  Verdict h3pp = Verdict::inconclusive;
  Verdict h4pp = Verdict::inconclusive;
  std::optional<double> h3pp_constant;
  std::string message;
};

/// Radial solves with s^{p*-1}/ln(e+s)^alpha for each alpha. Rows come back
/// in grid order; up to `threads` grid points run concurrently.
std::vector<AlphaRow> sweep_alpha(double p, int N, const std::vector<double>& alphas, double R, int threads = 1);

}  // namespace plapd
