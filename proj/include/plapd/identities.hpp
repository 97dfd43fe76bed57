#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "plapd/eigen.hpp"
#include "plapd/fem.hpp"
#include "plapd/nonlinearity.hpp"

namespace plapd {

struct IdentityReport {
  std::string name;
  double left = 0.0;
  double right = 0.0;
  double residual = 0.0;  // |L - R|
  double relative = 0.0;  // |L - R| / max(|L|, |R|, floor)
  double tolerance = 0.0;
  bool pass = false;
  Verdict verdict = Verdict::inconclusive;
  std::map<std::string, double> details;
  std::vector<std::string> notes;
};

/// Fills residual/relative/pass/verdict from left and right.
void finish_equality(IdentityReport& r, double floor = 1e-14);

enum class BoundaryFlux {
  element,      // gradient of the single adjacent element
  variational,  // boundary reaction of the discrete equation
};

struct PohozaevOptions {
  double tol = 0.05;
  BoundaryFlux flux = BoundaryFlux::element;
};

/// N int F(u) - (N-p)/p int f(u) u  against  (p-1)/p int |du/dnu|^p (x - c).nu,
/// c the domain centroid.
IdentityReport pohozaev_residual(const FeFunction& u, const Nonlinearity& f, double p,
                                 const PohozaevOptions& opt = {});

/// The same identity for a radial profile on a ball in R^N. Critical growth
/// makes the left side vanish identically while the right side stays
/// positive, so the report fails.
IdentityReport pohozaev_radial(const RadialProfile& u, const Nonlinearity& f, double p, double tol = 0.05);

/// int f(u)/u^{p-1} phi^p (lumped) <= lambda1 (1 + tol)
IdentityReport picone_value(const FeFunction& u, const Nonlinearity& f, double p, const EigenPair& eig,
                            double tol = 0.02);

/// int |grad u|^p = int f(u) u
IdentityReport energy_identity_residual(const FeFunction& u, const Nonlinearity& f, double p, double tol = 0.01);

/// Solves both inner problems (Lambda = 0) and checks v1 <= v2 + tol ||v2||.
IdentityReport comparison_check(const Eigen::VectorXd& g1, const Eigen::VectorXd& g2, double p, MeshPtr mesh,
                                double tol = 1e-6, SolverSettings settings = {});

/// Smooth nonnegative random load; deterministic in the seed.
Eigen::VectorXd random_smooth_load(const Mesh& mesh, std::uint32_t seed, double amplitude = 1.0);

/// Minimum inward normal derivative over boundary edges not touching a corner.
IdentityReport hopf_boundary_check(const FeFunction& u);

struct MonotonicityOptions {
  double eps = -1.0;  // negative: 0.2 * inradius
  double theta_half_deg = 30.0;
  double tol = 1e-3;
};
IdentityReport monotonicity_diagnostic(const FeFunction& u, const MonotonicityOptions& opt = {});

/// Comparison with the discrete torsion function in the boundary strip of width delta.
IdentityReport boundary_gradient_bound(const FeFunction& u, const Nonlinearity& f, double p, double delta,
                                       double tol = 0.05, SolverSettings settings = {});

}  // namespace plapd
