#pragma once

#include <string>
#include <vector>

#include "plapd/fem.hpp"

namespace plapd {

struct EigenPair {
  double lambda = 0.0;
  FeFunction phi;  // lumped int |phi|^p = 1, phi >= 0
  std::vector<double> trace;  // Rayleigh quotient per iteration
  int iterations = 0;
  bool converged = false;
  std::string message;
};

/// int |grad v|^p / int |v|^p with the lumped denominator.
double rayleigh(const FeFunction& v, double p);

/// Lumped (sum_i m_i |v_i|^p)^{1/p}.
double lumped_lp_norm(const FeFunction& v, double p);

struct EigenOptions {
  double tol = 1e-10;  // relative change of successive Rayleigh quotients
  int max_iter = 300;
  SolverSettings inner;
};

/// Nonlinear inverse power iteration from the distance-to-boundary bump.
EigenPair first_eigenpair(double p, MeshPtr mesh, const EigenOptions& opt = {});

}  // namespace plapd
