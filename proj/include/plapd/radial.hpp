#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plapd/geometry.hpp"
#include "plapd/nonlinearity.hpp"

namespace plapd {

/// Radial solution of -Delta_p v = 1 in the unit ball of R^N.
double torsion_exact(double p, int N, double r);
/// Same on the ball of radius R: R^{p'} v(r/R).
double torsion_exact(double p, int N, double r, double R);

struct ShootOptions {
  double rtol = 1e-12;
  /// Absolute tolerance relative to m. Keep it 0: solutions that decay
  /// without crossing (critical growth) otherwise pick up spurious zeros.
  double atol = 0.0;
  /// Radii where the profile is sampled; empty means "every accepted step".
  std::vector<double> output_radii;
  /// Also report the first radius where u drops to level * m (0 < level < 1).
  std::optional<double> level;
};

struct ShootResult {
  double m = 0.0;
  std::optional<double> r0;       // first zero of u, if reached before r_max
  std::optional<double> r_level;  // first radius with u = level * m
  std::vector<double> r, u, w;    // sampled trajectory, w = r^{N-1}|u'|^{p-2}u'
  /// u' came back to 0 while u > 0 (uniqueness of the trajectory is then
  /// not guaranteed for 1 < p < 2).
  bool degenerate_point = false;
  std::string note;
};

/// Integrates -(r^{N-1}|u'|^{p-2}u')' = r^{N-1} f(u), u(0) = m, u'(0) = 0.
ShootResult radial_shoot(double p, int N, const Nonlinearity& f, double m, double r_max,
                         const ShootOptions& opt = {});

struct BvpResult {
  bool found = false;
  double m = 0.0;
  RadialProfile profile;
  int shots = 0;
  std::string message;
};

struct BvpOptions {
  int grid_points = 2000;
  double rel_tol = 1e-10;
  double m_min = 1e-9;
  double m_max = 1e9;
};

/// Shooting bisection on m = u(0) so that the first zero lands on R.
BvpResult radial_solve_bvp(double p, int N, const Nonlinearity& f, double R, const BvpOptions& opt = {});

/// First eigenvalue of -Delta_p on the ball of radius R by bisection on
/// lambda. Throws invalid-parameter if no bracket is found.
double radial_eigen(double p, int N, double R);

}  // namespace plapd
