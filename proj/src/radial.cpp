#include "plapd/radial.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/numeric/odeint.hpp>

namespace plapd {

namespace odeint = boost::numeric::odeint;

double torsion_exact(double p, int N, double r) {
  if (!(p > 1)) throw Error(ErrorKind::invalid_parameter, "p must be > 1");
  if (N < 2) throw Error(ErrorKind::invalid_parameter, "N must be >= 2");
  if (!(r >= 0 && r <= 1)) throw Error(ErrorKind::invalid_parameter, "torsion_exact: r outside [0, 1]");
  return (p - 1) / p * std::pow(double(N), -1 / (p - 1)) * (1 - std::pow(r, p / (p - 1)));
}

double torsion_exact(double p, int N, double r, double R) {
  if (!(R > 0)) throw Error(ErrorKind::invalid_parameter, "radius must be > 0");
  return std::pow(R, p / (p - 1)) * torsion_exact(p, N, r / R);
}

namespace {

using State = std::array<double, 2>;  // (u, w)

struct RadialRhs {
  double p;
  int N;
  const Nonlinearity* f;

  void operator()(const State& x, State& dx, double r) const {
    const double rn = std::pow(r, N - 1);
    const double a = std::abs(x[1]) / rn;
    dx[0] = std::copysign(std::pow(a, 1 / (p - 1)), x[1]);
    if (x[1] == 0) dx[0] = 0;
    dx[1] = -rn * (*f)(x[0]);
  }
};

}  // namespace

ShootResult radial_shoot(double p, int N, const Nonlinearity& f, double m, double r_max, const ShootOptions& opt) {
  if (!(p > 1)) throw Error(ErrorKind::invalid_parameter, "p must be > 1");
  if (N < 2) throw Error(ErrorKind::invalid_parameter, "N must be >= 2");
  if (!(m > 0)) throw Error(ErrorKind::invalid_parameter, "shooting height must be > 0");
  if (!(r_max > 0)) throw Error(ErrorKind::invalid_parameter, "r_max must be > 0");

  ShootResult res;
  res.m = m;
  const double fm = f(m);
  std::size_t next_out = 0;
  auto emit = [&](double r, double u, double w) {
    res.r.push_back(r);
    res.u.push_back(u);
    res.w.push_back(w);
  };
  if (!(fm > 0)) {
    res.note = "f(m) <= 0: no descent from the origin";
    for (double r : opt.output_radii) emit(r, m, 0.0);
    if (opt.output_radii.empty()) emit(0.0, m, 0.0);
    return res;
  }

  // two-term series start; r_init is a small fraction of the radius where
  // the series alone would reach zero
  const double pc = p / (p - 1);
  const double c = std::pow(fm / N, 1 / (p - 1)) * (p - 1) / p;
  const double r_init = std::min(1e-4 * std::pow(m / c, 1 / pc), 0.5 * r_max);
  auto series = [&](double r) {
    return State{m - c * std::pow(r, pc), -fm * std::pow(r, N) / N};
  };

  if (opt.output_radii.empty()) emit(0.0, m, 0.0);
  while (next_out < opt.output_radii.size() && opt.output_radii[next_out] <= r_init) {
    const auto s = series(opt.output_radii[next_out]);
    emit(opt.output_radii[next_out++], s[0], s[1]);
  }

  const RadialRhs rhs{p, N, &f};
  auto stepper = odeint::make_dense_output(opt.atol * m, opt.rtol, odeint::runge_kutta_dopri5<State>());
  stepper.initialize(series(r_init), r_init, 1e-3 * r_init);

  const double level_value = opt.level ? *opt.level * m : 0.0;
  auto first_below = [&](double a, double b, double target) {
    // u decreases through target inside [a, b]; bisect on the dense output
    State x;
    for (int k = 0; k < 200 && b - a > 1e-15 * b; ++k) {
      const double mid = 0.5 * (a + b);
      stepper.calc_state(mid, x);
      (x[0] > target ? a : b) = mid;
    }
    return 0.5 * (a + b);
  };

  double w_prev = series(r_init)[1];
  bool descending = true;
  int steps = 0;
  while (stepper.current_time() < r_max) {
    if (++steps > 2000000) {
      res.note = "step budget exhausted";
      break;
    }
    const auto [t0, t1] = stepper.do_step(rhs);
    const State x1 = stepper.current_state();

    if (opt.level && !res.r_level && x1[0] <= level_value) res.r_level = first_below(t0, t1, level_value);

    const bool crossed = x1[0] <= 0;
    const double r_end = crossed ? first_below(t0, t1, 0.0) : std::min(t1, r_max);

    if (!opt.output_radii.empty()) {
      State x;
      while (next_out < opt.output_radii.size() && opt.output_radii[next_out] <= r_end) {
        stepper.calc_state(opt.output_radii[next_out], x);
        emit(opt.output_radii[next_out++], x[0], x[1]);
      }
    } else if (!crossed && t1 <= r_max) {
      emit(t1, x1[0], x1[1]);
    }

    if (descending && x1[1] >= 0 && w_prev < 0 && x1[0] > 0) {
      res.degenerate_point = true;
      descending = false;
      res.note = "u' returned to 0 before the zero crossing";
    }
    w_prev = x1[1];

    if (crossed) {
      res.r0 = r_end;
      if (opt.output_radii.empty()) {
        State x;
        stepper.calc_state(r_end, x);
        emit(r_end, 0.0, x[1]);
      }
      break;
    }
    if (!std::isfinite(x1[0]) || !std::isfinite(x1[1])) {
      res.note = "non-finite state";
      break;
    }
  }
  return res;
}

BvpResult radial_solve_bvp(double p, int N, const Nonlinearity& f, double R, const BvpOptions& opt) {
  if (!(R > 0)) throw Error(ErrorKind::invalid_parameter, "radius must be > 0");
  BvpResult out;
  const double r_max = 1e3 * R;
  auto r0_of = [&](double m) -> std::optional<double> {
    ++out.shots;
    return radial_shoot(p, N, f, m, r_max).r0;
  };

  // geometric scan for a sign change of r0(m) - R between consecutive
  // heights; a trajectory that never vanishes counts as r0 = +inf
  const double inf = std::numeric_limits<double>::infinity();
  std::optional<double> lo, hi;
  double prev_r0 = std::numeric_limits<double>::quiet_NaN();
  double prev_m = 0;
  bool lo_below = false;
  bool any_zero = false;
  for (double m = opt.m_min; m <= opt.m_max * (1 + 1e-12); m *= 2) {
    const double r0 = r0_of(m).value_or(inf);
    any_zero = any_zero || r0 < inf;
    if (std::abs(r0 - R) <= opt.rel_tol * R) {
      lo = hi = m;
      break;
    }
    if (!std::isnan(prev_r0) && (prev_r0 < R) != (r0 < R)) {
      lo = prev_m;
      hi = m;
      lo_below = prev_r0 < R;
      break;
    }
    prev_r0 = r0;
    prev_m = m;
  }
  if (!lo) {
    std::ostringstream os;
    os << "no-solution-found: r0(m) - R never changes sign for m in [" << opt.m_min << ", " << opt.m_max << "]";
    if (!any_zero) os << "; no trajectory reaches zero";
    out.message = os.str();
    return out;
  }

  double a = *lo, b = *hi;
  double m = a;
  bool hit = a == b;
  for (int k = 0; k < 200 && !hit; ++k) {
    m = std::sqrt(a * b);
    const double r0 = r0_of(m).value_or(inf);
    if (std::abs(r0 - R) <= opt.rel_tol * R) hit = true;
    else if ((r0 < R) == lo_below) a = m;
    else b = m;
    if (b / a - 1 < 1e-15) hit = true;
  }
  if (!radial_shoot(p, N, f, m, r_max).r0) {
    out.message = "no-solution-found: bisection ended on a trajectory without a zero";
    return out;
  }

  const auto r0 = radial_shoot(p, N, f, m, r_max).r0;
  ShootOptions so;
  const int M = opt.grid_points;
  for (int i = 0; i <= M; ++i) so.output_radii.push_back(*r0 * i / M);
  so.output_radii.back() = *r0;
  const auto shot = radial_shoot(p, N, f, m, r_max, so);
  out.profile.dimension = N;
  out.profile.radius = R;
  out.profile.r.resize(M + 1);
  out.profile.u.assign(shot.u.begin(), shot.u.end());
  out.profile.u.resize(M + 1, 0.0);
  for (int i = 0; i <= M; ++i) out.profile.r[i] = R * i / M;
  out.profile.u[M] = 0.0;
  out.found = true;
  out.m = m;
  return out;
}

double radial_eigen(double p, int N, double R) {
  if (!(R > 0)) throw Error(ErrorKind::invalid_parameter, "radius must be > 0");
  if (!(p > 1)) throw Error(ErrorKind::invalid_parameter, "p must be > 1");
  // homogeneous problem: r0 does not depend on m, and decreases in lambda
  auto r0_of = [&](double lambda) {
    return radial_shoot(p, N, nonlinearities::homogeneous(lambda, p), 1.0, 1e3 * R).r0;
  };
  double lo = 1e-6, hi = 1e6;
  auto rl = r0_of(lo), rh = r0_of(hi);
  if ((rl && *rl < R) || !rh || *rh > R) throw Error(ErrorKind::invalid_parameter, "radial_eigen: no bracket");
  for (int k = 0; k < 200 && hi / lo - 1 > 1e-15; ++k) {
    const double mid = std::sqrt(lo * hi);
    const auto r = r0_of(mid);
    if (!r || *r > R) lo = mid;
    else hi = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace plapd
