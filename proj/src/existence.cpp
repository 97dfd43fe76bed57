#include "plapd/existence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <sstream>
#include <thread>

#include "plapd/error.hpp"
#include "plapd/radial.hpp"

namespace plapd {

const char* to_string(FixedPointMode m) {
  switch (m) {
    case FixedPointMode::picard: return "picard";
    case FixedPointMode::nehari: return "nehari";
    case FixedPointMode::automatic: return "automatic";
  }
  return "unknown";
}

const char* to_string(BranchStatus s) {
  switch (s) {
    case BranchStatus::converged: return "converged";
    case BranchStatus::trivial: return "trivial";
    case BranchStatus::diverged: return "diverged";
    case BranchStatus::stalled: return "stalled";
    case BranchStatus::inner_failure: return "inner-failure";
  }
  return "unknown";
}

namespace {

bool monotone(const std::vector<double>& g) {
  bool up = true, down = true;
  for (std::size_t i = 1; i < g.size(); ++i) {
    up = up && g[i] > g[i - 1];
    down = down && g[i] < g[i - 1];
  }
  return up || down;
}

double sup_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

Eigen::VectorXd nodal_load(const FeFunction& u, const Nonlinearity& f, double p, double Lambda, double c) {
  Eigen::VectorXd g(u.values.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double s = std::max(u.values[i], 0.0);
    g[i] = f(s) + c + (Lambda > 0 ? Lambda * std::pow(s, p - 1) : 0.0);
  }
  return g;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

// Positive eigenfunction scaled to unit sup-norm.
FeFunction unit_bump(double p, const MeshPtr& mesh, const SolverSettings& inner) {
  EigenOptions eo;
  eo.tol = 1e-8;
  eo.inner = inner;
  auto eig = first_eigenpair(p, mesh, eo);
  FeFunction phi = eig.phi;
  const double s = phi.sup_norm();
  if (s > 0) phi.values /= s;
  return phi;
}

// Largest t > 0 with t^{p-1} A = int (f(t u) + c) u, u of unit sup-norm.
std::optional<double> nehari_scale(const FeFunction& u, const Nonlinearity& f, double p, double c) {
  const double A = std::pow(gradient_lp_norm(u, p), p);
  if (!(A > 0)) return std::nullopt;
  const auto& m = u.mesh->lumped_mass();
  auto g = [&](double t) {
    double b = 0;
    for (Eigen::Index i = 0; i < u.values.size(); ++i) {
      const double s = std::max(u.values[i], 0.0);
      if (s > 0) b += m[i] * (f(t * s) + c) * s;
    }
    const double v = std::pow(t, p - 1) * A - b;
    return std::isnan(v) ? -HUGE_VAL : v;
  };
  constexpr double t_lo = 1e-10, t_hi = 1e10;
  double hi = 1.0;
  while (g(hi) >= 0 && hi < t_hi) hi *= 4;
  if (g(hi) >= 0) return std::nullopt;  // no growth beyond the Nehari level
  double lo = hi;
  while (lo > t_lo) {
    lo /= 2;
    if (g(lo) > 0) break;
  }
  if (!(g(lo) > 0)) return std::nullopt;
  hi = std::min(hi, 2 * lo);
  while (g(hi) > 0) { lo = hi; hi *= 2; }
  for (int k = 0; k < 200 && hi - lo > 1e-14 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct Iteration {
  const Nonlinearity& f;
  double p;
  const HomotopyConfig& cfg;
  double c;  // t * lambda0
  InnerSolver solver;

  BranchPoint run(FixedPointMode mode, FeFunction u) const {
    BranchPoint bp;
    bp.mode_used = mode;
    const double u0 = u.sup_norm();
    const double ceiling = cfg.ceiling_factor * (1 + u0);
    double theta = mode == FixedPointMode::picard ? cfg.theta : 1.0;
    int last_sign = 0, flips = 0;
    double prev_sup = u0;

    for (int n = 0; n < cfg.max_outer; ++n) {
      FeFunction w = u;
      if (mode == FixedPointMode::nehari) {
        const double s = u.sup_norm();
        if (!(s > 0)) {
          bp.status = BranchStatus::trivial;
          bp.message = "nehari: zero iterate";
          break;
        }
        FeFunction unit(u.mesh, u.values / s);
        const auto t = nehari_scale(unit, f, p, c);
        if (!t) {
          bp.status = BranchStatus::diverged;
          bp.message = "nehari: no scaling reaches the Nehari set";
          break;
        }
        w.values = unit.values * *t;
      }
      const auto rep = solver.solve(nodal_load(w, f, p, cfg.Lambda, c), &w);
      ++bp.outer_iterations;
      if (!rep.converged) {
        bp.status = BranchStatus::inner_failure;
        bp.message = "inner solve failed: " + rep.message;
        break;
      }
      FeFunction next = u;
      next.values = (1 - theta) * u.values + theta * rep.solution.values.cwiseMax(0.0);
      const double sup = next.sup_norm();
      const double change = sup_abs(next.values - u.values);
      u = std::move(next);

      if (!std::isfinite(sup) || sup > ceiling) {
        bp.status = BranchStatus::diverged;
        bp.message = "sup-norm " + fmt(sup) + " above ceiling " + fmt(ceiling);
        break;
      }
      if (sup <= 10 * cfg.tol) {
        bp.status = BranchStatus::trivial;
        bp.message = "iterates collapsed to 0";
        break;
      }
      if (change <= cfg.tol * sup) {
        bp.status = BranchStatus::converged;
        break;
      }
      // damping: halve theta when the sup-norm keeps alternating
      const int sign = sup > prev_sup ? 1 : (sup < prev_sup ? -1 : 0);
      flips = (sign != 0 && sign == -last_sign) ? flips + 1 : 0;
      if (sign != 0) last_sign = sign;
      prev_sup = sup;
      if (mode == FixedPointMode::picard && flips >= 3 && theta > 1.0 / 64) {
        theta /= 2;
        flips = 0;
      }
    }
    if (bp.outer_iterations >= cfg.max_outer && bp.message.empty() && bp.status == BranchStatus::stalled)
      bp.message = "outer iteration budget exhausted";
    bp.theta_final = theta;
    bp.sup_norm = u.sup_norm();
    bp.solution = std::move(u);
    bp.residual = pde_residual(bp.solution, f, p, c);
    if (bp.status == BranchStatus::converged) {
      bool positive = true;
      const auto& mesh = *bp.solution.mesh;
      for (int i = 0; i < mesh.num_nodes(); ++i)
        if (!mesh.is_boundary(i) && !(bp.solution.values[i] > 0)) positive = false;
      if (bp.residual > cfg.residual_tol) {
        bp.status = BranchStatus::stalled;
        bp.message = "fixed point fails the residual gate (" + fmt(bp.residual) + ")";
      } else if (!positive) {
        bp.status = BranchStatus::stalled;
        bp.message = "fixed point not positive at interior nodes";
      } else {
        bp.converged = true;
      }
    }
    return bp;
  }
};

template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::future<void>> pending;
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(pending.size()) == threads) {
      pending.front().get();
      pending.erase(pending.begin());
    }
    pending.push_back(std::async(std::launch::async, [&fn, i] { fn(i); }));
  }
  for (auto& f : pending) f.get();
}

int thread_cap(int requested) {
  int cap = requested;
  if (const char* env = std::getenv("PLAPD_THREADS")) {
    const int e = std::atoi(env);
    if (e > 0) cap = std::min(cap, e);
  }
  return std::max(cap, 1);
}

}  // namespace

void HomotopyConfig::validate() const {
  if (!(theta > 0 && theta <= 1)) throw Error(ErrorKind::invalid_parameter, "theta must lie in (0, 1]");
  if (!(tol > 0)) throw Error(ErrorKind::invalid_parameter, "fixed-point tolerance must be > 0");
  if (max_outer < 1) throw Error(ErrorKind::invalid_parameter, "max_outer must be >= 1");
  if (!(Lambda >= 0)) throw Error(ErrorKind::invalid_parameter, "Lambda must be >= 0");
  if (!(lambda0 >= 0)) throw Error(ErrorKind::invalid_parameter, "lambda0 must be >= 0");
  if (!(ceiling_factor > 1)) throw Error(ErrorKind::invalid_parameter, "ceiling factor must be > 1");
  if (!(residual_tol > 0)) throw Error(ErrorKind::invalid_parameter, "residual tolerance must be > 0");
  if (t_grid.empty()) throw Error(ErrorKind::invalid_parameter, "t-grid is empty");
  for (double t : t_grid)
    if (!(t >= 0 && t <= 1)) throw Error(ErrorKind::invalid_parameter, "t-grid leaves [0, 1]");
  if (!monotone(t_grid)) throw Error(ErrorKind::invalid_parameter, "t-grid is not sorted");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > 0)) throw Error(ErrorKind::invalid_parameter, "lambda-grid must be positive");
    if (i && !(lambda_grid[i] > lambda_grid[i - 1]))
      throw Error(ErrorKind::invalid_parameter, "lambda-grid must be strictly increasing");
  }
}

SolveReport operator_K(const FeFunction& u, const Nonlinearity& f, double p, double Lambda, double t,
                       double lambda0, const InnerSolver* solver) {
  if (!u.mesh) throw Error(ErrorKind::invalid_input, "operator_K needs a mesh function");
  if ((u.values.array() < 0).any()) throw Error(ErrorKind::invalid_input, "operator_K expects u >= 0");
  const auto load = nodal_load(u, f, p, Lambda, t * lambda0);
  if ((load.array() < 0).any())
    throw Error(ErrorKind::invalid_parameter, "negative load: Lambda below the semipositivity bound");
  if (solver) return solver->solve(load, &u);
  return InnerSolver(u.mesh, p, Lambda).solve(load, &u);
}

double pde_residual(const FeFunction& u, const Nonlinearity& f, double p, double c) {
  InnerProblem prob;
  prob.mesh = u.mesh;
  prob.p = p;
  prob.load = nodal_load(u, f, p, 0.0, c);
  const auto g = energy_gradient(u, prob, 0.0);
  const auto& mesh = *u.mesh;
  const auto& m = mesh.lumped_mass();
  double r2 = 0, l2 = 0;
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    if (mesh.is_boundary(i)) continue;
    r2 += g[i] * g[i];
    l2 += std::pow(m[i] * prob.load[i], 2);
  }
  return std::sqrt(r2) / std::max(std::sqrt(l2), 1e-300);
}

BranchPoint fixed_point_solve(const Nonlinearity& f, double p, const HomotopyConfig& cfg, MeshPtr mesh, double t,
                              const FeFunction* start) {
  cfg.validate();
  if (!mesh) throw Error(ErrorKind::invalid_input, "fixed_point_solve needs a mesh");
  if (!(t >= 0 && t <= 1)) throw Error(ErrorKind::invalid_parameter, "t must lie in [0, 1]");
  const double c = t * cfg.lambda0;
  const Iteration it{f, p, cfg, c, InnerSolver(mesh, p, cfg.Lambda, cfg.inner)};

  FeFunction u0;
  if (start) {
    u0 = *start;
    u0.values = u0.values.cwiseMax(0.0);
  } else {
    // a positive load makes the Picard sequence from 0 monotone; otherwise
    // start from half the torsion scale along the eigenfunction
    u0 = FeFunction(mesh, Eigen::VectorXd::Zero(mesh->num_nodes()));
    if (!(f(0.0) + c > 0) || cfg.mode == FixedPointMode::nehari) {
      const double torsion = InnerSolver(mesh, p, 0.0, cfg.inner).solve(Eigen::VectorXd::Ones(mesh->num_nodes()))
                                 .solution.sup_norm();
      u0 = unit_bump(p, mesh, cfg.inner);
      u0.values *= 0.5 * torsion;
    }
  }

  BranchPoint out;
  if (cfg.mode != FixedPointMode::automatic) {
    out = it.run(cfg.mode, u0);
  } else {
    out = it.run(FixedPointMode::picard, u0);
    if (out.status == BranchStatus::trivial || out.status == BranchStatus::diverged) {
      FeFunction seed = u0;
      if (!(seed.sup_norm() > 0)) {
        seed = unit_bump(p, mesh, cfg.inner);
      }
      auto alt = it.run(FixedPointMode::nehari, seed);
      if (alt.converged) {
        alt.message = "picard " + std::string(to_string(out.status)) + "; nehari converged";
        alt.outer_iterations += out.outer_iterations;
        out = std::move(alt);
      } else {
        out.message += "; nehari: " + alt.message;
      }
    }
  }
  out.parameter = t;
  return out;
}

ProbeResult krasnoselskii_probe_a(const Nonlinearity& f, double p, double r, MeshPtr mesh,
                                  const std::vector<double>& s_samples, const HomotopyConfig& cfg,
                                  const EigenPair* eig) {
  if (!mesh) throw Error(ErrorKind::invalid_input, "probe needs a mesh");
  if (!(r > 0)) throw Error(ErrorKind::invalid_parameter, "probe radius must be > 0");
  for (double s : s_samples)
    if (!(s >= 0 && s <= 1)) throw Error(ErrorKind::invalid_parameter, "probe samples must lie in [0, 1]");

  ProbeResult out;
  out.s_samples = s_samples;
  EigenPair own;
  if (!eig) {
    EigenOptions eo;
    eo.inner = cfg.inner;
    own = first_eigenpair(p, mesh, eo);
    eig = &own;
  }
  out.lambda1 = eig->lambda;
  FeFunction phi = eig->phi;
  phi.values = phi.values.cwiseMax(0.0) / phi.sup_norm();

  for (int k = 0; k <= 40; ++k) {
    const double s = r * std::ldexp(1.0, -k);
    out.ratio_max = std::max(out.ratio_max, f(s) / std::pow(s, p - 1));
  }

  const InnerSolver solver(mesh, p, cfg.Lambda, cfg.inner);
  bool any = false;
  for (double s : s_samples) {
    bool near = false;
    if (s > 0) {  // s = 0 leaves u = 0 as the only solution
      FeFunction v(mesh, r * phi.values);
      for (int n = 0; n < 30 && !near; ++n) {
        const auto rep = operator_K(v, f, p, cfg.Lambda, 0.0, 0.0, &solver);
        if (!rep.converged) {
          out.note += "inner solve failed at s = " + fmt(s) + "; ";
          break;
        }
        FeFunction next(mesh, s * rep.solution.values.cwiseMax(0.0));
        const double sup = v.sup_norm();
        if (sup_abs(next.values - v.values) <= 0.1 * r && sup >= 0.9 * r && sup <= 1.1 * r) near = true;
        v = std::move(next);
        if (!(v.sup_norm() > 1e-3 * r) || v.sup_norm() > 1e3 * r) break;
      }
    }
    out.near_fixed_point.push_back(near);
    any = any || near;
  }
  if (any) {
    out.verdict = Verdict::fails;
    out.note += "near-fixed point of sK with sup-norm r";
  } else if (out.ratio_max < out.lambda1) {
    out.verdict = Verdict::holds;
  } else {
    out.note += "no near-fixed point but max f(s)/s^{p-1} >= lambda1";
  }
  return out;
}

BranchReport homotopy_branch(const Nonlinearity& f, double p, const HomotopyConfig& cfg, MeshPtr mesh) {
  cfg.validate();
  BranchReport out;
  HomotopyConfig c = cfg;
  if (c.mode == FixedPointMode::automatic) c.mode = FixedPointMode::nehari;
  const FeFunction* warm = nullptr;
  FeFunction last;
  bool all_diverged = true;
  for (double t : c.t_grid) {
    auto bp = fixed_point_solve(f, p, c, mesh, t, warm);
    if (bp.converged) {
      last = bp.solution;
      warm = &last;
    }
    // t = 0 does not see lambda0
    if (t > 0) all_diverged = all_diverged && bp.status == BranchStatus::diverged;
    out.points.push_back(std::move(bp));
  }
  out.threshold_exceeded = all_diverged && c.lambda0 > 0 && c.t_grid != std::vector<double>{0.0};
  out.message = all_diverged ? "every t > 0 diverged: lambda0 at or above the threshold" : "";
  return out;
}

LambdaMaxReport estimate_lambda_max(const Nonlinearity& f, double p, MeshPtr mesh, const HomotopyConfig& cfg,
                                    int bisection_steps) {
  cfg.validate();
  if (cfg.lambda_grid.empty()) throw Error(ErrorKind::invalid_parameter, "lambda-grid is empty");
  if (bisection_steps < 0) throw Error(ErrorKind::invalid_parameter, "bisection steps must be >= 0");
  LambdaMaxReport out;

  // solve at lambda via t = 1, lambda0 = lambda; Picard from 0 follows the minimal branch
  auto solve_at = [&](double lambda) {
    HomotopyConfig c = cfg;
    c.lambda0 = lambda;
    if (lambda > 0 && c.mode == FixedPointMode::automatic) c.mode = FixedPointMode::picard;
    // near the fold the iteration creeps in both directions; an exhausted
    // budget is not a verdict, so retry with a larger one
    auto bp = fixed_point_solve(f, p, c, mesh, 1.0);
    for (int retry = 0; retry < 2 && bp.status == BranchStatus::stalled && bp.outer_iterations >= c.max_outer; ++retry) {
      c.max_outer *= 4;
      bp = fixed_point_solve(f, p, c, mesh, 1.0);
    }
    bp.parameter = lambda;
    return bp;
  };

  out.evaluations.push_back(solve_at(0.0));
  const auto& grid = cfg.lambda_grid;
  std::vector<BranchPoint> at(grid.size());
  parallel_for(static_cast<int>(grid.size()), thread_cap(static_cast<int>(std::thread::hardware_concurrency())),
               [&](int i) { at[i] = solve_at(grid[i]); });

  std::optional<std::size_t> first_fail;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!at[i].converged && !first_fail) first_fail = i;
    if (at[i].converged && first_fail) out.monotone = false;
  }
  for (auto& bp : at) out.evaluations.push_back(std::move(bp));

  std::ostringstream msg;
  if (!out.evaluations.front().converged) msg << "lambda = 0 not solved (" << out.evaluations.front().message << "); ";
  if (!first_fail) {
    out.lower_bound_only = true;
    out.lower = grid.back();
    msg << "no failure up to lambda = " << grid.back() << ": lower bound only";
    out.message = msg.str();
    return out;
  }
  double lo = *first_fail ? grid[*first_fail - 1] : 0.0;
  double hi = grid[*first_fail];
  for (int k = 0; k < bisection_steps; ++k) {
    const double mid = 0.5 * (lo + hi);
    auto bp = solve_at(mid);
    (bp.converged ? lo : hi) = mid;
    out.evaluations.push_back(std::move(bp));
  }
  out.lower = lo;
  out.upper = hi;
  out.lambda_hat = 0.5 * (lo + hi);
  if (!out.monotone) msg << "anomaly: solvable again above the first failure; ";
  msg << "bracket [" << lo << ", " << hi << "]";
  out.message = msg.str();
  return out;
}

std::vector<AlphaRow> sweep_alpha(double p, int N, const std::vector<double>& alphas, double R, int threads) {
  if (!(p > 1 && p < N)) throw Error(ErrorKind::invalid_parameter, "sweep_alpha needs 1 < p < N");
  if (!(R > 0)) throw Error(ErrorKind::invalid_parameter, "radius must be > 0");
  std::vector<AlphaRow> rows(alphas.size());
  parallel_for(static_cast<int>(alphas.size()), thread_cap(threads), [&](int i) {
    AlphaRow& row = rows[i];
    row.alpha = alphas[i];
    try {
      const auto f = nonlinearities::log_critical(p, N, alphas[i]);
      const auto h3 = check_H3pp(f, p, N);
      const auto h4 = check_H4pp(f, p, N);
      row.h3pp = h3.verdict;
      row.h3pp_constant = h3.constant;
      row.h4pp = h4.verdict;
      const auto bvp = radial_solve_bvp(p, N, f, R);
      row.found = bvp.found;
      row.sup_norm = bvp.found ? bvp.m : 0.0;
      row.message = bvp.message;
    } catch (const std::exception& e) {
      row.message = e.what();
    }
  });
  return rows;
}

}  // namespace plapd
