#include "plapd/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace plapd {

ExponentSet critical_exponents(double p, int N) {
  if (!(p > 1)) throw Error(ErrorKind::invalid_parameter, "p must be > 1");
  if (N < 2) throw Error(ErrorKind::invalid_parameter, "N must be >= 2");
  ExponentSet e;
  e.p = p;
  e.N = N;
  e.p_conj = p / (p - 1);
  if (p < N) {
    e.p_star = N * p / (N - p);
    e.p_lower = (N - 1) * p / (N - p);
    e.p_star_conj = N * p / (N * p - N + p);
  }
  return e;
}

// ---------------------------------------------------------------- Nonlinearity

Nonlinearity::Nonlinearity(std::string kind, Fn f, Fn primitive, Fn weight,
                           std::map<std::string, double> params)
    : kind_(std::move(kind)),
      f_(std::move(f)),
      primitive_(std::move(primitive)),
      weight_(std::move(weight)),
      params_(std::move(params)) {
  if (!f_) throw Error(ErrorKind::invalid_input, "nonlinearity needs an evaluator");
}

double Nonlinearity::operator()(double s) const { return f_(std::max(s, 0.0)); }

double Nonlinearity::primitive(double s) const {
  if (s <= 0) return 0.0;
  return primitive_ ? primitive_(s) : primitive_by_quadrature(s);
}

double Nonlinearity::primitive_by_quadrature(double s) const {
  if (s <= 0) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  auto integrand = [this](double x) { return f_(x); };
  auto piece = [&](double a, double b) {
    return gauss_kronrod<double, 15>::integrate(integrand, a, b, 20, 1e-14);
  };
  if (s <= 1.0) return piece(0.0, s);
  // dyadic pieces keep every sub-integral well scaled for fast-growing f
  double total = piece(0.0, 1.0);
  double a = 1.0;
  while (a < s) {
    const double b = std::min(2 * a, s);
    total += piece(a, b);
    a = b;
  }
  return total;
}

double Nonlinearity::weight(double s) const {
  if (!weight_) throw Error(ErrorKind::invalid_input, "nonlinearity '" + name() + "' has no weight H");
  return weight_(std::max(s, 0.0));
}

std::string Nonlinearity::name() const {
  std::ostringstream os;
  os << kind_;
  char sep = ':';
  for (const auto& [k, v] : params_) {
    os << sep << k << "=" << v;
    sep = ',';
  }
  return os.str();
}

Nonlinearity Nonlinearity::shifted(double c) const {
  auto params = params_;
  params["shift"] = params.count("shift") ? params["shift"] + c : c;
  Fn f = [g = f_, c](double s) { return g(s) + c; };
  Fn F;
  if (primitive_) F = [G = primitive_, c](double s) { return G(s) + c * s; };
  return Nonlinearity(kind_, std::move(f), std::move(F), weight_, std::move(params));
}

namespace nonlinearities {

Nonlinearity power(double q) {
  if (!(q >= 0)) throw Error(ErrorKind::invalid_parameter, "power exponent must be >= 0");
  return Nonlinearity(
      "power", [q](double s) { return std::pow(s, q); },
      [q](double s) { return std::pow(s, q + 1) / (q + 1); }, {}, {{"q", q}});
}

Nonlinearity perturbed_power(double q) {
  if (!(q >= 0)) throw Error(ErrorKind::invalid_parameter, "power exponent must be >= 0");
  Nonlinearity::Fn F;
  if (q == std::floor(q) && q <= 20) {
    // int_0^s x^k sin x and x^k cos x by repeated integration by parts;
    // quadrature over millions of periods is not an option on the tail grid
    const int n = static_cast<int>(q);
    F = [n](double s) {
      const double sn = std::sin(s), cs = std::cos(s);
      double I = 1 - cs, J = sn;  // k = 0
      double sk = 1.0;
      for (int k = 1; k <= n; ++k) {
        sk *= s;
        const double In = -sk * cs + k * J;
        const double Jn = sk * sn - k * I;
        I = In;
        J = Jn;
      }
      return 2 * std::pow(s, n + 1) / (n + 1) + I;
    };
  }
  return Nonlinearity("perturbed-power", [q](double s) { return std::pow(s, q) * (2 + std::sin(s)); },
                      std::move(F), {}, {{"q", q}});
}

Nonlinearity log_critical(double p, int N, double alpha) {
  const auto e = critical_exponents(p, N);
  if (!e.p_star) throw Error(ErrorKind::invalid_parameter, "log-critical nonlinearity needs p < N");
  const double q = *e.p_star - 1;
  return Nonlinearity(
      "log-critical",
      [q, alpha](double s) { return std::pow(s, q) / std::pow(std::log(std::numbers::e + s), alpha); },
      {}, [](double s) { return 1.0 / std::log(std::numbers::e + s); },
      {{"alpha", alpha}, {"p", p}, {"N", double(N)}});
}

Nonlinearity linear_at_zero(double q, double c, double p) {
  return Nonlinearity(
      "linear-at-zero", [=](double s) { return std::pow(s, q) + c * std::pow(s, p - 1); },
      [=](double s) { return std::pow(s, q + 1) / (q + 1) + c * std::pow(s, p) / p; }, {},
      {{"q", q}, {"c", c}, {"p", p}});
}

Nonlinearity constant(double c) {
  return Nonlinearity("constant", [c](double) { return c; }, [c](double s) { return c * s; }, {},
                      {{"c", c}});
}

Nonlinearity homogeneous(double lambda, double p) {
  return Nonlinearity(
      "homogeneous", [=](double s) { return lambda * std::pow(s, p - 1); },
      [=](double s) { return lambda * std::pow(s, p) / p; }, {}, {{"lambda", lambda}, {"p", p}});
}

Nonlinearity critical_power(double p, int N) {
  const auto e = critical_exponents(p, N);
  if (!e.p_star) throw Error(ErrorKind::invalid_parameter, "critical power needs p < N");
  auto f = power(*e.p_star - 1);
  return Nonlinearity("critical-power", [f](double s) { return f(s); },
                      [f](double s) { return f.primitive(s); }, {}, {{"p", p}, {"N", double(N)}});
}

Nonlinearity custom(std::string name, Nonlinearity::Fn f, Nonlinearity::Fn primitive) {
  return Nonlinearity(std::move(name), std::move(f), std::move(primitive));
}

Nonlinearity from_params(const std::string& kind, const std::map<std::string, double>& params,
                         double p, int N) {
  auto get = [&](const char* key, std::optional<double> fallback = std::nullopt) {
    if (auto it = params.find(key); it != params.end()) return it->second;
    if (fallback) return *fallback;
    throw Error(ErrorKind::invalid_parameter, "nonlinearity '" + kind + "' needs parameter " + key);
  };
  Nonlinearity base = [&] {
    if (kind == "power") return power(get("q"));
    if (kind == "perturbed-power") return perturbed_power(get("q"));
    if (kind == "log-critical") return log_critical(p, N, get("alpha"));
    if (kind == "linear-at-zero") return linear_at_zero(get("q"), get("c"), p);
    if (kind == "constant") return constant(get("c", 1.0));
    if (kind == "homogeneous") return homogeneous(get("lambda"), p);
    if (kind == "critical-power") return critical_power(p, N);
    throw Error(ErrorKind::invalid_parameter, "unknown nonlinearity kind '" + kind + "'");
  }();
  if (auto it = params.find("shift"); it != params.end() && it->second != 0.0)
    return base.shifted(it->second);
  return base;
}

Nonlinearity parse(const std::string& spec, double p, int N) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  std::map<std::string, double> params;
  if (colon != std::string::npos) {
    std::stringstream rest(spec.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw Error(ErrorKind::invalid_parameter, "bad nonlinearity parameter '" + item + "'");
      try {
        params[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
      } catch (const std::exception&) {
        throw Error(ErrorKind::invalid_parameter, "bad number in '" + item + "'");
      }
    }
  }
  return from_params(kind, params, p, N);
}

}  // namespace nonlinearities

// ---------------------------------------------------------------- limit estimation

namespace {

constexpr double kDecayExponent = 0.25;  // (ln s)^-beta decay counted as -> 0
constexpr double kFlatExponent = 1e-3;

std::vector<double> geometric_grid(double s0, double s_max, int per_octave) {
  std::vector<double> s;
  for (int k = 0;; ++k) {
    const double v = s0 * std::exp2(double(k) / per_octave);
    if (v > s_max * (1 + 1e-12)) break;
    s.push_back(v);
  }
  return s;
}

struct Series {
  std::vector<double> s, r;
  bool truncated = false;  // non-finite values cut the grid short
};

// Ratio samples on the tail of the grid, stopping at the first non-finite value.
template <class Ratio>
Series tail_series(const GridOptions& g, Ratio ratio) {
  const auto grid = geometric_grid(g.s0, g.s_max, g.per_octave);
  std::vector<double> s, r;
  bool truncated = false;
  for (double x : grid) {
    const double v = ratio(x);
    if (!std::isfinite(v)) {
      truncated = true;
      break;
    }
    s.push_back(x);
    r.push_back(v);
  }
  const auto first = static_cast<std::size_t>(std::floor((1.0 - g.tail_fraction) * double(s.size())));
  Series out;
  out.s.assign(s.begin() + static_cast<long>(first), s.end());
  out.r.assign(r.begin() + static_cast<long>(first), r.end());
  out.truncated = truncated;
  return out;
}

struct Fit {
  double slope = 0.0;
  double stderr_ = 0.0;
};

Fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Fit f;
  f.slope = sxy / sxx;
  double ssr = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - my - f.slope * (x[i] - mx);
    ssr += e * e;
  }
  f.stderr_ = n > 2 ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
  return f;
}

// Slope of ln|r| against ln s.
Fit power_slope(const Series& t) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.s.size(); ++i) {
    x.push_back(std::log(t.s[i]));
    y.push_back(std::log(std::max(std::abs(t.r[i]), std::numeric_limits<double>::min())));
  }
  return least_squares(x, y);
}

// beta with |r| ~ (ln s)^-beta; catches logarithmically slow decay.
Fit log_decay(const Series& t) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.s.size(); ++i) {
    x.push_back(std::log(std::log(std::numbers::e + t.s[i])));
    y.push_back(std::log(std::max(std::abs(t.r[i]), std::numeric_limits<double>::min())));
  }
  auto f = least_squares(x, y);
  f.slope = -f.slope;
  return f;
}

constexpr std::size_t kMinTail = 4;

// liminf r > 0 from tail samples.
CheckResult liminf_positive(const Series& t, double floor) {
  CheckResult c;
  if (t.s.size() < kMinTail) {
    c.note = "tail too short (non-finite samples)";
    return c;
  }
  const auto it = std::min_element(t.r.begin(), t.r.end());
  const double m = *it;
  const double at = t.s[static_cast<std::size_t>(it - t.r.begin())];
  if (m <= floor) {
    c.verdict = Verdict::fails;
    c.witness = at;
    c.note = "tail minimum below floor";
    return c;
  }
  const auto decay = log_decay(t);
  if (decay.slope - 3 * decay.stderr_ > kDecayExponent) {
    c.verdict = Verdict::fails;
    c.witness = t.s.back();
    std::ostringstream os;
    os << "ratio decays like (ln s)^-" << decay.slope;
    c.note = os.str();
    return c;
  }
  c.verdict = Verdict::holds;
  c.constant = m;
  if (t.truncated) c.note = "grid truncated at first non-finite sample";
  return c;
}

// lim r = 0 from tail samples.
CheckResult tends_to_zero(const Series& t) {
  CheckResult c;
  if (t.s.size() < kMinTail) {
    c.note = "tail too short (non-finite samples)";
    return c;
  }
  // decade windows at both ends of the tail
  auto window_max = [&](bool last) {
    double m = 0.0;
    for (std::size_t i = 0; i < t.s.size(); ++i) {
      const bool in = last ? t.s[i] >= t.s.back() / 10 : t.s[i] <= t.s.front() * 10;
      if (in) m = std::max(m, std::abs(t.r[i]));
    }
    return m;
  };
  const double first = window_max(false), last = window_max(true);
  if (last < first / 10 && last < 1e-3) {
    c.verdict = Verdict::holds;
    c.constant = last;
    return c;
  }
  const auto decay = log_decay(t);
  std::ostringstream os;
  os << "log-decay exponent " << decay.slope << " +- " << decay.stderr_;
  c.note = os.str();
  if (decay.slope - 3 * decay.stderr_ >= kDecayExponent) {
    c.verdict = Verdict::holds;
    c.constant = last;
  } else if (decay.slope + 3 * decay.stderr_ <= kFlatExponent &&
             *std::min_element(t.r.begin(), t.r.end()) > 1e-3) {
    c.verdict = Verdict::fails;
    c.witness = t.s.back();
  }
  return c;
}

bool positive_on_tail(const Nonlinearity& f, const GridOptions& g, double* witness) {
  for (double s : geometric_grid(g.s0, g.s_max, g.per_octave)) {
    const double v = f(s);
    if (!std::isfinite(v)) break;
    if (s >= g.s0 * std::pow(g.s_max / g.s0, 1 - g.tail_fraction) && v <= 0) {
      *witness = s;
      return false;
    }
  }
  return true;
}

}  // namespace

LambdaEstimate estimate_Lambda(const Nonlinearity& f, double p, const GridOptions& grid) {
  if (f(0.0) < 0) throw Error(ErrorKind::invalid_input, "f(0) < 0 violates H1; Lambda is undefined");
  const auto s = geometric_grid(1e-6, grid.s_max, 4);
  std::vector<double> r;
  for (double x : s) r.push_back(f(x) / std::pow(x, p - 1));
  LambdaEstimate est;
  std::size_t imin = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!std::isfinite(r[i])) {
      est.note = "non-finite ratio at s = " + std::to_string(s[i]);
      return est;
    }
    if (r[i] < r[imin]) imin = i;
  }
  est.argmin = s[imin];
  const double m = r[imin];
  if (m >= 0) {
    est.verdict = Verdict::holds;
    est.value = 0.0;
    return est;
  }
  // a minimum at either end of the grid must have levelled off
  auto still_moving = [&](std::size_t i, std::size_t j) {
    return std::abs(r[i] - r[j]) > 1e-3 * (1 + std::abs(r[i]));
  };
  if ((imin == 0 && still_moving(0, 1)) || (imin + 1 == r.size() && still_moving(imin, imin - 1))) {
    est.note = "ratio still decreasing at the end of the grid";
    return est;
  }
  est.verdict = Verdict::holds;
  est.value = 1.1 * (-m);
  return est;
}

CheckResult check_H1(const Nonlinearity& f, double p) {
  CheckResult c;
  if (f(0.0) < 0) {
    c.verdict = Verdict::fails;
    c.witness = 0.0;
    c.note = "f(0) < 0";
    return c;
  }
  if (p > 2) {
    for (double s : geometric_grid(1e-8, 1e8, 2)) {
      if (!(f(s) > 0)) {
        c.verdict = Verdict::fails;
        c.witness = s;
        c.note = "p > 2 requires f > 0 on (0, inf)";
        return c;
      }
    }
  }
  // difference quotients on compacts can refute, never confirm, Lipschitz
  for (double K : {1.0, 10.0, 100.0}) {
    double q_coarse = 0, q_fine = 0, where = 0;
    for (int k = 0; k <= 2000; ++k) {
      const double x = K * k / 2000.0;
      const double qc = std::abs(f(x + 1e-3) - f(x)) / 1e-3;
      const double qf = std::abs(f(x + 1e-7) - f(x)) / 1e-7;
      if (!std::isfinite(qc) || !std::isfinite(qf)) {
        c.verdict = Verdict::fails;
        c.witness = x;
        c.note = "non-finite difference quotient";
        return c;
      }
      q_coarse = std::max(q_coarse, qc);
      if (qf > q_fine) {
        q_fine = qf;
        where = x;
      }
    }
    if (q_fine > 10 * q_coarse && q_fine > 1) {
      c.verdict = Verdict::fails;
      c.witness = where;
      c.note = "difference quotients unbounded on [0, " + std::to_string(K) + "]";
      return c;
    }
    c.constant = std::max(c.constant.value_or(0.0), q_fine);
  }
  c.verdict = Verdict::holds;
  c.note = "not refuted (Lipschitz bound is sampled, not proven)";
  return c;
}

CheckResult check_H0(const Nonlinearity& f, double p, double lambda1, double margin) {
  if (!(lambda1 > 0)) throw Error(ErrorKind::invalid_parameter, "check_H0 needs lambda1 > 0");
  CheckResult c;
  const auto s = geometric_grid(1e-8, 1e-2, 8);
  std::vector<double> tail;
  double tmax = -std::numeric_limits<double>::infinity(), arg = 0;
  for (double x : s) {
    if (x > 1e-7 * (1 + 1e-12)) break;
    const double r = f(x) / std::pow(x, p - 1);
    tail.push_back(r);
    if (r > tmax) {
      tmax = r;
      arg = x;
    }
  }
  const double tmin = *std::min_element(tail.begin(), tail.end());
  int turns = 0;
  for (std::size_t i = 2; i < tail.size(); ++i)
    if ((tail[i] - tail[i - 1]) * (tail[i - 1] - tail[i - 2]) < 0) ++turns;
  if (turns >= 2 && tmin > 0 && tmax / tmin > 10) {
    c.note = "oscillating ratio near 0";
    return c;
  }
  if (tmax < lambda1 * (1 - margin)) {
    c.verdict = Verdict::holds;
    c.constant = tmax;
  } else {
    c.verdict = Verdict::fails;
    c.witness = arg;
  }
  return c;
}

H2Result check_H2(const Nonlinearity& f, double p, const GridOptions& grid) {
  H2Result out;
  std::vector<bool> pass;
  std::vector<double> taus, mins;
  double last_witness = 0;
  for (int k = 0; k <= 10; ++k) {
    const double tau = std::ldexp(1.0, -k);
    const auto t = tail_series(grid, [&](double s) { return f(s) / std::pow(s, p - 1 + tau); });
    bool ok = t.s.size() >= kMinTail;
    double m = 0;
    if (ok) {
      const auto it = std::min_element(t.r.begin(), t.r.end());
      m = *it;
      last_witness = t.s[static_cast<std::size_t>(it - t.r.begin())];
      const auto fit = power_slope(t);
      const bool decaying = fit.slope < -std::max(1e-6, 3 * fit.stderr_);
      ok = m > grid.floor && !decaying;
      if (decaying) last_witness = t.s.back();
    }
    pass.push_back(ok);
    taus.push_back(tau);
    mins.push_back(m);
  }
  const auto first = std::find(pass.begin(), pass.end(), true);
  if (first == pass.end()) {
    out.result.verdict = Verdict::fails;
    out.result.witness = last_witness;
    out.result.note = "no tested tau gives a positive tail minimum";
    return out;
  }
  if (std::find(first, pass.end(), false) != pass.end()) {
    out.result.note = "non-monotone pass pattern over tau";
    return out;
  }
  const auto i = static_cast<std::size_t>(first - pass.begin());
  out.result.verdict = Verdict::holds;
  out.tau = taus[i];
  out.C1 = mins[i];
  out.result.constant = taus[i];
  return out;
}

CheckResult check_H3(const Nonlinearity& f, const GridOptions& grid) {
  double w = 0;
  if (!positive_on_tail(f, grid, &w)) return {Verdict::inconclusive, {}, w, "f <= 0 on the tail"};
  return liminf_positive(tail_series(grid, [&](double s) { return f.primitive(s) / (s * f(s)); }),
                         grid.floor);
}

CheckResult check_H3p(const Nonlinearity& f, double p, int N, const GridOptions& grid) {
  return check_H3pp(f, p, N, [](double) { return 1.0; }, grid);
}

CheckResult check_H3pp(const Nonlinearity& f, double p, int N, const Nonlinearity::Fn& weight,
                       const GridOptions& grid) {
  const auto e = critical_exponents(p, N);
  if (!e.p_star) return {Verdict::inconclusive, {}, {}, "needs p < N"};
  Nonlinearity::Fn H = weight;
  if (!H) {
    if (!f.has_weight()) throw Error(ErrorKind::invalid_input, "H3'' needs a weight H");
    H = [&f](double s) { return f.weight(s); };
  }
  double w = 0;
  if (!positive_on_tail(f, grid, &w)) return {Verdict::inconclusive, {}, w, "f <= 0 on the tail"};
  const double ps = *e.p_star;
  return liminf_positive(tail_series(grid,
                                     [&](double s) {
                                       const double sf = s * f(s);
                                       return (ps * f.primitive(s) - sf) / (H(s) * sf);
                                     }),
                         grid.floor);
}

CheckResult check_H4(const Nonlinearity& f, const GridOptions& grid) {
  CheckResult c;
  for (int k = 1; k <= 256; ++k) {
    const double theta = 0.25 * k;
    const auto t = tail_series(grid, [&](double s) { return std::abs(f(s)) / std::pow(s, theta); });
    if (t.truncated || t.s.size() < kMinTail) continue;
    const auto fit = power_slope(t);
    if (fit.slope <= std::max(1e-6, 3 * fit.stderr_)) {
      c.verdict = Verdict::holds;
      c.constant = theta;
      return c;
    }
  }
  c.verdict = Verdict::fails;
  c.witness = grid.s_max;
  c.note = "no theta <= 64 bounds |f(s)|/s^theta";
  return c;
}

CheckResult check_H4p(const Nonlinearity& f, double p, int N, const GridOptions& grid) {
  return check_H4pp(f, p, N, [](double) { return 1.0; }, grid);
}

CheckResult check_H4pp(const Nonlinearity& f, double p, int N, const Nonlinearity::Fn& weight,
                       const GridOptions& grid) {
  const auto e = critical_exponents(p, N);
  if (!e.p_star) return {Verdict::inconclusive, {}, {}, "needs p < N"};
  Nonlinearity::Fn H = weight;
  if (!H) {
    if (!f.has_weight()) throw Error(ErrorKind::invalid_input, "H4'' needs a weight H");
    H = [&f](double s) { return f.weight(s); };
  }
  const double q = *e.p_star - 1, k = p / (N - p);
  return tends_to_zero(
      tail_series(grid, [&](double s) { return f(s) / (std::pow(s, q) * std::pow(H(s), k)); }));
}

H5Result check_H5(const Nonlinearity& f, const GridOptions& grid, int samples_per_interval) {
  H5Result out;
  double w = 0;
  if (!positive_on_tail(f, grid, &w)) {
    out.result = {Verdict::inconclusive, {}, w, "f <= 0 on the tail"};
    return out;
  }
  const int m = std::max(samples_per_interval, 64);
  auto min_on = [&](double a, double b) {
    double v = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= m; ++i) v = std::min(v, f(a + (b - a) * i / m));
    return v;
  };
  auto max_on = [&](double a, double b) {
    double v = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= m; ++i) v = std::max(v, f(a + (b - a) * i / m));
    return v;
  };
  const auto low = tail_series(grid, [&](double s) { return min_on(s / 2, s) / f(s); });
  const auto high = tail_series(grid, [&](double s) {
    double v = f(0.0);
    double b = s;
    for (int j = 0; j < 40; ++j, b /= 2) v = std::max(v, max_on(b / 2, b));
    return std::max(v, max_on(0.0, b)) / f(s);
  });
  if (low.s.size() < kMinTail || high.s.size() < kMinTail) {
    out.result.note = "tail too short (non-finite samples)";
    return out;
  }
  const auto lo_it = std::min_element(low.r.begin(), low.r.end());
  const double c4 = *lo_it;
  const double c5 = *std::max_element(high.r.begin(), high.r.end());
  const auto growth = power_slope(high);
  if (c4 <= grid.floor) {
    out.result.verdict = Verdict::fails;
    out.result.witness = low.s[static_cast<std::size_t>(lo_it - low.r.begin())];
    out.result.note = "min over [s/2, s] not comparable to f(s)";
  } else if (growth.slope > std::max(1e-6, 3 * growth.stderr_)) {
    out.result.verdict = Verdict::fails;
    out.result.witness = high.s.back();
    out.result.note = "max over [0, s] outgrows f(s)";
  } else {
    out.result.verdict = Verdict::holds;
    out.result.constant = c4;
    out.C4 = c4;
    out.C5 = c5;
  }
  return out;
}

HypothesisReport classify(const Nonlinearity& f, double p, int N, std::optional<double> lambda1,
                          const GridOptions& grid) {
  HypothesisReport r;
  r.lambda1 = lambda1;
  r.s_max = grid.s_max;
  r.samples = static_cast<int>(geometric_grid(grid.s0, grid.s_max, grid.per_octave).size());
  r.tail_fraction = grid.tail_fraction;

  r.h1 = check_H1(f, p);
  if (lambda1) r.h0 = check_H0(f, p, *lambda1);
  else r.h0.note = "lambda1 not supplied";

  if (f(0.0) >= 0) {
    const auto lam = estimate_Lambda(f, p, grid);
    if (lam.verdict == Verdict::holds) r.Lambda = lam.value;
  }

  const auto h2 = check_H2(f, p, grid);
  r.h2 = h2.result;
  r.tau = h2.tau;
  r.C1 = h2.C1;

  r.h3 = check_H3(f, grid);
  if (r.h3.verdict == Verdict::holds) r.C2 = r.h3.constant;
  r.h4 = check_H4(f, grid);
  if (r.h4.verdict == Verdict::holds) r.theta = r.h4.constant;

  r.h3p = check_H3p(f, p, N, grid);
  if (r.h3p.verdict == Verdict::holds) r.C3 = r.h3p.constant;
  r.h4p = check_H4p(f, p, N, grid);
  if (f.has_weight()) {
    r.h3pp = check_H3pp(f, p, N, {}, grid);
    r.h4pp = check_H4pp(f, p, N, {}, grid);
  } else {
    r.h3pp.note = r.h4pp.note = "no weight H attached";
  }

  const auto h5 = check_H5(f, grid);
  r.h5 = h5.result;
  r.C4 = h5.C4;
  r.C5 = h5.C5;
  return r;
}

}  // namespace plapd
