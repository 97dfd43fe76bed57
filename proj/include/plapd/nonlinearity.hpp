#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "plapd/error.hpp"

namespace plapd {

/// Critical exponents of W^{1,p} in dimension N. Fields that need p < N are
/// empty when p >= N.
struct ExponentSet {
  double p = 2.0;
  int N = 2;
  std::optional<double> p_star;       // Np/(N-p)
  std::optional<double> p_lower;      // (N-1)p/(N-p)
  std::optional<double> p_star_conj;  // Np/(Np-N+p)
  double p_conj = 2.0;                // p/(p-1)
};

ExponentSet critical_exponents(double p, int N);

/// A nonlinearity f on [0, inf) with its primitive F and an optional
/// positive nonincreasing weight H.
class Nonlinearity {
 public:
  using Fn = std::function<double(double)>;

  Nonlinearity(std::string kind, Fn f, Fn primitive = {}, Fn weight = {},
               std::map<std::string, double> params = {});

  /// f(s); negative arguments are clamped to 0 (f lives on [0, inf)).
  double operator()(double s) const;
  /// F(s) = int_0^s f, closed form when known, adaptive quadrature otherwise.
  double primitive(double s) const;
  double primitive_by_quadrature(double s) const;
  bool has_closed_primitive() const { return static_cast<bool>(primitive_); }

  bool has_weight() const { return static_cast<bool>(weight_); }
  double weight(double s) const;

  const std::string& kind() const { return kind_; }
  const std::map<std::string, double>& params() const { return params_; }
  std::string name() const;

  /// f + c, keeping the closed primitive when present.
  Nonlinearity shifted(double c) const;

 private:
  std::string kind_;
  Fn f_;
  Fn primitive_;
  Fn weight_;
  std::map<std::string, double> params_;
};

namespace nonlinearities {
Nonlinearity power(double q);
/// s^q (2 + sin s)
Nonlinearity perturbed_power(double q);
/// s^{p*-1} / ln(e+s)^alpha with weight H(s) = 1/ln(e+s); needs p < N.
Nonlinearity log_critical(double p, int N, double alpha);
/// s^q + c s^{p-1}
Nonlinearity linear_at_zero(double q, double c, double p);
Nonlinearity constant(double c);
/// lambda s^{p-1}
Nonlinearity homogeneous(double lambda, double p);
/// s^{p*-1}
Nonlinearity critical_power(double p, int N);
Nonlinearity custom(std::string name, Nonlinearity::Fn f, Nonlinearity::Fn primitive = {});

/// Parses "power:q=3", "log-critical:alpha=3", "constant:c=1", ...
/// Throws invalid-parameter on unknown kinds or missing parameters.
Nonlinearity parse(const std::string& spec, double p, int N);
Nonlinearity from_params(const std::string& kind, const std::map<std::string, double>& params,
                         double p, int N);
}  // namespace nonlinearities

/// Geometric sample grid s = s0 * 2^(k / per_octave) used to estimate limits.
struct GridOptions {
  double s0 = 1.0;
  double s_max = 1152921504606846976.0;  // 2^60
  int per_octave = 1;
  double tail_fraction = 0.5;
  double floor = 1e-6;
};

struct CheckResult {
  Verdict verdict = Verdict::inconclusive;
  /// Witnessing constant for "holds" (tau, C_i, theta, ...).
  std::optional<double> constant;
  /// Sample point witnessing "fails".
  std::optional<double> witness;
  std::string note;
};

struct LambdaEstimate {
  Verdict verdict = Verdict::inconclusive;
  double value = 0.0;
  double argmin = 0.0;
  std::string note;
};

/// Smallest sampled Lambda >= 0 with f(s)/s^{p-1} >= -Lambda on
/// [1e-6, s_max], padded by 10%. Throws invalid-input if f(0) < 0.
LambdaEstimate estimate_Lambda(const Nonlinearity& f, double p, const GridOptions& grid = {});

CheckResult check_H1(const Nonlinearity& f, double p);
CheckResult check_H0(const Nonlinearity& f, double p, double lambda1, double margin = 1e-3);

struct H2Result {
  CheckResult result;
  std::optional<double> tau;
  std::optional<double> C1;
};
H2Result check_H2(const Nonlinearity& f, double p, const GridOptions& grid = {});

CheckResult check_H3(const Nonlinearity& f, const GridOptions& grid = {});
CheckResult check_H3p(const Nonlinearity& f, double p, int N, const GridOptions& grid = {});
/// Uses `weight` when given, otherwise the weight attached to f.
CheckResult check_H3pp(const Nonlinearity& f, double p, int N,
                       const Nonlinearity::Fn& weight = {}, const GridOptions& grid = {});

CheckResult check_H4(const Nonlinearity& f, const GridOptions& grid = {});
CheckResult check_H4p(const Nonlinearity& f, double p, int N, const GridOptions& grid = {});
CheckResult check_H4pp(const Nonlinearity& f, double p, int N,
                       const Nonlinearity::Fn& weight = {}, const GridOptions& grid = {});

struct H5Result {
  CheckResult result;
  std::optional<double> C4;
  std::optional<double> C5;
};
H5Result check_H5(const Nonlinearity& f, const GridOptions& grid = {}, int samples_per_interval = 64);

struct HypothesisReport {
  CheckResult h0, h1, h2, h3, h4, h3p, h4p, h3pp, h4pp, h5;
  std::optional<double> tau, C1, C2, C3, C4, C5, Lambda, theta;
  std::optional<double> lambda1;
  double s_max = 0.0;
  int samples = 0;
  double tail_fraction = 0.5;
};

/// Runs every check. H0 is inconclusive when lambda1 is not supplied;
/// H3'/H4'/H3''/H4'' are inconclusive when p >= N.
HypothesisReport classify(const Nonlinearity& f, double p, int N,
                          std::optional<double> lambda1 = std::nullopt,
                          const GridOptions& grid = {});

}  // namespace plapd
