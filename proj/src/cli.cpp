#include "plapd/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <boost/version.hpp>
#include <Eigen/Core>
#include <tomlplusplus/toml.hpp>

#include "plapd/error.hpp"
#include "plapd/io.hpp"

namespace plapd::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

constexpr const char* kVersion = PLAPD_VERSION;

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ------------------------------------------------------------------ config

struct DomainConfig {
  std::string kind = "disc";  // disc | square | polygon | regular
  double radius = 1.0;
  double h = 0.05;
  int sides = 6;
  std::vector<Point> vertices;
};

struct IdentityConfig {
  double pohozaev_tol = 0.05;
  double picone_tol = 0.02;
  double energy_tol = 0.01;
  double comparison_tol = 1e-6;
  double delta = 0.2;
  std::string flux = "element";
  int seeds = 20;
};

struct ExistConfig {
  std::string mode = "single";  // single | homotopy | lambda-sweep | alpha-sweep
  std::string iteration = "automatic";
  double Lambda = 0.0;
  double theta = 0.5;
  double tol = 1e-8;
  int max_outer = 500;
  double lambda0 = 0.0;
  std::vector<double> t_grid = {1.0, 0.75, 0.5, 0.25, 0.0};
  std::vector<double> lambda_grid = {1, 2, 4, 8, 16};
  double ceiling_factor = 1e6;
  double residual_tol = 1e-5;
  int bisection_steps = 8;
};

struct Config {
  std::string f = "power:q=3";
  double p = 2.0;
  int N = 2;
  std::int64_t seed = 1;
  DomainConfig domain;
  SolverSettings solver;
  double eigen_tol = 1e-10;
  int eigen_max_iter = 300;
  IdentityConfig identities;
  ExistConfig exist;
  std::vector<double> alphas = {2.5, 3.0, 4.0};
  double R = 1.0;
  int threads = 1;
  std::vector<double> h_values = {0.1, 0.05, 0.025};
  std::optional<double> lambda1;
  std::vector<std::string> require;
  bool radial_eigen = false;
  int grid_points = 2000;
};

// Typed access to one TOML table; unknown keys are schema errors.
class Reader {
 public:
  Reader(const toml::table& t, std::string where) : t_(t), where_(std::move(where)) {}

  void number(const char* key, double& out) {
    if (auto n = node(key)) {
      if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer())) out = *v;
      else fail(key, "a number");
    }
  }
  template <class Int>
  void integer(const char* key, Int& out) {
    if (auto n = node(key)) {
      if (auto v = n->as_integer()) out = static_cast<Int>(v->get());
      else fail(key, "an integer");
    }
  }
  void string(const char* key, std::string& out) {
    if (auto n = node(key)) {
      if (auto v = n->as_string()) out = v->get();
      else fail(key, "a string");
    }
  }
  void boolean(const char* key, bool& out) {
    if (auto n = node(key)) {
      if (auto v = n->as_boolean()) out = v->get();
      else fail(key, "a boolean");
    }
  }
  void numbers(const char* key, std::vector<double>& out) {
    if (auto n = node(key)) {
      auto a = n->as_array();
      if (!a) fail(key, "an array of numbers");
      out.clear();
      for (const auto& e : *a) {
        auto v = e.value<double>();
        if (!v || !(e.is_floating_point() || e.is_integer())) fail(key, "an array of numbers");
        out.push_back(*v);
      }
    }
  }
  void strings(const char* key, std::vector<std::string>& out) {
    if (auto n = node(key)) {
      auto a = n->as_array();
      if (!a) fail(key, "an array of strings");
      out.clear();
      for (const auto& e : *a) {
        auto v = e.as_string();
        if (!v) fail(key, "an array of strings");
        out.push_back(v->get());
      }
    }
  }
  void points(const char* key, std::vector<Point>& out) {
    if (auto n = node(key)) {
      auto a = n->as_array();
      if (!a) fail(key, "an array of [x, y] pairs");
      out.clear();
      for (const auto& e : *a) {
        auto pair = e.as_array();
        if (!pair || pair->size() != 2) fail(key, "an array of [x, y] pairs");
        auto x = (*pair)[0].value<double>(), y = (*pair)[1].value<double>();
        if (!x || !y) fail(key, "an array of [x, y] pairs");
        out.emplace_back(*x, *y);
      }
    }
  }
  std::optional<Reader> table(const char* key) {
    if (auto n = node(key)) {
      if (auto t = n->as_table()) return Reader(*t, where_ + key + ".");
      fail(key, "a table");
    }
    return std::nullopt;
  }
  const toml::node* raw(const char* key) { return node(key); }

  void finish() const {
    for (const auto& [k, v] : t_)
      if (!seen_.count(std::string(k.str())))
        throw SchemaError("unknown configuration key '" + where_ + std::string(k.str()) + "'");
  }

 private:
  const toml::node* node(const char* key) {
    seen_.insert(key);
    return t_.get(key);
  }
  [[noreturn]] void fail(const char* key, const char* what) const {
    throw SchemaError("configuration key '" + where_ + key + "' must be " + what);
  }

  const toml::table& t_;
  std::string where_;
  std::set<std::string> seen_;
};

std::string format_number(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

// f = "kind:k=v" or f = { kind = "...", k = v }
std::string read_f(Reader& r) {
  const toml::node* n = r.raw("f");
  if (!n) return {};
  if (auto s = n->as_string()) return s->get();
  auto t = n->as_table();
  if (!t) throw SchemaError("configuration key 'f' must be a string or a table");
  std::string kind;
  std::vector<std::string> params;
  for (const auto& [k, v] : *t) {
    const std::string key(k.str());
    if (key == "kind") {
      auto s = v.as_string();
      if (!s) throw SchemaError("configuration key 'f.kind' must be a string");
      kind = s->get();
    } else {
      auto d = v.value<double>();
      if (!d || !(v.is_floating_point() || v.is_integer()))
        throw SchemaError("configuration key 'f." + key + "' must be a number");
      params.push_back(key + "=" + format_number(*d));
    }
  }
  if (kind.empty()) throw SchemaError("configuration key 'f.kind' is required");
  std::string spec = kind;
  for (std::size_t i = 0; i < params.size(); ++i) spec += (i ? "," : ":") + params[i];
  return spec;
}

void load_toml(const std::string& path, Config& c) {
  if (!fs::exists(path)) throw SchemaError("configuration file '" + path + "' not found");
  toml::table root;
  try {
    root = toml::parse_file(path);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "configuration parse error: " << e.description() << " (" << e.source().begin << ")";
    throw SchemaError(os.str());
  }
  if (root.empty()) throw SchemaError("configuration file '" + path + "' is empty");

  Reader r(root, "");
  if (auto f = read_f(r); !f.empty()) c.f = f;
  r.number("p", c.p);
  r.integer("N", c.N);
  r.integer("seed", c.seed);
  if (auto d = r.table("domain")) {
    d->string("kind", c.domain.kind);
    d->number("radius", c.domain.radius);
    d->number("h", c.domain.h);
    d->integer("sides", c.domain.sides);
    d->points("vertices", c.domain.vertices);
    d->finish();
  }
  if (auto s = r.table("solver")) {
    s->number("tol", c.solver.tol);
    s->integer("max_iter", c.solver.max_iter);
    s->number("eps_final", c.solver.eps_final);
    s->finish();
  }
  if (auto e = r.table("eigen")) {
    e->number("tol", c.eigen_tol);
    e->integer("max_iter", c.eigen_max_iter);
    e->finish();
  }
  if (auto i = r.table("identities")) {
    i->number("pohozaev_tol", c.identities.pohozaev_tol);
    i->number("picone_tol", c.identities.picone_tol);
    i->number("energy_tol", c.identities.energy_tol);
    i->number("comparison_tol", c.identities.comparison_tol);
    i->number("delta", c.identities.delta);
    i->string("flux", c.identities.flux);
    i->integer("seeds", c.identities.seeds);
    i->finish();
  }
  if (auto e = r.table("existence")) {
    e->string("mode", c.exist.mode);
    e->string("iteration", c.exist.iteration);
    e->number("Lambda", c.exist.Lambda);
    e->number("theta", c.exist.theta);
    e->number("tol", c.exist.tol);
    e->integer("max_outer", c.exist.max_outer);
    e->number("lambda0", c.exist.lambda0);
    e->numbers("t_grid", c.exist.t_grid);
    e->numbers("lambda_grid", c.exist.lambda_grid);
    e->number("ceiling_factor", c.exist.ceiling_factor);
    e->number("residual_tol", c.exist.residual_tol);
    e->integer("bisection_steps", c.exist.bisection_steps);
    e->finish();
  }
  if (auto s = r.table("sweep")) {
    s->numbers("alphas", c.alphas);
    s->numbers("h_values", c.h_values);
    s->number("R", c.R);
    s->integer("threads", c.threads);
    s->finish();
  }
  if (auto o = r.table("radial")) {
    o->number("R", c.R);
    o->boolean("eigen", c.radial_eigen);
    o->integer("grid_points", c.grid_points);
    o->finish();
  }
  if (auto h = r.table("hypotheses")) {
    double l1 = 0;
    if (h->raw("lambda1")) {
      h->number("lambda1", l1);
      c.lambda1 = l1;
    }
    h->strings("require", c.require);
    h->finish();
  }
  r.finish();
}

toml::array to_toml(const std::vector<double>& v) {
  toml::array a;
  for (double x : v) a.push_back(x);
  return a;
}

toml::table to_toml(const Config& c) {
  toml::array verts;
  for (const auto& p : c.domain.vertices) verts.push_back(toml::array{p.x(), p.y()});
  toml::array req;
  for (const auto& s : c.require) req.push_back(s);
  toml::table hyp{{"require", req}};
  if (c.lambda1) hyp.insert("lambda1", *c.lambda1);
  return toml::table{
      {"f", c.f},
      {"p", c.p},
      {"N", c.N},
      {"seed", c.seed},
      {"domain", toml::table{{"kind", c.domain.kind},
                             {"radius", c.domain.radius},
                             {"h", c.domain.h},
                             {"sides", c.domain.sides},
                             {"vertices", verts}}},
      {"solver", toml::table{{"tol", c.solver.tol}, {"max_iter", c.solver.max_iter}, {"eps_final", c.solver.eps_final}}},
      {"eigen", toml::table{{"tol", c.eigen_tol}, {"max_iter", c.eigen_max_iter}}},
      {"identities", toml::table{{"pohozaev_tol", c.identities.pohozaev_tol},
                                 {"picone_tol", c.identities.picone_tol},
                                 {"energy_tol", c.identities.energy_tol},
                                 {"comparison_tol", c.identities.comparison_tol},
                                 {"delta", c.identities.delta},
                                 {"flux", c.identities.flux},
                                 {"seeds", c.identities.seeds}}},
      {"existence", toml::table{{"mode", c.exist.mode},
                                {"iteration", c.exist.iteration},
                                {"Lambda", c.exist.Lambda},
                                {"theta", c.exist.theta},
                                {"tol", c.exist.tol},
                                {"max_outer", c.exist.max_outer},
                                {"lambda0", c.exist.lambda0},
                                {"t_grid", to_toml(c.exist.t_grid)},
                                {"lambda_grid", to_toml(c.exist.lambda_grid)},
                                {"ceiling_factor", c.exist.ceiling_factor},
                                {"residual_tol", c.exist.residual_tol},
                                {"bisection_steps", c.exist.bisection_steps}}},
      {"sweep", toml::table{{"alphas", to_toml(c.alphas)},
                            {"h_values", to_toml(c.h_values)},
                            {"R", c.R},
                            {"threads", c.threads}}},
      {"radial", toml::table{{"eigen", c.radial_eigen}, {"grid_points", c.grid_points}}},
      {"hypotheses", hyp},
  };
}

json to_json_config(const Config& c) {
  std::ostringstream os;
  os << toml::json_formatter{to_toml(c)};
  return json::parse(os.str());
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

void validate(const Config& c) {
  if (!(c.p > 1)) throw SchemaError("p must be > 1");
  if (c.N < 2) throw SchemaError("N must be >= 2");
  static const std::set<std::string> kinds = {"disc", "square", "polygon", "regular"};
  if (!kinds.count(c.domain.kind)) throw SchemaError("domain.kind must be one of disc, square, polygon, regular");
  if (!(c.domain.h > 0)) throw SchemaError("domain.h must be > 0");
  if (!(c.domain.radius > 0)) throw SchemaError("domain.radius must be > 0");
  if (c.domain.kind == "polygon" && c.domain.vertices.size() < 3)
    throw SchemaError("domain.vertices needs at least 3 points");
  if (c.domain.kind == "regular" && c.domain.sides < 3) throw SchemaError("domain.sides must be >= 3");
  if (!(c.solver.tol > 0) || c.solver.max_iter < 1) throw SchemaError("solver.tol must be > 0 and max_iter >= 1");
  if (c.identities.flux != "element" && c.identities.flux != "variational")
    throw SchemaError("identities.flux must be element or variational");
  if (c.identities.seeds < 0) throw SchemaError("identities.seeds must be >= 0");
  static const std::set<std::string> modes = {"single", "homotopy", "lambda-sweep", "alpha-sweep"};
  if (!modes.count(c.exist.mode)) throw SchemaError("existence.mode must be single, homotopy, lambda-sweep or alpha-sweep");
  static const std::set<std::string> its = {"picard", "nehari", "automatic"};
  if (!its.count(c.exist.iteration)) throw SchemaError("existence.iteration must be picard, nehari or automatic");
  if (c.h_values.empty()) throw SchemaError("sweep.h_values is empty");
  for (double h : c.h_values)
    if (!(h > 0)) throw SchemaError("sweep.h_values must be positive");
  if (c.threads < 1) throw SchemaError("sweep.threads must be >= 1");
  if (c.grid_points < 3) throw SchemaError("radial.grid_points must be >= 3");
  static const std::set<std::string> hyps = {"h0", "h1", "h2", "h3", "h4", "h3p", "h4p", "h3pp", "h4pp", "h5"};
  for (const auto& h : c.require)
    if (!hyps.count(h)) throw SchemaError("unknown hypothesis '" + h + "' in require");
}

// ------------------------------------------------------------------ run directory

// All files of one run go through this writer.
class RunWriter {
 public:
  explicit RunWriter(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void text(const std::string& name, const std::string& content) {
    std::ofstream os(dir_ / name, std::ios::binary);
    os << content;
    if (!os) throw std::runtime_error("cannot write " + (dir_ / name).string());
    files_.push_back(name);
  }
  void json_file(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }

  const fs::path& dir() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

fs::path default_run_dir() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  localtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y%m%d-%H%M%S");
  fs::path base = fs::path("runs") / os.str();
  fs::path dir = base;
  for (int k = 1; fs::exists(dir); ++k) dir = base.string() + "-" + std::to_string(k);
  return dir;
}

// ------------------------------------------------------------------ commands

struct Outcome {
  json report = json::object();
  std::map<std::string, bool> gates;
  json mesh = nullptr;
};

MeshPtr make_mesh(const DomainConfig& d, double h) {
  if (d.kind == "disc") return mesh_disc(d.radius, h);
  if (d.kind == "square") return mesh_polygon(unit_square(), h);
  if (d.kind == "regular") return mesh_polygon(regular_polygon(d.sides, d.radius), h);
  return mesh_polygon(d.vertices, h);
}

HomotopyConfig homotopy(const Config& c) {
  HomotopyConfig h;
  h.Lambda = c.exist.Lambda;
  h.theta = c.exist.theta;
  h.tol = c.exist.tol;
  h.max_outer = c.exist.max_outer;
  h.lambda0 = c.exist.lambda0;
  h.t_grid = c.exist.t_grid;
  h.lambda_grid = c.exist.lambda_grid;
  h.ceiling_factor = c.exist.ceiling_factor;
  h.residual_tol = c.exist.residual_tol;
  h.mode = c.exist.iteration == "picard"   ? FixedPointMode::picard
           : c.exist.iteration == "nehari" ? FixedPointMode::nehari
                                           : FixedPointMode::automatic;
  h.inner = c.solver;
  return h;
}

EigenOptions eigen_options(const Config& c) {
  EigenOptions e;
  e.tol = c.eigen_tol;
  e.max_iter = c.eigen_max_iter;
  e.inner = c.solver;
  return e;
}

Nonlinearity nonlinearity(const Config& c) { return nonlinearities::parse(c.f, c.p, c.N); }

// Identity reports on a positive solution; returns name -> report.
std::map<std::string, IdentityReport> identity_suite(const FeFunction& u, const Nonlinearity& f, const Config& c,
                                                     const EigenPair& eig) {
  std::map<std::string, IdentityReport> out;
  out["energy_identity"] = energy_identity_residual(u, f, c.p, c.identities.energy_tol);
  PohozaevOptions po;
  po.tol = c.identities.pohozaev_tol;
  po.flux = c.identities.flux == "variational" ? BoundaryFlux::variational : BoundaryFlux::element;
  out["pohozaev"] = pohozaev_residual(u, f, c.p, po);
  bool positive = true;
  for (int i : u.mesh->interior_nodes()) positive = positive && u.values[i] > 0;
  if (positive) {
    out["picone"] = picone_value(u, f, c.p, eig, c.identities.picone_tol);
    out["hopf"] = hopf_boundary_check(u);
    out["monotonicity"] = monotonicity_diagnostic(u);
    out["boundary_gradient_bound"] = boundary_gradient_bound(u, f, c.p, c.identities.delta, 0.05, c.solver);
  }
  return out;
}

Outcome cmd_solve(const Config& c, RunWriter& w) {
  Outcome o;
  const auto f = nonlinearity(c);
  auto mesh = make_mesh(c.domain, c.domain.h);
  o.mesh = io::mesh_stats(*mesh);
  const auto bp = fixed_point_solve(f, c.p, homotopy(c), mesh, 0.0);
  o.report["solution"] = io::to_json(bp);
  o.gates["converged"] = bp.converged;
  w.text("solution.csv", io::nodal_csv(bp.solution));
  w.json_file("solution.json", io::solution_document(bp.solution, c.p, c.f));
  if (bp.converged) {
    const auto eig = first_eigenpair(c.p, mesh, eigen_options(c));
    o.report["lambda1"] = eig.lambda;
    json ids = json::object();
    for (const auto& [name, rep] : identity_suite(bp.solution, f, c, eig)) {
      ids[name] = io::to_json(rep);
      if (name == "energy_identity" || name == "picone" || name == "hopf") o.gates[name] = rep.pass;
    }
    o.report["identities"] = ids;
  }
  return o;
}

Outcome cmd_eigen(const Config& c, RunWriter& w) {
  Outcome o;
  auto mesh = make_mesh(c.domain, c.domain.h);
  o.mesh = io::mesh_stats(*mesh);
  const auto e = first_eigenpair(c.p, mesh, eigen_options(c));
  o.report["eigenpair"] = io::to_json(e);
  bool nonneg = true;
  for (int i : mesh->interior_nodes()) nonneg = nonneg && e.phi.values[i] >= 0;
  const double norm = lumped_lp_norm(e.phi, c.p);
  o.report["phi_lumped_norm"] = norm;
  o.gates["converged"] = e.converged;
  o.gates["nonnegative"] = nonneg;
  o.gates["unit_norm"] = std::abs(norm - 1) <= 1e-9;
  if (c.domain.kind == "disc") {
    const double oracle = radial_eigen(c.p, 2, c.domain.radius);
    o.report["radial_oracle"] = oracle;
    o.report["relative_to_oracle"] = (e.lambda - oracle) / oracle;
  }
  w.text("phi.csv", io::nodal_csv(e.phi));
  return o;
}

Outcome cmd_verify(const Config& c, RunWriter& w, const std::string& solution_path) {
  Outcome o;
  Config cc = c;
  FeFunction u;
  if (!solution_path.empty()) {
    std::ifstream is(solution_path);
    if (!is) throw SchemaError("cannot open solution file '" + solution_path + "'");
    json doc;
    try {
      doc = json::parse(is);
    } catch (const json::exception& e) {
      throw SchemaError(std::string("solution file is not JSON: ") + e.what());
    }
    u = io::read_solution(doc, &cc.p, &cc.f);
    o.report["source"] = solution_path;
  } else {
    const auto bp = fixed_point_solve(nonlinearity(cc), cc.p, homotopy(cc), make_mesh(cc.domain, cc.domain.h), 0.0);
    o.gates["converged"] = bp.converged;
    o.report["solution"] = io::to_json(bp);
    u = bp.solution;
    if (!bp.converged) return o;
  }
  o.mesh = io::mesh_stats(*u.mesh);
  const auto f = nonlinearity(cc);
  const auto eig = first_eigenpair(cc.p, u.mesh, eigen_options(cc));
  json ids = json::object();
  const auto suite = identity_suite(u, f, cc, eig);
  for (const auto& [name, rep] : suite) {
    ids[name] = io::to_json(rep);
    o.gates[name] = rep.pass;
  }
  if (!suite.count("picone")) o.gates["positive"] = false;
  // comparison on seeded ordered loads
  json cmp = json::array();
  bool all = true;
  for (int k = 0; k < cc.identities.seeds; ++k) {
    const auto seed = static_cast<std::uint32_t>(cc.seed + k);
    const Eigen::VectorXd g1 = random_smooth_load(*u.mesh, seed);
    const Eigen::VectorXd g2 = g1 + random_smooth_load(*u.mesh, seed + 1000, 0.5);
    const auto r = comparison_check(g1, g2, cc.p, u.mesh, cc.identities.comparison_tol, cc.solver);
    cmp.push_back({{"seed", seed}, {"pass", r.pass}, {"relative", r.relative}});
    all = all && r.pass;
  }
  ids["comparison"] = cmp;
  if (cc.identities.seeds > 0) o.gates["comparison"] = all;
  o.report["identities"] = ids;
  o.report["lambda1"] = eig.lambda;
  w.json_file("identities.json", ids);
  return o;
}

Outcome cmd_hypotheses(const Config& c, RunWriter&) {
  Outcome o;
  const auto f = nonlinearity(c);
  const auto h = classify(f, c.p, c.N, c.lambda1);
  o.report["f"] = f.name();
  o.report["hypotheses"] = io::to_json(h);
  const std::map<std::string, const CheckResult*> by_name = {
      {"h0", &h.h0},   {"h1", &h.h1},   {"h2", &h.h2},     {"h3", &h.h3},     {"h4", &h.h4},
      {"h3p", &h.h3p}, {"h4p", &h.h4p}, {"h3pp", &h.h3pp}, {"h4pp", &h.h4pp}, {"h5", &h.h5}};
  for (const auto& name : c.require) o.gates[name] = by_name.at(name)->verdict == Verdict::holds;
  return o;
}

Outcome cmd_exist(const Config& c, RunWriter& w) {
  Outcome o;
  const auto f = nonlinearity(c);
  const auto cfg = homotopy(c);
  if (c.exist.mode == "alpha-sweep") {
    json rows = json::array();
    for (const auto& r : sweep_alpha(c.p, c.N, c.alphas, c.R, c.threads)) rows.push_back(io::to_json(r));
    o.report["alpha_sweep"] = rows;
    return o;
  }
  auto mesh = make_mesh(c.domain, c.domain.h);
  o.mesh = io::mesh_stats(*mesh);
  if (c.exist.mode == "single") {
    const auto bp = fixed_point_solve(f, c.p, cfg, mesh, 0.0);
    o.report["branch_point"] = io::to_json(bp);
    o.gates["converged"] = bp.converged;
    w.text("solution.csv", io::nodal_csv(bp.solution));
    w.json_file("solution.json", io::solution_document(bp.solution, c.p, c.f));
    if (bp.converged) {
      const auto eig = first_eigenpair(c.p, mesh, eigen_options(c));
      const auto pic = picone_value(bp.solution, f, c.p, eig, c.identities.picone_tol);
      const auto en = energy_identity_residual(bp.solution, f, c.p, c.identities.energy_tol);
      o.report["picone"] = io::to_json(pic);
      o.report["energy_identity"] = io::to_json(en);
      o.gates["picone"] = pic.pass;
      o.gates["energy_identity"] = en.pass;
    }
  } else if (c.exist.mode == "homotopy") {
    const auto br = homotopy_branch(f, c.p, cfg, mesh);
    o.report["branch"] = io::to_json(br);
    bool all = !br.points.empty();
    for (const auto& b : br.points) all = all && b.converged;
    o.gates["branch_converged"] = all;
  } else {
    if (cfg.lambda_grid.empty()) throw SchemaError("lambda-sweep needs a nonempty lambda grid");
    const auto lm = estimate_lambda_max(f, c.p, mesh, cfg, c.exist.bisection_steps);
    o.report["lambda_max"] = io::to_json(lm);
    o.gates["solvable_at_zero"] = lm.evaluations.front().converged;
    bool clean = true;
    for (const auto& e : lm.evaluations) clean = clean && e.status != BranchStatus::inner_failure;
    o.gates["inner_solves"] = clean;
  }
  return o;
}

Outcome cmd_radial(const Config& c, RunWriter& w) {
  Outcome o;
  if (c.radial_eigen) {
    o.report["lambda1"] = radial_eigen(c.p, c.N, c.R);
    return o;
  }
  BvpOptions bo;
  bo.grid_points = c.grid_points;
  const auto r = radial_solve_bvp(c.p, c.N, nonlinearity(c), c.R, bo);
  o.report["bvp"] = io::to_json(r);
  o.gates["found"] = r.found;
  if (r.found) w.text("profile.csv", io::profile_csv(r.profile));
  return o;
}

Outcome cmd_sweep(const Config& c, RunWriter&) {
  Outcome o;
  const auto f = nonlinearity(c);
  json rows = json::array();
  bool all = true;
  std::optional<double> prev;
  for (double h : c.h_values) {
    auto mesh = make_mesh(c.domain, h);
    const auto bp = fixed_point_solve(f, c.p, homotopy(c), mesh, 0.0);
    json row = {{"h", h}, {"mesh", io::mesh_stats(*mesh)}, {"branch_point", io::to_json(bp)}};
    if (bp.converged) {
      const auto en = energy_identity_residual(bp.solution, f, c.p, c.identities.energy_tol);
      const auto po = pohozaev_residual(bp.solution, f, c.p);
      row["energy_identity"] = en.relative;
      row["pohozaev"] = po.relative;
      if (prev) row["pohozaev_ratio"] = *prev / po.relative;
      prev = po.relative;
    }
    all = all && bp.converged;
    rows.push_back(row);
  }
  o.report["refinement"] = rows;
  o.gates["all_converged"] = all;
  return o;
}

std::string compiler() {
#ifdef __VERSION__
  return __VERSION__;
#else
  return "unknown";
#endif
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"p-Laplacian Dirichlet problem laboratory", "plapd"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  struct Flags {
    std::string config, out_dir, mesh_out, f, domain, solution, lambda_sweep, homotopy, alpha_sweep, require, values;
    std::optional<double> p, h, radius, R, lambda1, tol, eps_final;
    std::optional<int> N, max_iter, threads;
    bool eigen = false;
  } fl;

  auto common = [&](CLI::App* s) {
    s->add_option("--config", fl.config, "TOML configuration file");
    s->add_option("--out-dir", fl.out_dir, "output directory (default runs/<timestamp>)");
    s->add_option("--f", fl.f, "nonlinearity, e.g. power:q=3");
    s->add_option("--p", fl.p, "exponent p > 1");
    s->add_option("--N", fl.N, "dimension for hypotheses and radial problems");
    s->add_option("--tol", fl.tol, "inner solver tolerance");
    s->add_option("--max-iter", fl.max_iter, "inner solver iteration budget");
    s->add_option("--eps-final", fl.eps_final, "final regularization");
  };
  auto meshed = [&](CLI::App* s) {
    s->add_option("--domain", fl.domain, "disc | square | regular | polygon");
    s->add_option("--h", fl.h, "mesh size");
    s->add_option("--radius", fl.radius, "disc radius or polygon circumradius");
    s->add_option("--mesh-out", fl.mesh_out, "also write the mesh (file name inside the run directory)");
  };

  auto* solve = app.add_subcommand("solve", "solve -Delta_p u = f(u) and report identities");
  common(solve);
  meshed(solve);
  auto* eigen = app.add_subcommand("eigen", "first eigenpair");
  common(eigen);
  meshed(eigen);
  auto* verify = app.add_subcommand("verify-identities", "identity reports on a solution");
  common(verify);
  meshed(verify);
  verify->add_option("--solution", fl.solution, "solution.json from a previous run");
  auto* hyp = app.add_subcommand("check-hypotheses", "classify f against H0-H5");
  common(hyp);
  hyp->add_option("--lambda1", fl.lambda1, "first eigenvalue, enables H0");
  hyp->add_option("--require", fl.require, "comma separated hypotheses that must hold");
  auto* exist = app.add_subcommand("exist", "fixed-point existence experiments");
  common(exist);
  meshed(exist);
  exist->add_option("--lambda-sweep", fl.lambda_sweep, "a:b:n grid for the lambda threshold");
  exist->add_option("--homotopy", fl.homotopy, "lambda0=X continuation in t");
  exist->add_option("--alpha-sweep", fl.alpha_sweep, "comma separated alphas or a:b:n");
  exist->add_option("--R", fl.R, "ball radius for the alpha sweep");
  exist->add_option("--threads", fl.threads, "parallel grid points");
  auto* radial = app.add_subcommand("oracle-radial", "radial shooting oracle");
  common(radial);
  radial->add_option("--R", fl.R, "ball radius");
  radial->add_flag("--eigen", fl.eigen, "first radial eigenvalue instead of the BVP");
  auto* sweep = app.add_subcommand("sweep", "mesh refinement study");
  common(sweep);
  meshed(sweep);
  sweep->add_option("--values", fl.values, "comma separated mesh sizes");

  std::vector<const char*> argv{"plapd"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? ok : schema_error;
  }
  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();

  auto parse_grid = [](const std::string& s) {
    std::vector<double> v;
    if (std::count(s.begin(), s.end(), ':') == 2) {
      std::stringstream ss(s);
      std::string a, b, n;
      std::getline(ss, a, ':');
      std::getline(ss, b, ':');
      std::getline(ss, n, ':');
      const double lo = std::stod(a), hi = std::stod(b);
      const int k = std::stoi(n);
      if (k < 1) throw SchemaError("grid needs at least one point");
      for (int i = 0; i < k; ++i) v.push_back(k == 1 ? lo : lo + (hi - lo) * i / (k - 1));
    } else {
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
    }
    return v;
  };

  Config cfg;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (!fl.config.empty()) load_toml(fl.config, cfg);
    if (!fl.f.empty()) cfg.f = fl.f;
    if (fl.p) cfg.p = *fl.p;
    if (fl.N) cfg.N = *fl.N;
    if (fl.tol) cfg.solver.tol = *fl.tol;
    if (fl.max_iter) cfg.solver.max_iter = *fl.max_iter;
    if (fl.eps_final) cfg.solver.eps_final = *fl.eps_final;
    if (!fl.domain.empty()) cfg.domain.kind = fl.domain;
    if (fl.h) cfg.domain.h = *fl.h;
    if (fl.radius) cfg.domain.radius = *fl.radius;
    if (fl.R) cfg.R = *fl.R;
    if (fl.threads) cfg.threads = *fl.threads;
    if (fl.lambda1) cfg.lambda1 = fl.lambda1;
    if (!fl.require.empty()) {
      cfg.require.clear();
      std::stringstream ss(fl.require);
      std::string item;
      while (std::getline(ss, item, ',')) cfg.require.push_back(item);
    }
    if (fl.eigen) cfg.radial_eigen = true;
    try {
      if (!fl.values.empty()) cfg.h_values = parse_grid(fl.values);
      if (!fl.lambda_sweep.empty()) {
        cfg.exist.mode = "lambda-sweep";
        cfg.exist.lambda_grid = parse_grid(fl.lambda_sweep);
      }
      if (!fl.alpha_sweep.empty()) {
        cfg.exist.mode = "alpha-sweep";
        cfg.alphas = parse_grid(fl.alpha_sweep);
      }
      if (!fl.homotopy.empty()) {
        cfg.exist.mode = "homotopy";
        const auto eq = fl.homotopy.find('=');
        if (eq == std::string::npos || fl.homotopy.substr(0, eq) != "lambda0")
          throw SchemaError("--homotopy expects lambda0=X");
        cfg.exist.lambda0 = std::stod(fl.homotopy.substr(eq + 1));
      }
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const SchemaError*>(&e)) throw;
      throw SchemaError(std::string("bad numeric grid: ") + e.what());
    }
    validate(cfg);
    nonlinearity(cfg);  // reject bad specs before any work
    homotopy(cfg).validate();
  } catch (const SchemaError& e) {
    err << "plapd: " << e.what() << "\n";
    return schema_error;
  } catch (const Error& e) {
    err << "plapd: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return schema_error;
  }

  Outcome o;
  std::optional<RunWriter> writer;
  try {
    writer.emplace(fl.out_dir.empty() ? default_run_dir() : fs::path(fl.out_dir));
    RunWriter& w = *writer;
    if (command == "solve") o = cmd_solve(cfg, w);
    else if (command == "eigen") o = cmd_eigen(cfg, w);
    else if (command == "verify-identities") o = cmd_verify(cfg, w, fl.solution);
    else if (command == "check-hypotheses") o = cmd_hypotheses(cfg, w);
    else if (command == "exist") o = cmd_exist(cfg, w);
    else if (command == "oracle-radial") o = cmd_radial(cfg, w);
    else o = cmd_sweep(cfg, w);
    if (!fl.mesh_out.empty()) {
      std::ostringstream ms;
      write_mesh(ms, *make_mesh(cfg.domain, cfg.domain.h));
      w.text(fl.mesh_out, ms.str());
    }
  } catch (const SchemaError& e) {
    err << "plapd: " << e.what() << "\n";
    return schema_error;
  } catch (const Error& e) {
    err << "plapd: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return schema_error;
  } catch (const std::exception& e) {
    err << "plapd: " << e.what() << "\n";
    return numerical_failure;
  }

  bool pass = true;
  for (const auto& [k, v] : o.gates) pass = pass && v;
  const int code = pass ? ok : numerical_failure;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  RunWriter& w = *writer;
  w.json_file("report.json", o.report);
  std::ostringstream resolved;
  resolved << to_toml(cfg) << "\n";
  w.text("config.toml", resolved.str());
  const json config = to_json_config(cfg);
  json manifest = {
      {"command", command},
      {"arguments", args},
      {"config", config},
      {"config_hash", [&] {
         std::ostringstream os;
         os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(config.dump());
         return os.str();
       }()},
      {"seeds", {{"seed", cfg.seed}}},
      {"versions",
       {{"plapd", kVersion},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"boost", BOOST_LIB_VERSION},
        {"compiler", compiler()}}},
      {"mesh", o.mesh},
      {"wall_clock_seconds", wall},
      {"checks", o.gates},
      {"exit_code", code},
  };
  auto files = w.files();
  files.push_back("manifest.json");
  manifest["outputs"] = files;
  w.json_file("manifest.json", manifest);

  out << command << ": " << (pass ? "pass" : "FAIL") << " (" << w.dir().string() << ")\n";
  for (const auto& [k, v] : o.gates) out << "  " << k << ": " << (v ? "pass" : "fail") << "\n";
  return code;
}

}  // namespace plapd::cli
