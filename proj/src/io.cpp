#include "plapd/io.hpp"

#include <iomanip>
#include <sstream>

#include "plapd/error.hpp"

namespace plapd::io {

namespace {

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json domain_json(const Domain& d) {
  if (d.is_ball()) return {{"kind", "ball"}, {"dimension", d.as_ball().dimension}, {"radius", d.as_ball().radius}};
  json v = json::array();
  for (const auto& p : d.as_polygon().vertices) v.push_back({p.x(), p.y()});
  return {{"kind", "polygon"}, {"vertices", v}};
}

Domain domain_from(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "ball") return Domain::ball(j.value("dimension", 2), j.at("radius").get<double>());
  if (kind == "polygon") {
    std::vector<Point> v;
    for (const auto& p : j.at("vertices")) v.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return Domain::polygon(std::move(v));
  }
  throw Error(ErrorKind::invalid_input, "unknown domain kind '" + kind + "'");
}

json stages(const std::vector<EpsStage>& t) {
  json out = json::array();
  for (const auto& s : t)
    out.push_back({{"eps", s.eps}, {"iterations", s.iterations}, {"gradient_norm", s.gradient_norm},
                   {"converged", s.converged}});
  return out;
}

}  // namespace

json to_json(const CheckResult& c) {
  return {{"verdict", to_string(c.verdict)}, {"constant", opt(c.constant)}, {"witness", opt(c.witness)},
          {"note", c.note}};
}

json to_json(const HypothesisReport& h) {
  return {{"h0", to_json(h.h0)},     {"h1", to_json(h.h1)},       {"h2", to_json(h.h2)},
          {"h3", to_json(h.h3)},     {"h4", to_json(h.h4)},       {"h3p", to_json(h.h3p)},
          {"h4p", to_json(h.h4p)},   {"h3pp", to_json(h.h3pp)},   {"h4pp", to_json(h.h4pp)},
          {"h5", to_json(h.h5)},     {"tau", opt(h.tau)},         {"C1", opt(h.C1)},
          {"C2", opt(h.C2)},         {"C3", opt(h.C3)},           {"C4", opt(h.C4)},
          {"C5", opt(h.C5)},         {"Lambda", opt(h.Lambda)},   {"theta", opt(h.theta)},
          {"lambda1", opt(h.lambda1)}, {"s_max", h.s_max},        {"samples", h.samples},
          {"tail_fraction", h.tail_fraction}};
}

json to_json(const SolveReport& r, bool with_values) {
  const json trace = stages(r.trace);
  json j = {{"energy", r.energy},         {"gradient_norm", r.gradient_norm}, {"threshold", r.threshold},
            {"iterations", r.iterations}, {"bb_steps", r.bb_steps},           {"converged", r.converged},
            {"trace", trace},             {"message", r.message},
            {"sup_norm", r.solution.sup_norm()}};
  if (with_values) j["values"] = std::vector<double>(r.solution.values.begin(), r.solution.values.end());
  return j;
}

json to_json(const IdentityReport& r) {
  return {{"name", r.name},           {"left", r.left},         {"right", r.right},
          {"residual", r.residual},   {"relative", r.relative}, {"tolerance", r.tolerance},
          {"pass", r.pass},           {"verdict", to_string(r.verdict)},
          {"details", r.details},     {"notes", r.notes}};
}

json to_json(const EigenPair& e) {
  return {{"lambda", e.lambda},         {"iterations", e.iterations}, {"converged", e.converged},
          {"trace", e.trace},           {"message", e.message},
          {"phi_sup_norm", e.phi.sup_norm()}};
}

json to_json(const BranchPoint& b) {
  return {{"parameter", b.parameter},
          {"sup_norm", b.sup_norm},
          {"residual", b.residual},
          {"outer_iterations", b.outer_iterations},
          {"converged", b.converged},
          {"status", to_string(b.status)},
          {"mode", to_string(b.mode_used)},
          {"theta_final", b.theta_final},
          {"message", b.message}};
}

json to_json(const BranchReport& b) {
  json pts = json::array();
  for (const auto& p : b.points) pts.push_back(to_json(p));
  return {{"points", pts}, {"threshold_exceeded", b.threshold_exceeded}, {"message", b.message}};
}

json to_json(const LambdaMaxReport& r) {
  json ev = json::array();
  for (const auto& p : r.evaluations) ev.push_back(to_json(p));
  return {{"lambda_hat", opt(r.lambda_hat)}, {"lower", r.lower}, {"upper", opt(r.upper)},
          {"lower_bound_only", r.lower_bound_only}, {"monotone", r.monotone}, {"evaluations", ev},
          {"message", r.message}};
}

json to_json(const AlphaRow& r) {
  return {{"alpha", r.alpha},           {"found", r.found},         {"sup_norm", r.sup_norm},
          {"h3pp", to_string(r.h3pp)},  {"h4pp", to_string(r.h4pp)}, {"h3pp_constant", opt(r.h3pp_constant)},
          {"message", r.message}};
}

json to_json(const BvpResult& r) {
  return {{"found", r.found}, {"m", r.m}, {"shots", r.shots}, {"message", r.message},
          {"dimension", r.profile.dimension}, {"radius", r.profile.radius}};
}

json mesh_stats(const Mesh& m) {
  return {{"nodes", m.num_nodes()},
          {"triangles", m.num_triangles()},
          {"boundary_nodes", m.num_boundary_nodes()},
          {"h", m.h()},
          {"area", m.total_area()},
          {"domain", m.domain().describe()}};
}

json solution_document(const FeFunction& u, double p, const std::string& f) {
  const Mesh& m = *u.mesh;
  json nodes = json::array(), tris = json::array();
  for (int i = 0; i < m.num_nodes(); ++i)
    nodes.push_back({m.nodes()[i].x(), m.nodes()[i].y(), m.is_boundary(i) ? 1 : 0});
  for (const auto& t : m.triangles()) tris.push_back({t[0], t[1], t[2]});
  return {{"p", p},
          {"f", f},
          {"domain", domain_json(m.domain())},
          {"nodes", nodes},
          {"triangles", tris},
          {"values", std::vector<double>(u.values.begin(), u.values.end())}};
}

FeFunction read_solution(const json& doc, double* p, std::string* f) {
  try {
    const Domain domain = domain_from(doc.at("domain"));
    std::vector<Point> nodes;
    std::vector<std::uint8_t> flags;
    for (const auto& n : doc.at("nodes")) {
      nodes.emplace_back(n.at(0).get<double>(), n.at(1).get<double>());
      flags.push_back(n.at(2).get<int>() ? 1 : 0);
    }
    std::vector<std::array<int, 3>> tris;
    for (const auto& t : doc.at("triangles")) tris.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
    const auto values = doc.at("values").get<std::vector<double>>();
    if (values.size() != nodes.size()) throw Error(ErrorKind::invalid_input, "values and nodes differ in length");
    auto mesh = std::make_shared<const Mesh>(domain, std::move(nodes), std::move(tris), std::move(flags));
    if (p) *p = doc.at("p").get<double>();
    if (f) *f = doc.at("f").get<std::string>();
    return FeFunction(mesh, Eigen::Map<const Eigen::VectorXd>(values.data(), values.size()));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::invalid_input, std::string("malformed solution document: ") + e.what());
  }
}

std::string nodal_csv(const FeFunction& u) {
  std::ostringstream os;
  os << std::setprecision(17) << "x,y,u\n";
  const auto nodes = u.mesh->nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) os << nodes[i].x() << ',' << nodes[i].y() << ',' << u.values[i] << '\n';
  return os.str();
}

std::string profile_csv(const RadialProfile& profile) {
  std::ostringstream os;
  os << std::setprecision(17) << "r,u\n";
  for (std::size_t i = 0; i < profile.r.size(); ++i) os << profile.r[i] << ',' << profile.u[i] << '\n';
  return os.str();
}

}  // namespace plapd::io
