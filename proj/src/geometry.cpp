#include "plapd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "plapd/error.hpp"

namespace plapd {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * cross(b - a, c - a);
}

std::pair<int, int> edge_key(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

// > 0 when d lies strictly inside the circumcircle of the CCW triangle abc.
double incircle(const Point& a, const Point& b, const Point& c, const Point& d) {
  const Point ad = a - d, bd = b - d, cd = c - d;
  return ad.squaredNorm() * cross(bd, cd) - bd.squaredNorm() * cross(ad, cd) +
         cd.squaredNorm() * cross(ad, bd);
}

void delaunay_flips(const std::vector<Point>& nodes, std::vector<std::array<int, 3>>& tris) {
  for (int pass = 0; pass < 100; ++pass) {
    std::map<std::pair<int, int>, std::vector<int>> owners;
    for (int t = 0; t < static_cast<int>(tris.size()); ++t)
      for (int k = 0; k < 3; ++k) owners[edge_key(tris[t][k], tris[t][(k + 1) % 3])].push_back(t);

    std::vector<std::uint8_t> touched(tris.size(), 0);
    int flips = 0;
    for (const auto& [edge, ts] : owners) {
      if (ts.size() != 2 || touched[ts[0]] || touched[ts[1]]) continue;
      auto& t1 = tris[ts[0]];
      auto& t2 = tris[ts[1]];
      auto opposite = [&](const std::array<int, 3>& t) {
        for (int v : t)
          if (v != edge.first && v != edge.second) return v;
        return -1;
      };
      // rotate t1 so that it reads (a, b, c) with (a, b) the shared edge
      int c = opposite(t1), d = opposite(t2);
      int ic = static_cast<int>(std::find(t1.begin(), t1.end(), c) - t1.begin());
      int a = t1[(ic + 1) % 3], b = t1[(ic + 2) % 3];
      const Point &pa = nodes[a], &pb = nodes[b], &pc = nodes[c], &pd = nodes[d];
      const double scale = std::pow((pa - pb).squaredNorm() + (pc - pd).squaredNorm(), 2);
      if (incircle(pa, pb, pc, pd) <= 1e-12 * scale) continue;
      if (signed_area(pa, pd, pc) <= 0 || signed_area(pd, pb, pc) <= 0) continue;
      t1 = {a, d, c};
      t2 = {d, b, c};
      touched[ts[0]] = touched[ts[1]] = 1;
      ++flips;
    }
    if (flips == 0) return;
  }
}

double max_edge(const std::vector<Point>& nodes, const std::vector<std::array<int, 3>>& tris) {
  double h = 0.0;
  for (const auto& t : tris)
    for (int k = 0; k < 3; ++k) h = std::max(h, (nodes[t[k]] - nodes[t[(k + 1) % 3]]).norm());
  return h;
}

}  // namespace

// ---------------------------------------------------------------- Domain

Domain Domain::ball(int dimension, double radius) {
  if (dimension < 2) throw Error(ErrorKind::invalid_parameter, "ball dimension must be >= 2");
  if (!(radius > 0)) throw Error(ErrorKind::invalid_parameter, "ball radius must be > 0");
  return Domain(Ball{dimension, radius});
}

Domain Domain::polygon(std::vector<Point> vertices) {
  const auto n = vertices.size();
  if (n < 3) throw Error(ErrorKind::invalid_domain, "polygon needs at least 3 vertices");
  for (std::size_t i = 0; i < n; ++i) {
    const Point e1 = vertices[(i + 1) % n] - vertices[i];
    const Point e2 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
    const double scale = e1.norm() * e2.norm();
    if (!(cross(e1, e2) > 1e-12 * scale))
      throw Error(ErrorKind::invalid_domain,
                  "polygon is not strictly convex and counter-clockwise at vertex " +
                      std::to_string((i + 1) % n));
  }
  // strict local convexity with total turning 2*pi rules out star polygons
  double turning = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point e1 = vertices[(i + 1) % n] - vertices[i];
    const Point e2 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
    turning += std::atan2(cross(e1, e2), e1.dot(e2));
  }
  if (std::abs(turning - 2 * std::numbers::pi) > 1e-6)
    throw Error(ErrorKind::invalid_domain, "polygon winds more than once");
  return Domain(ConvexPolygon{std::move(vertices)});
}

int Domain::dimension() const { return is_ball() ? as_ball().dimension : 2; }

double Domain::area() const {
  if (is_ball()) {
    const auto& b = as_ball();
    if (b.dimension != 2) throw Error(ErrorKind::invalid_parameter, "area: only planar domains");
    return std::numbers::pi * b.radius * b.radius;
  }
  const auto& v = as_polygon().vertices;
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * a;
}

Point Domain::centroid() const {
  if (is_ball()) return Point::Zero();
  const auto& v = as_polygon().vertices;
  Point c = Point::Zero();
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point& p = v[i];
    const Point& q = v[(i + 1) % v.size()];
    const double w = cross(p, q);
    a += w;
    c += (p + q) * w;
  }
  return c / (3.0 * a);
}

double Domain::diameter() const {
  if (is_ball()) return 2 * as_ball().radius;
  const auto& v = as_polygon().vertices;
  double d = 0.0;
  for (const auto& p : v)
    for (const auto& q : v) d = std::max(d, (p - q).norm());
  return d;
}

double Domain::inradius() const {
  if (is_ball()) return as_ball().radius;
  // distance_to_boundary is concave: coarse grid search then pattern search
  const auto& v = as_polygon().vertices;
  Point lo = v[0], hi = v[0];
  for (const auto& p : v) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  Point best = centroid();
  double fbest = distance_to_boundary(best);
  const int n = 64;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      Point x(lo.x() + (hi.x() - lo.x()) * i / n, lo.y() + (hi.y() - lo.y()) * j / n);
      const double fx = distance_to_boundary(x);
      if (fx > fbest) {
        fbest = fx;
        best = x;
      }
    }
  double step = (hi - lo).norm() / n;
  while (step > 1e-13 * diameter()) {
    bool improved = false;
    for (const Point& d : {Point(1, 0), Point(-1, 0), Point(0, 1), Point(0, -1), Point(1, 1),
                           Point(-1, -1), Point(1, -1), Point(-1, 1)}) {
      const Point x = best + step * d.normalized();
      const double fx = distance_to_boundary(x);
      if (fx > fbest) {
        fbest = fx;
        best = x;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return fbest;
}

double Domain::distance_to_boundary(const Point& x) const {
  if (is_ball()) return as_ball().radius - x.norm();
  const auto& v = as_polygon().vertices;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point e = v[(i + 1) % v.size()] - v[i];
    // inward normal of a CCW edge is the left normal
    const Point n = Point(-e.y(), e.x()).normalized();
    d = std::min(d, n.dot(x - v[i]));
  }
  return d;
}

Point Domain::inward_normal(const Point& x) const {
  if (is_ball()) {
    const double r = x.norm();
    return r > 0 ? Point(-x / r) : Point(1, 0);
  }
  const auto& v = as_polygon().vertices;
  double d = std::numeric_limits<double>::infinity();
  Point best(1, 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point e = v[(i + 1) % v.size()] - v[i];
    const Point n = Point(-e.y(), e.x()).normalized();
    const double di = n.dot(x - v[i]);
    if (di < d) {
      d = di;
      best = n;
    }
  }
  return best;
}

bool Domain::is_corner(const Point& x, double tol) const {
  if (is_ball()) return false;
  for (const auto& v : as_polygon().vertices)
    if ((v - x).norm() <= tol) return true;
  return false;
}

std::string Domain::describe() const {
  std::ostringstream os;
  if (is_ball()) {
    os << "ball(N=" << as_ball().dimension << ", R=" << as_ball().radius << ")";
  } else {
    os << "polygon(";
    const auto& v = as_polygon().vertices;
    for (std::size_t i = 0; i < v.size(); ++i)
      os << (i ? "; " : "") << v[i].x() << "," << v[i].y();
    os << ")";
  }
  return os.str();
}

// ---------------------------------------------------------------- Mesh

Mesh::Mesh(Domain domain, std::vector<Point> nodes, std::vector<std::array<int, 3>> triangles,
           std::vector<std::uint8_t> boundary)
    : domain_(std::move(domain)),
      nodes_(std::move(nodes)),
      triangles_(std::move(triangles)),
      boundary_(std::move(boundary)) {
  const int n = num_nodes();
  if (static_cast<int>(boundary_.size()) != n)
    throw Error(ErrorKind::invalid_input, "boundary flag count differs from node count");

  areas_.resize(triangles_.size());
  grads_.resize(triangles_.size());
  lumped_ = Eigen::VectorXd::Zero(n);
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int v : tri)
      if (v < 0 || v >= n) throw Error(ErrorKind::invalid_input, "triangle index out of range");
    const Point &p0 = nodes_[tri[0]], &p1 = nodes_[tri[1]], &p2 = nodes_[tri[2]];
    const double a = signed_area(p0, p1, p2);
    if (!(a > 0)) throw Error(ErrorKind::invalid_input, "triangle " + std::to_string(t) + " not positively oriented");
    areas_[t] = a;
    const double s = 1.0 / (2 * a);
    grads_[t][0] = Point(p1.y() - p2.y(), p2.x() - p1.x()) * s;
    grads_[t][1] = Point(p2.y() - p0.y(), p0.x() - p2.x()) * s;
    grads_[t][2] = Point(p0.y() - p1.y(), p1.x() - p0.x()) * s;
    for (int v : tri) lumped_[v] += a / 3.0;
  }
  h_ = max_edge(nodes_, triangles_);

  std::map<std::pair<int, int>, std::vector<int>> owners;
  for (int t = 0; t < num_triangles(); ++t)
    for (int k = 0; k < 3; ++k)
      owners[edge_key(triangles_[t][k], triangles_[t][(k + 1) % 3])].push_back(t);
  for (const auto& [e, ts] : owners) {
    if (ts.size() != 1) continue;
    const auto& tri = triangles_[ts[0]];
    // orient (a, b) along the CCW traversal of the owning triangle
    int a = e.first, b = e.second;
    for (int k = 0; k < 3; ++k)
      if (tri[k] == e.second && tri[(k + 1) % 3] == e.first) std::swap(a, b);
    BoundaryEdge be;
    be.a = a;
    be.b = b;
    be.triangle = ts[0];
    const Point d = nodes_[b] - nodes_[a];
    be.length = d.norm();
    be.outward_normal = Point(d.y(), -d.x()) / be.length;
    be.midpoint = 0.5 * (nodes_[a] + nodes_[b]);
    bedges_.push_back(be);
  }

  dof_.assign(n, -1);
  for (int i = 0; i < n; ++i)
    if (!boundary_[i]) {
      dof_[i] = static_cast<int>(interior_.size());
      interior_.push_back(i);
    }
}

int Mesh::num_boundary_nodes() const {
  return static_cast<int>(std::count(boundary_.begin(), boundary_.end(), 1));
}

double Mesh::total_area() const {
  double a = 0.0;
  for (double t : areas_) a += t;
  return a;
}

std::string Mesh::validate() const {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : triangles_)
    for (int k = 0; k < 3; ++k) ++count[edge_key(t[k], t[(k + 1) % 3])];
  std::vector<std::uint8_t> on_boundary_edge(nodes_.size(), 0);
  for (const auto& [e, c] : count) {
    if (c > 2) return "edge shared by more than two triangles";
    if (c == 1) {
      on_boundary_edge[e.first] = on_boundary_edge[e.second] = 1;
      if (!boundary_[e.first] || !boundary_[e.second]) return "boundary edge with unflagged node";
    }
  }
  for (int i = 0; i < num_nodes(); ++i) {
    if (!boundary_[i]) continue;
    if (!on_boundary_edge[i]) return "flagged node not on a boundary edge";
    if (std::abs(domain_.distance_to_boundary(nodes_[i])) > h_ * h_)
      return "boundary node " + std::to_string(i) + " farther than h^2 from the boundary";
  }
  for (double a : areas_)
    if (!(a > 0)) return "non-positive triangle area";
  return {};
}

// ---------------------------------------------------------------- generators

MeshPtr mesh_disc(double radius, double h) {
  if (!(radius > 0)) throw Error(ErrorKind::invalid_parameter, "disc radius must be > 0");
  if (!(h > 0) || !(h < radius))
    throw Error(ErrorKind::invalid_parameter, "mesh size must satisfy 0 < h < R");

  const int rings = static_cast<int>(std::ceil(radius / h - 1e-12));
  std::vector<Point> nodes{Point::Zero()};
  std::vector<std::uint8_t> boundary{0};
  std::vector<int> ring_start{0};
  for (int k = 1; k <= rings; ++k) {
    ring_start.push_back(static_cast<int>(nodes.size()));
    const int m = 6 * k;
    const double r = radius * k / rings;
    for (int j = 0; j < m; ++j) {
      const double phi = 2 * std::numbers::pi * j / m;
      nodes.emplace_back(r * std::cos(phi), r * std::sin(phi));
      boundary.push_back(k == rings ? 1 : 0);
    }
  }

  std::vector<std::array<int, 3>> tris;
  auto add = [&](int a, int b, int c) {
    if (signed_area(nodes[a], nodes[b], nodes[c]) < 0) std::swap(b, c);
    tris.push_back({a, b, c});
  };
  for (int j = 0; j < 6; ++j) add(0, 1 + j, 1 + (j + 1) % 6);
  for (int k = 2; k <= rings; ++k) {
    const int a = 6 * (k - 1), b = 6 * k;
    const int in0 = ring_start[k - 1], out0 = ring_start[k];
    int i = 0, j = 0;
    // merge the two rings by angle; integer comparison of (i+1)/a vs (j+1)/b
    while (i < a || j < b) {
      const bool advance_outer = (i == a) || (j < b && static_cast<long>(j + 1) * a <= static_cast<long>(i + 1) * b);
      if (advance_outer) {
        add(in0 + i % a, out0 + j, out0 + (j + 1) % b);
        ++j;
      } else {
        add(in0 + i, out0 + j % b, in0 + (i + 1) % a);
        ++i;
      }
    }
  }
  delaunay_flips(nodes, tris);
  return std::make_shared<const Mesh>(Domain::disc(radius), std::move(nodes), std::move(tris),
                                      std::move(boundary));
}

MeshPtr mesh_polygon(const std::vector<Point>& vertices, double h) {
  Domain domain = Domain::polygon(vertices);
  if (!(h > 0)) throw Error(ErrorKind::invalid_parameter, "mesh size must be > 0");

  // ear clipping; on a convex polygon every vertex is an ear
  std::vector<int> ring(vertices.size());
  for (std::size_t i = 0; i < ring.size(); ++i) ring[i] = static_cast<int>(i);
  std::vector<std::array<int, 3>> tris;
  while (ring.size() > 3) {
    const std::size_t n = ring.size();
    std::size_t best = 0;
    double best_quality = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Point& a = vertices[ring[(i + n - 1) % n]];
      const Point& b = vertices[ring[i]];
      const Point& c = vertices[ring[(i + 1) % n]];
      const double area = signed_area(a, b, c);
      const double perim2 = (a - b).squaredNorm() + (b - c).squaredNorm() + (c - a).squaredNorm();
      const double quality = area / perim2;
      if (area > 0 && quality > best_quality + 1e-14) {
        best_quality = quality;
        best = i;
      }
    }
    tris.push_back({ring[(best + n - 1) % n], ring[best], ring[(best + 1) % n]});
    ring.erase(ring.begin() + static_cast<long>(best));
  }
  tris.push_back({ring[0], ring[1], ring[2]});

  std::vector<std::uint8_t> boundary(vertices.size(), 1);
  auto mesh = std::make_shared<const Mesh>(std::move(domain), vertices, std::move(tris),
                                           std::move(boundary));
  while (mesh->h() > h) mesh = refine(*mesh);
  return mesh;
}

MeshPtr mesh_domain(const Domain& domain, double h) {
  if (domain.is_ball()) {
    if (domain.as_ball().dimension != 2)
      throw Error(ErrorKind::invalid_parameter, "finite-element meshes are planar (N = 2)");
    return mesh_disc(domain.as_ball().radius, h);
  }
  return mesh_polygon(domain.as_polygon().vertices, h);
}

MeshPtr refine(const Mesh& mesh) {
  std::vector<Point> nodes(mesh.nodes().begin(), mesh.nodes().end());
  std::vector<std::uint8_t> boundary(mesh.boundary_flags().begin(), mesh.boundary_flags().end());

  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : mesh.triangles())
    for (int k = 0; k < 3; ++k) ++edge_count[edge_key(t[k], t[(k + 1) % 3])];

  const auto& domain = mesh.domain();
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = edge_key(a, b);
    if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
    Point m = 0.5 * (nodes[a] + nodes[b]);
    const bool on_boundary = edge_count[key] == 1;
    if (on_boundary && domain.is_ball()) m *= domain.as_ball().radius / m.norm();
    nodes.push_back(m);
    boundary.push_back(on_boundary ? 1 : 0);
    const int id = static_cast<int>(nodes.size()) - 1;
    midpoint.emplace(key, id);
    return id;
  };

  std::vector<std::array<int, 3>> tris;
  tris.reserve(4 * mesh.triangles().size());
  for (const auto& t : mesh.triangles()) {
    const int a = t[0], b = t[1], c = t[2];
    const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    tris.push_back({a, ab, ca});
    tris.push_back({ab, b, bc});
    tris.push_back({ca, bc, c});
    tris.push_back({ab, bc, ca});
  }
  return std::make_shared<const Mesh>(domain, std::move(nodes), std::move(tris), std::move(boundary));
}

std::vector<Point> regular_polygon(int sides, double circumradius) {
  if (sides < 3) throw Error(ErrorKind::invalid_parameter, "regular polygon needs >= 3 sides");
  std::vector<Point> v;
  for (int i = 0; i < sides; ++i) {
    const double phi = 2 * std::numbers::pi * i / sides;
    v.emplace_back(circumradius * std::cos(phi), circumradius * std::sin(phi));
  }
  return v;
}

std::vector<Point> unit_square() { return {Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)}; }

// ---------------------------------------------------------------- FeFunction

FeFunction::FeFunction(MeshPtr m, Eigen::VectorXd v) : mesh(std::move(m)), values(std::move(v)) {
  if (!mesh) throw Error(ErrorKind::invalid_input, "FeFunction needs a mesh");
  if (values.size() != mesh->num_nodes())
    throw Error(ErrorKind::invalid_input, "value vector length differs from node count");
}

FeFunction FeFunction::zero(MeshPtr m) {
  const int n = m->num_nodes();
  return FeFunction(std::move(m), Eigen::VectorXd::Zero(n));
}

Point FeFunction::gradient(int t) const {
  const auto& tri = mesh->triangles()[t];
  const auto& g = mesh->basis_gradients(t);
  return values[tri[0]] * g[0] + values[tri[1]] * g[1] + values[tri[2]] * g[2];
}

bool FeFunction::is_dirichlet_zero() const {
  for (int i = 0; i < mesh->num_nodes(); ++i)
    if (mesh->is_boundary(i) && values[i] != 0.0) return false;
  return true;
}

void FeFunction::apply_dirichlet_zero() {
  for (int i = 0; i < mesh->num_nodes(); ++i)
    if (mesh->is_boundary(i)) values[i] = 0.0;
}

// ---------------------------------------------------------------- radial profiles

std::string RadialProfile::validate(double zero_tol, double symmetry_tol) const {
  if (r.size() < 3 || r.size() != u.size()) return "profile needs matching r/u grids of length >= 3";
  if (r.front() != 0.0) return "profile grid must start at r = 0";
  if (std::abs(r.back() - radius) > 1e-12 * radius) return "profile grid must end at R";
  double scale = 0.0;
  for (double v : u) scale = std::max(scale, std::abs(v));
  if (std::abs(u.back()) > zero_tol * std::max(scale, 1.0)) return "profile does not vanish at r = R";
  const double dr = r[1] - r[0];
  if (std::abs(u[1] - u[0]) > symmetry_tol * dr * scale / radius)
    return "profile is not symmetric at the origin";
  return {};
}

double RadialProfile::operator()(double q) const {
  if (q <= r.front()) return u.front();
  if (q >= r.back()) return u.back();
  const auto it = std::upper_bound(r.begin(), r.end(), q);
  const auto i = static_cast<std::size_t>(it - r.begin()) - 1;
  const double w = (q - r[i]) / (r[i + 1] - r[i]);
  return (1 - w) * u[i] + w * u[i + 1];
}

FeFunction interpolate_radial(const RadialProfile& profile, MeshPtr mesh) {
  const auto& domain = mesh->domain();
  if (!domain.is_ball() || std::abs(domain.as_ball().radius - profile.radius) > 1e-12 * profile.radius)
    throw Error(ErrorKind::invalid_parameter, "interpolate_radial: mesh is not a disc of the profile radius");
  if (auto msg = profile.validate(); !msg.empty()) throw Error(ErrorKind::invalid_input, msg);
  Eigen::VectorXd v(mesh->num_nodes());
  for (int i = 0; i < mesh->num_nodes(); ++i)
    v[i] = mesh->is_boundary(i) ? 0.0 : profile(mesh->nodes()[i].norm());
  return FeFunction(std::move(mesh), std::move(v));
}

// ---------------------------------------------------------------- I/O

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << "nodes " << mesh.num_nodes() << " triangles " << mesh.num_triangles() << " boundary "
     << mesh.num_boundary_nodes() << "\n";
  os.precision(17);
  for (int i = 0; i < mesh.num_nodes(); ++i)
    os << mesh.nodes()[i].x() << " " << mesh.nodes()[i].y() << " " << int(mesh.boundary_flags()[i]) << "\n";
  for (const auto& t : mesh.triangles()) os << t[0] << " " << t[1] << " " << t[2] << "\n";
}

void write_mesh(const std::string& path, const Mesh& mesh) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::invalid_parameter, "cannot open " + path);
  write_mesh(os, mesh);
}

MeshPtr read_mesh(std::istream& is, const Domain& domain) {
  std::string w1, w2, w3;
  int n = 0, t = 0, b = 0;
  if (!(is >> w1 >> n >> w2 >> t >> w3 >> b) || w1 != "nodes" || w2 != "triangles" || w3 != "boundary")
    throw Error(ErrorKind::invalid_input, "bad mesh header");
  std::vector<Point> nodes(n);
  std::vector<std::uint8_t> flags(n);
  for (int i = 0; i < n; ++i) {
    int f = 0;
    if (!(is >> nodes[i].x() >> nodes[i].y() >> f)) throw Error(ErrorKind::invalid_input, "bad node line");
    flags[i] = f ? 1 : 0;
  }
  std::vector<std::array<int, 3>> tris(t);
  for (auto& tri : tris)
    if (!(is >> tri[0] >> tri[1] >> tri[2])) throw Error(ErrorKind::invalid_input, "bad triangle line");
  auto mesh = std::make_shared<const Mesh>(domain, std::move(nodes), std::move(tris), std::move(flags));
  if (mesh->num_boundary_nodes() != b) throw Error(ErrorKind::invalid_input, "boundary count mismatch");
  return mesh;
}

}  // namespace plapd
