#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace plapd {

using Point = Eigen::Vector2d;

struct Ball {
  int dimension = 2;
  double radius = 1.0;
};

struct ConvexPolygon {
  std::vector<Point> vertices;  // counter-clockwise
};

/// A ball in R^N or a strictly convex polygon in the plane.
class Domain {
 public:
  static Domain ball(int dimension, double radius);
  /// Throws invalid-domain unless the vertices form a strictly convex,
  /// counter-clockwise polygon.
  static Domain polygon(std::vector<Point> vertices);
  static Domain disc(double radius) { return ball(2, radius); }

  bool is_ball() const { return std::holds_alternative<Ball>(kind_); }
  const Ball& as_ball() const { return std::get<Ball>(kind_); }
  const ConvexPolygon& as_polygon() const {
    return std::get<ConvexPolygon>(kind_);
  }
  int dimension() const;

  double area() const;
  Point centroid() const;
  double diameter() const;
  double inradius() const;

  /// Distance from an interior point to the boundary (negative outside).
  double distance_to_boundary(const Point& x) const;
  /// Unit inward normal of the boundary piece nearest to x.
  Point inward_normal(const Point& x) const;
  /// True if x coincides with a polygon vertex (never true for balls).
  bool is_corner(const Point& x, double tol) const;

  std::string describe() const;

 private:
  explicit Domain(std::variant<Ball, ConvexPolygon> k) : kind_(std::move(k)) {}
  std::variant<Ball, ConvexPolygon> kind_;
};

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  int triangle = 0;
  Point outward_normal;
  Point midpoint;
  double length = 0.0;
};

/// P1 triangulation. Immutable after construction; share it through
/// std::shared_ptr<const Mesh>.
class Mesh {
 public:
  Mesh(Domain domain, std::vector<Point> nodes,
       std::vector<std::array<int, 3>> triangles,
       std::vector<std::uint8_t> boundary);

  const Domain& domain() const { return domain_; }
  std::span<const Point> nodes() const { return nodes_; }
  std::span<const std::array<int, 3>> triangles() const { return triangles_; }
  std::span<const std::uint8_t> boundary_flags() const { return boundary_; }
  bool is_boundary(int node) const { return boundary_[node] != 0; }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_boundary_nodes() const;

  /// Longest edge.
  double h() const { return h_; }
  double area(int t) const { return areas_[t]; }
  double total_area() const;
  /// Gradients of the three barycentric basis functions on triangle t.
  const std::array<Point, 3>& basis_gradients(int t) const { return grads_[t]; }
  /// Row-sum lumped mass of each node.
  const Eigen::VectorXd& lumped_mass() const { return lumped_; }
  std::span<const BoundaryEdge> boundary_edges() const { return bedges_; }

  /// Interior nodes in increasing order and the inverse map (-1 on boundary).
  std::span<const int> interior_nodes() const { return interior_; }
  std::span<const int> dof_of_node() const { return dof_; }

  /// Geometric checks; returns an empty string on success.
  std::string validate() const;

 private:
  Domain domain_;
  std::vector<Point> nodes_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<std::uint8_t> boundary_;
  double h_ = 0.0;
  std::vector<double> areas_;
  std::vector<std::array<Point, 3>> grads_;
  Eigen::VectorXd lumped_;
  std::vector<BoundaryEdge> bedges_;
  std::vector<int> interior_;
  std::vector<int> dof_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

MeshPtr mesh_disc(double radius, double h);
MeshPtr mesh_polygon(const std::vector<Point>& vertices, double h);
MeshPtr mesh_domain(const Domain& domain, double h);
MeshPtr refine(const Mesh& mesh);

/// Regular polygons centred at the origin, counter-clockwise.
std::vector<Point> regular_polygon(int sides, double circumradius);
std::vector<Point> unit_square();

/// Nodal scalar field on a mesh.
struct FeFunction {
  MeshPtr mesh;
  Eigen::VectorXd values;

  FeFunction() = default;
  FeFunction(MeshPtr m, Eigen::VectorXd v);
  static FeFunction zero(MeshPtr m);

  double sup_norm() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
  Point gradient(int triangle) const;
  bool is_dirichlet_zero() const;
  /// Sets boundary nodal values to exactly zero.
  void apply_dirichlet_zero();
};

/// Radial profile on a uniform grid 0 = r_0 < ... < r_M = R.
struct RadialProfile {
  int dimension = 2;
  double radius = 1.0;
  std::vector<double> r;
  std::vector<double> u;

  /// Checks u_M = 0 and the discrete symmetry at the origin; empty on success.
  std::string validate(double zero_tol = 1e-8, double symmetry_tol = 0.5) const;
  double operator()(double radius_query) const;
};

/// Nodal values u(|x_i|) by linear interpolation in r. The mesh must be a
/// disc of the profile's radius.
FeFunction interpolate_radial(const RadialProfile& profile, MeshPtr mesh);

/// Plain-text mesh format:
///   nodes <n> triangles <t> boundary <b>
///   x y flag        (n lines)
///   i j k           (t lines, 0-based)
void write_mesh(std::ostream& os, const Mesh& mesh);
void write_mesh(const std::string& path, const Mesh& mesh);
MeshPtr read_mesh(std::istream& is, const Domain& domain);

}  // namespace plapd
