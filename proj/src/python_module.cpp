#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "plapd/cli.hpp"
#include "plapd/error.hpp"
#include "plapd/existence.hpp"
#include "plapd/identities.hpp"
#include "plapd/radial.hpp"

namespace py = pybind11;
using namespace plapd;

namespace {

py::dict check_dict(const CheckResult& c) {
  py::dict d;
  d["verdict"] = to_string(c.verdict);
  d["constant"] = c.constant;
  d["witness"] = c.witness;
  d["note"] = c.note;
  return d;
}

Eigen::MatrixX2d node_array(const Mesh& m) {
  Eigen::MatrixX2d x(m.num_nodes(), 2);
  for (int i = 0; i < m.num_nodes(); ++i) x.row(i) = m.nodes()[i].transpose();
  return x;
}

Eigen::MatrixX3i triangle_array(const Mesh& m) {
  Eigen::MatrixX3i t(m.num_triangles(), 3);
  for (int k = 0; k < m.num_triangles(); ++k)
    for (int j = 0; j < 3; ++j) t(k, j) = m.triangles()[k][j];
  return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "p-Laplacian Dirichlet problem laboratory";

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  py::class_<Mesh, std::shared_ptr<Mesh>>(m, "Mesh")
      .def_property_readonly("nodes", &node_array)
      .def_property_readonly("triangles", &triangle_array)
      .def_property_readonly("boundary", [](const Mesh& mesh) {
        std::vector<bool> b(mesh.num_nodes());
        for (int i = 0; i < mesh.num_nodes(); ++i) b[i] = mesh.is_boundary(i);
        return b;
      })
      .def_property_readonly("num_nodes", &Mesh::num_nodes)
      .def_property_readonly("num_triangles", &Mesh::num_triangles)
      .def_property_readonly("h", &Mesh::h)
      .def_property_readonly("area", &Mesh::total_area)
      .def_property_readonly("lumped_mass", &Mesh::lumped_mass)
      .def("validate", &Mesh::validate)
      .def("__repr__", [](const Mesh& mesh) {
        std::ostringstream os;
        os << "<Mesh " << mesh.domain().describe() << ", " << mesh.num_nodes() << " nodes>";
        return os.str();
      });

  // MeshPtr holds a const Mesh; expose it through a non-const alias
  auto wrap = [](MeshPtr p) { return std::const_pointer_cast<Mesh>(p); };
  auto unwrap = [](const std::shared_ptr<Mesh>& p) -> MeshPtr { return p; };

  m.def("mesh_disc", [wrap](double radius, double h) { return wrap(mesh_disc(radius, h)); }, py::arg("radius"),
        py::arg("h"));
  m.def("mesh_polygon",
        [wrap](const std::vector<std::array<double, 2>>& v, double h) {
          std::vector<Point> pts;
          for (const auto& p : v) pts.emplace_back(p[0], p[1]);
          return wrap(mesh_polygon(pts, h));
        },
        py::arg("vertices"), py::arg("h"));
  m.def("regular_polygon", [](int sides, double r) {
    std::vector<std::array<double, 2>> out;
    for (const auto& p : regular_polygon(sides, r)) out.push_back({p.x(), p.y()});
    return out;
  });

  py::class_<Nonlinearity>(m, "Nonlinearity")
      .def("__call__", &Nonlinearity::operator())
      .def("primitive", &Nonlinearity::primitive)
      .def_property_readonly("name", &Nonlinearity::name)
      .def("__repr__", [](const Nonlinearity& f) { return "<Nonlinearity " + f.name() + ">"; });
  m.def("nonlinearity", &nonlinearities::parse, py::arg("spec"), py::arg("p") = 2.0, py::arg("N") = 2,
        "Parse 'kind:k=v,...', e.g. 'power:q=3'.");

  m.def("classify",
        [](const Nonlinearity& f, double p, int N, std::optional<double> lambda1) {
          const auto h = classify(f, p, N, lambda1);
          py::dict d;
          d["h0"] = check_dict(h.h0);
          d["h1"] = check_dict(h.h1);
          d["h2"] = check_dict(h.h2);
          d["h3"] = check_dict(h.h3);
          d["h4"] = check_dict(h.h4);
          d["h3p"] = check_dict(h.h3p);
          d["h4p"] = check_dict(h.h4p);
          d["h3pp"] = check_dict(h.h3pp);
          d["h4pp"] = check_dict(h.h4pp);
          d["h5"] = check_dict(h.h5);
          d["Lambda"] = h.Lambda;
          return d;
        },
        py::arg("f"), py::arg("p"), py::arg("N"), py::arg("lambda1") = py::none());

  m.def("inner_solve",
        [unwrap](const std::shared_ptr<Mesh>& mesh, double p, const Eigen::VectorXd& load, double Lambda, double tol,
                 int max_iter) {
          SolverSettings s;
          s.tol = tol;
          s.max_iter = max_iter;
          const auto r = InnerSolver(unwrap(mesh), p, Lambda, s).solve(load);
          py::dict d;
          d["values"] = r.solution.values;
          d["converged"] = r.converged;
          d["energy"] = r.energy;
          d["gradient_norm"] = r.gradient_norm;
          d["iterations"] = r.iterations;
          d["message"] = r.message;
          return d;
        },
        py::arg("mesh"), py::arg("p"), py::arg("load"), py::arg("Lambda") = 0.0, py::arg("tol") = 1e-8,
        py::arg("max_iter") = 500);

  m.def("first_eigenpair",
        [unwrap](const std::shared_ptr<Mesh>& mesh, double p) {
          const auto e = first_eigenpair(p, unwrap(mesh));
          return py::make_tuple(e.lambda, e.phi.values, e.converged);
        },
        py::arg("mesh"), py::arg("p"), "Returns (lambda1, phi, converged).");

  m.def("torsion_exact", py::overload_cast<double, int, double>(&torsion_exact), py::arg("p"), py::arg("N"),
        py::arg("r"));
  m.def("radial_eigen", &radial_eigen, py::arg("p"), py::arg("N"), py::arg("R") = 1.0);
  m.def("radial_solve_bvp",
        [](double p, int N, const Nonlinearity& f, double R) {
          const auto b = radial_solve_bvp(p, N, f, R);
          py::dict d;
          d["found"] = b.found;
          d["m"] = b.m;
          d["r"] = b.profile.r;
          d["u"] = b.profile.u;
          d["message"] = b.message;
          return d;
        },
        py::arg("p"), py::arg("N"), py::arg("f"), py::arg("R") = 1.0);

  auto report = [](const IdentityReport& r) {
    py::dict d;
    d["name"] = r.name;
    d["left"] = r.left;
    d["right"] = r.right;
    d["relative"] = r.relative;
    d["pass"] = r.pass;
    d["notes"] = r.notes;
    return d;
  };
  m.def("energy_identity",
        [unwrap, report](const std::shared_ptr<Mesh>& mesh, const Eigen::VectorXd& u, const Nonlinearity& f,
                         double p) { return report(energy_identity_residual(FeFunction(unwrap(mesh), u), f, p)); },
        py::arg("mesh"), py::arg("u"), py::arg("f"), py::arg("p"));
  m.def("pohozaev",
        [unwrap, report](const std::shared_ptr<Mesh>& mesh, const Eigen::VectorXd& u, const Nonlinearity& f,
                         double p) { return report(pohozaev_residual(FeFunction(unwrap(mesh), u), f, p)); },
        py::arg("mesh"), py::arg("u"), py::arg("f"), py::arg("p"));

  m.def("fixed_point_solve",
        [unwrap](const Nonlinearity& f, double p, const std::shared_ptr<Mesh>& mesh, double lambda0, double t) {
          HomotopyConfig c;
          c.lambda0 = lambda0;
          const auto b = fixed_point_solve(f, p, c, unwrap(mesh), t);
          py::dict d;
          d["values"] = b.solution.values;
          d["sup_norm"] = b.sup_norm;
          d["converged"] = b.converged;
          d["status"] = to_string(b.status);
          d["residual"] = b.residual;
          d["message"] = b.message;
          return d;
        },
        py::arg("f"), py::arg("p"), py::arg("mesh"), py::arg("lambda0") = 0.0, py::arg("t") = 0.0);

  m.def("estimate_lambda_max",
        [unwrap](const Nonlinearity& f, double p, const std::shared_ptr<Mesh>& mesh, std::vector<double> grid,
                 int steps) {
          HomotopyConfig c;
          c.lambda_grid = std::move(grid);
          const auto r = estimate_lambda_max(f, p, unwrap(mesh), c, steps);
          py::dict d;
          d["lambda_hat"] = r.lambda_hat;
          d["lower"] = r.lower;
          d["upper"] = r.upper;
          d["lower_bound_only"] = r.lower_bound_only;
          d["message"] = r.message;
          return d;
        },
        py::arg("f"), py::arg("p"), py::arg("mesh"), py::arg("grid"), py::arg("steps") = 8);

  m.def("cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          const int code = cli::run(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run a command-line subcommand; returns (exit_code, stdout, stderr).");
}
