#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "helixlab/analysis.hpp"
#include "helixlab/cli.hpp"
#include "helixlab/generate.hpp"

namespace py = pybind11;
using namespace helixlab;

namespace {

py::dict constancy(const ConstancyResult& c) {
  py::dict d;
  d["is_constant"] = c.is_constant;
  d["mean"] = c.mean;
  d["max_abs_deviation"] = c.max_abs_deviation;
  d["tolerance"] = c.tolerance;
  return d;
}

py::dict helix(const HelixVerdict& h) {
  py::dict d;
  d["verdict"] = h.verdict;
  d["eikonal"] = h.eikonal;
  d["nonzero"] = h.nonzero;
  d["value"] = constancy(h.value);
  return d;
}

Tolerances make_tolerances(const py::object& tol, CurveSource source) {
  Tolerances t = Tolerances::for_source(source);
  if (tol.is_none()) return t;
  const auto d = tol.cast<py::dict>();
  for (auto [k, v] : d) {
    const auto key = k.cast<std::string>();
    const double x = v.cast<double>();
    if (key == "constancy") t.constancy = x;
    else if (key == "affine") t.affine = x;
    else if (key == "theorem") t.theorem = x;
    else if (key == "zero_floor") t.zero_floor = x;
    else throw py::key_error("unknown tolerance '" + key + "'");
  }
  return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Frenet apparatus, helix classification and curve synthesis on Riemannian 3-manifolds";

  static py::exception<Error> error_type(m, "HelixlabError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type.ptr())(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::class_<Expr>(m, "Expr")
      .def(py::init([](const std::string& src, const std::map<std::string, double>& constants) {
             ParseOptions o;
             for (const auto& [k, v] : constants) o.constants[k] = v;
             return parse(src, o);
           }),
           py::arg("source"), py::arg("constants") = std::map<std::string, double>{})
      .def("__call__", &Expr::eval, py::arg("x") = 0.0, py::arg("y") = 0.0, py::arg("z") = 0.0)
      .def("eval_at", [](const Expr& e, const std::string& var, double v) {
        static const std::map<std::string, Var> vars{{"x", Var::X}, {"y", Var::Y}, {"z", Var::Z}, {"s", Var::S}, {"t", Var::T}};
        const auto it = vars.find(var);
        if (it == vars.end()) throw py::value_error("variable must be one of x, y, z, s, t");
        return e.eval_at(it->second, v);
      })
      .def("gradient", [](const Expr& e, const Vector3& p) {
        const auto d = eval_dual(e, p);
        return py::make_tuple(d.v, Vector3(d.d[0], d.d[1], d.d[2]));
      })
      .def("__str__", &Expr::to_string)
      .def("__repr__", [](const Expr& e) { return "Expr('" + e.to_string() + "')"; });

  py::class_<MetricField>(m, "MetricField")
      .def_static("euclidean", &MetricField::euclidean)
      .def_static("half_space", &MetricField::half_space)
      .def_static("from_expressions",
                  [](const std::vector<std::string>& entries) {
                    if (entries.size() != 9) throw py::value_error("need 9 metric entries g11..g33");
                    std::array<Expr, 9> g;
                    for (int i = 0; i < 9; ++i) g[i] = parse(entries[i]);
                    return MetricField::from_expressions(g);
                  })
      .def_property_readonly("name", &MetricField::name)
      .def("matrix", [](const MetricField& g, const Vector3& p) { return Matrix3(g.at(p).g); })
      .def("inner", [](const MetricField& g, const Vector3& p, const Vector3& x, const Vector3& y) { return inner(g, p, x, y); })
      .def("cross", [](const MetricField& g, const Vector3& p, const Vector3& x, const Vector3& y) { return cross(g, p, x, y); });

  py::class_<ScalarField>(m, "ScalarField")
      .def_static("from_expression", [](const std::string& src) { return ScalarField::from_expression(parse(src)); })
      .def_static("linear", &ScalarField::linear, py::arg("coeffs"), py::arg("offset") = 0.0)
      .def("__call__", &ScalarField::eval)
      .def("gradient", [](const ScalarField& f, const MetricField& g, const Vector3& p) { return gradient(f, g, p); })
      .def("scaled", &ScalarField::scaled)
      .def_property_readonly("description", &ScalarField::description);

  py::class_<UnitSpeedCurve>(m, "Curve")
      .def_static("from_expressions",
                  [](const std::string& x, const std::string& y, const std::string& z, double t0, double t1,
                     const MetricField& metric) {
                    return UnitSpeedCurve::reparametrize(
                        ParamCurve::from_expressions(parse(x), parse(y), parse(z), t0, t1), metric);
                  },
                  py::arg("x"), py::arg("y"), py::arg("z"), py::arg("t_min"), py::arg("t_max"),
                  py::arg("metric") = MetricField::euclidean())
      .def_static("from_samples",
                  [](const std::vector<double>& t, const std::vector<Vector3>& points, const MetricField& metric) {
                    SampledCurve sc;
                    sc.t = t;
                    sc.points.assign(points.begin(), points.end());
                    return UnitSpeedCurve::reparametrize(curve_from_samples(sc), metric);
                  },
                  py::arg("t"), py::arg("points"), py::arg("metric") = MetricField::euclidean())
      .def_property_readonly("length", &UnitSpeedCurve::length)
      .def("position", &UnitSpeedCurve::position)
      .def("tangent", &UnitSpeedCurve::tangent)
      .def("grid", [](const UnitSpeedCurve& c, std::size_t n) { return uniform_grid(c, n); });

  py::class_<FrenetSample>(m, "FrenetSample")
      .def_readonly("s", &FrenetSample::s)
      .def_readonly("position", &FrenetSample::position)
      .def_readonly("T", &FrenetSample::T)
      .def_readonly("N", &FrenetSample::N)
      .def_readonly("B", &FrenetSample::B)
      .def_readonly("kappa", &FrenetSample::kappa)
      .def_readonly("tau", &FrenetSample::tau)
      .def_readonly("W", &FrenetSample::W)
      .def_readonly("W0", &FrenetSample::W0);

  m.def("frenet", [](const UnitSpeedCurve& c, const MetricField& g, double s) { return frenet_apparatus(c, g, s); });
  m.def("frenet_series", [](const UnitSpeedCurve& c, const MetricField& g, const std::vector<double>& grid) {
    py::gil_scoped_release release;
    return frenet_series(c, g, grid);
  });

  m.def(
      "classify",
      [](const ScalarField& f, const UnitSpeedCurve& c, const MetricField& g, std::size_t grid, const py::object& tol) {
        const Tolerances t = make_tolerances(tol, c.source());
        ClassificationReport r;
        {
          py::gil_scoped_release release;
          r = classify(measure_along(f, c, g, uniform_grid(c, grid)), t);
        }
        py::dict d;
        py::dict eik;
        eik["verdict"] = r.eikonal.verdict();
        eik["grad_norm"] = constancy(r.eikonal.norm);
        d["eikonal_along"] = eik;
        py::dict aff;
        aff["verdict"] = r.affine.affine;
        aff["max_residual"] = r.affine.max_residual;
        d["affine_along"] = aff;
        d["slant_helix"] = helix(r.slant);
        d["darboux_helix"] = helix(r.darboux);
        d["non_normed_darboux"] = helix(r.non_normed);
        py::dict prec;
        prec["verdict"] = r.precession.verdict;
        prec["w"] = r.precession.w;
        prec["mu"] = r.precession.mu;
        prec["general_helix"] = r.precession.general_helix;
        d["constant_precession"] = prec;
        d["notes"] = r.notes;
        return d;
      },
      py::arg("field"), py::arg("curve"), py::arg("metric"), py::arg("grid") = 1024, py::arg("tol") = py::none());

  m.def(
      "verify",
      [](const ScalarField& f, const UnitSpeedCurve& c, const MetricField& g, std::size_t grid, const py::object& tol) {
        const Tolerances t = make_tolerances(tol, c.source());
        std::optional<AlongCurve> data;
        {
          py::gil_scoped_release release;
          data = measure_along(f, c, g, uniform_grid(c, grid));
        }
        py::dict d;
        const auto t21 = verify_theorem_2_1(*data, t);
        d["thm2.1"] = std::string(to_string(t21.status));
        d["slant_invariant"] = constancy(t21.invariant);
        d["thm2.2"] = std::string(to_string(verify_theorem_2_2(*data, t).status));
        d["thm2.3"] = std::string(to_string(verify_theorem_2_3(*data, t).status));
        d["cor2.1-2.4"] = std::string(to_string(verify_corollaries_2_3_2_4(*data, t).status));
        return d;
      },
      py::arg("field"), py::arg("curve"), py::arg("metric"), py::arg("grid") = 1024, py::arg("tol") = py::none());

  m.def("check_constant_precession",
        [](const std::vector<double>& s, const std::vector<double>& kappa, const std::vector<double>& tau, double tol) {
          const auto r = check_constant_precession(CurvatureProfile{s, kappa, tau, ProfileProvenance::Prescribed}, tol);
          return py::make_tuple(r.verdict, r.w, r.mu);
        },
        py::arg("s"), py::arg("kappa"), py::arg("tau"), py::arg("tol") = 1e-6);

  m.def(
      "integrate_profile",
      [](const std::string& kappa, const std::string& tau, double s0, double s1, std::size_t steps) {
        const auto spec = profile_from_expressions(parse(kappa), parse(tau), s0, s1, (s1 - s0) / static_cast<double>(steps));
        const auto out = integrate_frenet(spec);
        std::vector<Vector3> pts;
        for (const auto& f : out.frames) pts.push_back(f.position);
        return py::make_tuple(out.s, pts);
      },
      py::arg("kappa"), py::arg("tau"), py::arg("s_begin"), py::arg("s_end"), py::arg("steps") = 8192);

  m.def("example_2_1", [] {
    const Fixture fx = example_2_1();
    return py::make_tuple(fx.curve, fx.field, fx.metric);
  });
  m.def(
      "precession_fixture",
      [](double w, double mu) {
        const PrecessionFixture p = precession_fixture(w, mu);
        return py::make_tuple(p.fixture.curve, p.fixture.field, p.fixture.metric);
      },
      py::arg("w"), py::arg("mu"));

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = cli::run(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  });

  m.attr("__version__") = std::string(cli::kToolVersion);
}
