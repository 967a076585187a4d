#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "subdfo/errors.hpp"
#include "subdfo/interpolation.hpp"
#include "subdfo/io.hpp"
#include "subdfo/linear_kernel.hpp"
#include "subdfo/sample_geometry.hpp"
#include "subdfo/simplex_calculus.hpp"
#include "subdfo/subspace_bridge.hpp"
#include "subdfo/verify_harness.hpp"

namespace py = pybind11;
using namespace subdfo;

namespace {

FunctionOracle wrap_callable(Index n, py::function fn) {
  return FunctionOracle(n, [fn = std::move(fn)](const Vector& x) {
    py::gil_scoped_acquire gil;
    return fn(x).cast<double>();
  });
}

DirectionBundle make_bundle(const Matrix& s, const std::optional<Matrix>& t,
                            const std::optional<std::vector<Matrix>>& t_list) {
  if (t && t_list) throw Error(ErrorKind::InvalidArgument, "pass either T or T_list, not both");
  if (t_list) return DirectionBundle::per_direction(s, *t_list);
  return DirectionBundle::shared(s, t ? *t : s);
}

py::dict report_dict(const ConversionReport& r) {
  py::dict d;
  d["gradient_gap"] = r.gradient_gap;
  d["hessian_gap"] = r.hessian_gap;
  d["subspace_value_gap"] = r.subspace_value_gap;
  d["orthogonal_value_gap"] = r.orthogonal_value_gap;
  d["axis_orthogonal_gap"] = r.axis_orthogonal_gap;
  d["value_scale"] = r.value_scale;
  d["correction_applied"] = r.correction_applied;
  d["seed"] = r.seed;
  d["probes"] = r.probes;
  d["scale"] = r.scale;
  return d;
}

py::dict suite_dict(const TheoremSuiteResult& r) {
  py::dict d;
  d["theorem"] = std::string(to_string(r.theorem));
  d["trials"] = r.trials;
  d["failures"] = r.failures;
  d["max_gap"] = r.max_gap;
  d["tol"] = r.tol;
  d["seed"] = r.seed;
  d["separation_rate"] = r.separation_rate;
  py::list records;
  for (const TrialRecord& rec : r.records) {
    py::dict x;
    x["label"] = rec.label;
    x["trial"] = rec.trial;
    x["n"] = rec.n;
    x["d"] = rec.d;
    x["m"] = rec.m;
    x["function_class"] = rec.function_class;
    x["max_gap"] = rec.max_gap;
    x["passed"] = rec.passed;
    records.append(x);
  }
  d["records"] = records;
  return d;
}

}  // namespace

PYBIND11_MODULE(_subdfo, m) {
  m.doc() = "Quadratic interpolation models, simplex derivatives and subspace conversions.";

  static py::exception<Error> error(m, "SubdfoError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string kind(to_string(e.kind()));
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(kind + ": " + e.what());
      exc.attr("kind") = kind;
      exc.attr("residual") = e.residual();
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.def("svec", [](const Matrix& h) { return svec(SymMatrix::from_matrix(h)).coords; }, py::arg("H"));
  m.def(
      "smat", [](const Vector& v, Index n) { return smat({n, v}).matrix(); }, py::arg("v"), py::arg("n"));

  py::class_<SampleSet>(m, "SampleSet")
      .def(py::init([](Vector x0, Matrix displacements, Vector values, bool keep_duplicates) {
             return SampleSet(std::move(x0), std::move(displacements), std::move(values),
                              keep_duplicates ? DuplicatePolicy::Keep : DuplicatePolicy::MergeOrReject);
           }),
           py::arg("x0"), py::arg("displacements"), py::arg("values"), py::arg("keep_duplicates") = false)
      .def_property_readonly("dim", &SampleSet::dim)
      .def_property_readonly("size", &SampleSet::size)
      .def_property_readonly("x0", &SampleSet::base)
      .def_property_readonly("displacements", &SampleSet::displacements)
      .def_property_readonly("values", &SampleSet::values)
      .def("to_json", [](const SampleSet& y) { return io::to_json(y).dump(); })
      .def_static("from_json", [](const std::string& s) { return io::sampleset_from_json(io::Json::parse(s)); });

  py::class_<SubspaceFrame>(m, "SubspaceFrame")
      .def_property_readonly("Q", &SubspaceFrame::q)
      .def_property_readonly("x0", &SubspaceFrame::base)
      .def_property_readonly("hatted", &SubspaceFrame::hatted)
      .def_property_readonly("dim", &SubspaceFrame::dim)
      .def_property_readonly("ambient", &SubspaceFrame::ambient)
      .def("to_full", &SubspaceFrame::to_full, py::arg("xhat"));

  py::class_<ModelResult>(m, "ModelResult")
      .def_property_readonly("kind", [](const ModelResult& r) { return std::string(to_string(r.kind)); })
      .def_property_readonly("x0", [](const ModelResult& r) { return r.model.base; })
      .def_property_readonly("c", [](const ModelResult& r) { return r.model.constant; })
      .def_property_readonly("g", [](const ModelResult& r) { return r.model.gradient; })
      .def_property_readonly("H", [](const ModelResult& r) { return r.model.hessian.matrix(); })
      .def_property_readonly("ambiguity_basis", [](const ModelResult& r) { return r.gradients.ambiguity_basis; })
      .def_property_readonly("href",
                             [](const ModelResult& r) -> std::optional<Matrix> {
                               if (!r.reference_hessian) return std::nullopt;
                               return r.reference_hessian->matrix();
                             })
      .def_property_readonly("H_raw", [](const ModelResult& r) { return r.raw_hessian; })
      .def_property_readonly("consumed", [](const ModelResult& r) { return r.consumed; })
      .def("__call__", [](const ModelResult& r, const Vector& x) { return r.model.evaluate(x); }, py::arg("x"))
      .def("family_distance", [](const ModelResult& r, const Vector& g) { return r.gradients.distance(g); },
           py::arg("g"))
      .def("to_json", [](const ModelResult& r) { return io::to_json(r).dump(); })
      .def_static("from_json", [](const std::string& s) { return io::model_from_json(io::Json::parse(s)); });

  m.def("fit_dqi", [](const SampleSet& y) { return fit_dqi(y); }, py::arg("samples"));
  m.def("fit_mn", [](const SampleSet& y) { return fit_mn(y); }, py::arg("samples"));
  m.def("fit_mfn", [](const SampleSet& y) { return fit_mfn(y); }, py::arg("samples"));
  m.def(
      "fit_lfu", [](const SampleSet& y, const Matrix& href) { return fit_lfu(y, SymMatrix::from_matrix(href)); },
      py::arg("samples"), py::arg("href"));
  m.def(
      "fit_qgsd",
      [](const Vector& x0, py::function f, const Matrix& s, const std::optional<Matrix>& t,
         const std::optional<std::vector<Matrix>>& t_list, const std::string& variant, bool symmetrize) {
        return fit_qgsd(x0, make_bundle(s, t, t_list), wrap_callable(x0.size(), std::move(f)),
                        qgsd_variant_from_string(variant), symmetrize);
      },
      py::arg("x0"), py::arg("f"), py::arg("S"), py::arg("T") = py::none(), py::arg("T_list") = py::none(),
      py::arg("variant") = "simple", py::arg("symmetrize") = false);

  m.def(
      "gsg",
      [](const Vector& x0, py::function f, const Matrix& s) {
        return gsg(x0, s, wrap_callable(x0.size(), std::move(f)));
      },
      py::arg("x0"), py::arg("f"), py::arg("S"));
  m.def(
      "gsh",
      [](const Vector& x0, py::function f, const Matrix& s, const std::optional<Matrix>& t,
         const std::optional<std::vector<Matrix>>& t_list) {
        return gsh(x0, make_bundle(s, t, t_list), wrap_callable(x0.size(), std::move(f)));
      },
      py::arg("x0"), py::arg("f"), py::arg("S"), py::arg("T") = py::none(), py::arg("T_list") = py::none());

  m.def("detect_subspace", [](const SampleSet& y) { return detect_subspace(y); }, py::arg("samples"));
  m.def("hat_sampleset", [](const SampleSet& y, const SubspaceFrame& f) { return hat_sampleset(y, f); },
        py::arg("samples"), py::arg("frame"));
  m.def("restrict_hessian", &restrict_hessian, py::arg("H"), py::arg("frame"));
  m.def("lift_mn", &lift_mn, py::arg("sub"), py::arg("frame"));
  m.def("lift_mfn", &lift_mfn, py::arg("sub"), py::arg("frame"));
  m.def(
      "lift_lfu",
      [](const ModelResult& sub, const SubspaceFrame& f, const Matrix& href) {
        return lift_lfu(sub, f, SymMatrix::from_matrix(href));
      },
      py::arg("sub"), py::arg("frame"), py::arg("href"));
  m.def("lift_qgsd", &lift_qgsd, py::arg("sub"), py::arg("frame"));
  m.def("restrict_model", &restrict_model, py::arg("full"), py::arg("frame"));
  m.def(
      "compare_models",
      [](const ModelResult& full, const ModelResult& sub, const SubspaceFrame& f, Index probes,
         std::uint64_t seed) { return report_dict(compare_models(full, sub, f, probes, seed)); },
      py::arg("full"), py::arg("sub"), py::arg("frame"), py::arg("probes") = kDefaultProbes,
      py::arg("seed") = 0);

  m.def(
      "run_suite",
      [](const std::string& theorem, Index trials, std::uint64_t seed, double tol, Index n_min, Index n_max,
         Index d_max) {
        const TheoremId id = theorem_from_string(theorem);
        if (id == TheoremId::NegativeControls) return suite_dict(negative_controls(seed, trials, tol));
        return suite_dict(run_suite(id, trials, {n_min, n_max, d_max}, tol, seed));
      },
      py::arg("theorem"), py::arg("trials") = 200, py::arg("seed") = 42, py::arg("tol") = 1e-8,
      py::arg("n_min") = 3, py::arg("n_max") = 30, py::arg("d_max") = 6);
}
