// Python surface: the block-generator monoid with its classification and
// decompositions, the slice simulators, the discrete walk with its
// convergence report, and the quadratic-form layer.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>

#include "qstrotter/cocycle_sim.hpp"
#include "qstrotter/ito_algebra.hpp"
#include "qstrotter/qform.hpp"
#include "qstrotter/toy_fock.hpp"

namespace py = pybind11;
namespace ito = qst::ito;
namespace sim = qst::sim;
namespace walk = qst::walk;
namespace form = qst::form;

PYBIND11_MODULE(qstrotter, m) {
  m.doc() =
      "Block generators on h + (k tensor h): series monoid, growth bounds, "
      "decompositions, slice cocycles, Trotter products and discrete walks";

  py::class_<ito::BlockGenerator>(m, "BlockGenerator")
      .def(py::init<>())
      .def_readwrite("dim_h", &ito::BlockGenerator::dim_h)
      .def_readwrite("dim_k", &ito::BlockGenerator::dim_k)
      .def_readwrite("K", &ito::BlockGenerator::K)
      .def_readwrite("M", &ito::BlockGenerator::M)
      .def_readwrite("L", &ito::BlockGenerator::L)
      .def_readwrite("C", &ito::BlockGenerator::C)
      .def_static("zero", &ito::BlockGenerator::zero, py::arg("dim_h"),
                  py::arg("dim_k"))
      .def_static("from_matrix", &ito::BlockGenerator::from_matrix,
                  py::arg("matrix"), py::arg("dim_h"), py::arg("dim_k"))
      .def("validate", &ito::BlockGenerator::validate)
      .def("noise_dim", &ito::BlockGenerator::noise_dim)
      .def("total_dim", &ito::BlockGenerator::total_dim)
      .def("as_matrix", &ito::BlockGenerator::as_matrix)
      .def("norm", &ito::BlockGenerator::norm)
      .def("__repr__", [](const ito::BlockGenerator& f) {
        return "BlockGenerator(dim_h=" + std::to_string(f.dim_h) +
               ", dim_k=" + std::to_string(f.dim_k) + ")";
      });

  py::class_<ito::GeneratorClassReport>(m, "GeneratorClassReport")
      .def_readonly("is_quasicontractive",
                    &ito::GeneratorClassReport::is_quasicontractive)
      .def_readonly("beta0", &ito::GeneratorClassReport::beta0)
      .def_readonly("is_contractive",
                    &ito::GeneratorClassReport::is_contractive)
      .def_readonly("is_isometric", &ito::GeneratorClassReport::is_isometric)
      .def_readonly("is_coisometric",
                    &ito::GeneratorClassReport::is_coisometric)
      .def_readonly("is_unitary", &ito::GeneratorClassReport::is_unitary)
      .def_readonly("is_gaussian", &ito::GeneratorClassReport::is_gaussian)
      .def_readonly("is_pure_gaussian",
                    &ito::GeneratorClassReport::is_pure_gaussian)
      .def_readonly("is_wholly_non_gaussian",
                    &ito::GeneratorClassReport::is_wholly_non_gaussian)
      .def_readonly("is_pure_preservation",
                    &ito::GeneratorClassReport::is_pure_preservation)
      .def_readonly("is_pure_drift", &ito::GeneratorClassReport::is_pure_drift)
      .def_readonly("defect_spectrum",
                    &ito::GeneratorClassReport::defect_spectrum);

  py::class_<ito::SeriesDecomposition>(m, "SeriesDecomposition")
      .def_readonly("first", &ito::SeriesDecomposition::first)
      .def_readonly("second", &ito::SeriesDecomposition::second)
      .def_readonly("third", &ito::SeriesDecomposition::third);

  py::class_<ito::GaussianSplit>(m, "GaussianSplit")
      .def_readonly("non_gaussian_part", &ito::GaussianSplit::non_gaussian_part)
      .def_readonly("gaussian_part", &ito::GaussianSplit::gaussian_part)
      .def_readonly("basis_pres", &ito::GaussianSplit::basis_pres)
      .def_readonly("basis_gauss", &ito::GaussianSplit::basis_gauss);

  m.def("series", &ito::series, py::arg("f1"), py::arg("f2"));
  m.def("adjoint", &ito::adjoint, py::arg("f"));
  m.def("ito_defect", &ito::ito_defect, py::arg("f"));
  m.def("co_defect", &ito::co_defect, py::arg("f"));
  m.def(
      "growth_bound",
      [](const ito::BlockGenerator& f) { return ito::growth_bound(f); },
      py::arg("f"));
  m.def(
      "growth_bound_bisection",
      [](const ito::BlockGenerator& f) {
        return ito::growth_bound_bisection(f);
      },
      py::arg("f"));
  m.def(
      "classify",
      [](const ito::BlockGenerator& f) { return ito::classify(f); },
      py::arg("f"));
  m.def("defect_exchange_residual", &ito::defect_exchange_residual,
        py::arg("f"));
  m.def(
      "left_series_decomposition",
      [](const ito::BlockGenerator& f) {
        return ito::left_series_decomposition(f);
      },
      py::arg("f"));
  m.def(
      "right_series_decomposition",
      [](const ito::BlockGenerator& f) {
        return ito::right_series_decomposition(f);
      },
      py::arg("f"));
  m.def("concat", &ito::concat, py::arg("f1"), py::arg("f2"));
  m.def("embed_left", &ito::embed_left, py::arg("f"), py::arg("extra_dim_k"));
  m.def("embed_right", &ito::embed_right, py::arg("f"),
        py::arg("extra_dim_k"));
  m.def("compress_noise", &ito::compress_noise, py::arg("f"),
        py::arg("frame"));
  m.def(
      "gaussian_split",
      [](const ito::BlockGenerator& f) { return ito::gaussian_split(f); },
      py::arg("f"));
  m.def("reassemble", &ito::reassemble, py::arg("split"));
  m.def(
      "dilate_to_unitary",
      [](const ito::BlockGenerator& f) { return ito::dilate_to_unitary(f); },
      py::arg("f"));
  m.def("phi", &ito::phi, py::arg("f"));
  m.def("phi_star", &ito::phi_star, py::arg("t"), py::arg("dim_h"),
        py::arg("dim_k"));
  m.def("inverse", &ito::inverse, py::arg("f"));
  m.def(
      "sample_quasicontractive",
      [](int dim_h, int dim_k, double beta, std::uint64_t seed) {
        return ito::sample_quasicontractive(dim_h, dim_k, beta, seed);
      },
      py::arg("dim_h"), py::arg("dim_k"), py::arg("beta"), py::arg("seed"));
  m.def("trotter_constant", &ito::trotter_constant, py::arg("f1"),
        py::arg("f2"));
  m.def("trotter_constant_n", &ito::trotter_constant_n, py::arg("fs"));
  m.def("noise_injection", &ito::noise_injection, py::arg("c"),
        py::arg("dim_h"));

  py::class_<sim::StepFunction>(m, "StepFunction")
      .def(py::init<>())
      .def_readwrite("breaks", &sim::StepFunction::breaks)
      .def_readwrite("values", &sim::StepFunction::values)
      .def_static("constant", &sim::StepFunction::constant, py::arg("value"))
      .def("validate", &sim::StepFunction::validate)
      .def("dim", &sim::StepFunction::dim)
      .def("value_at", &sim::StepFunction::value_at, py::arg("t"));

  m.def("weyl_generator", &sim::weyl_generator, py::arg("c"),
        py::arg("dim_h"));
  m.def("dressed_generator", &sim::dressed_generator, py::arg("f"),
        py::arg("cprime"), py::arg("c"));
  m.def("slice_cocycle", &sim::slice_cocycle, py::arg("f"), py::arg("gprime"),
        py::arg("g"), py::arg("r"), py::arg("t"));
  m.def("trotter_limit_slice", &sim::trotter_limit_slice, py::arg("fs"),
        py::arg("gprime"), py::arg("g"), py::arg("r"), py::arg("t"));
  m.def("expectation_error_bound", &sim::expectation_error_bound,
        py::arg("f1"), py::arg("f2"), py::arg("t"));
  m.def("mesh_error_bound", &sim::mesh_error_bound, py::arg("f1"),
        py::arg("f2"), py::arg("gprime"), py::arg("g"), py::arg("r"),
        py::arg("t"), py::arg("partition"));
  m.def("mesh_error_bound_n", &sim::mesh_error_bound_n, py::arg("fs"),
        py::arg("gprime"), py::arg("g"), py::arg("r"), py::arg("t"),
        py::arg("partition"));

  py::class_<walk::SliceResult>(m, "SliceResult")
      .def_readonly("matrix", &walk::SliceResult::matrix)
      .def_readonly("truncation_estimate",
                    &walk::SliceResult::truncation_estimate)
      .def_readonly("substeps", &walk::SliceResult::substeps);

  py::class_<walk::ReportRow>(m, "ReportRow")
      .def_readonly("mesh", &walk::ReportRow::mesh)
      .def_readonly("measured_error", &walk::ReportRow::measured_error)
      .def_readonly("bound", &walk::ReportRow::bound)
      .def_readonly("truncation_estimate",
                    &walk::ReportRow::truncation_estimate)
      .def_readonly("substeps", &walk::ReportRow::substeps)
      .def_readonly("conclusive", &walk::ReportRow::conclusive);

  py::class_<walk::TrotterReport>(m, "TrotterReport")
      .def_readonly("rows", &walk::TrotterReport::rows)
      .def_readonly("slope", &walk::TrotterReport::slope)
      .def_readonly("pass_", &walk::TrotterReport::pass)
      .def("__repr__", [](const walk::TrotterReport& r) {
        return std::string("TrotterReport(rows=") +
               std::to_string(r.rows.size()) +
               ", pass=" + (r.pass ? "True" : "False") + ")";
      });

  m.def("walk_step", &walk::walk_step, py::arg("f"), py::arg("h"));
  m.def("walk_slice", &walk::walk_slice, py::arg("f"), py::arg("gprime"),
        py::arg("g"), py::arg("r"), py::arg("t"), py::arg("substeps"));
  m.def("cell_product_slice", &walk::cell_product_slice, py::arg("fs"),
        py::arg("cprime"), py::arg("c"), py::arg("delta"),
        py::arg("substeps"));
  m.def("trotter_approximant_slice", &walk::trotter_approximant_slice,
        py::arg("fs"), py::arg("gprime"), py::arg("g"), py::arg("r"),
        py::arg("t"), py::arg("partition"), py::arg("substeps"));
  m.def(
      "trotter_report",
      [](const std::vector<ito::BlockGenerator>& fs,
         const sim::StepFunction& gprime, const sim::StepFunction& g, double r,
         double t, const std::vector<double>& meshes, long long substeps) {
        walk::ReportOptions opts;
        if (!meshes.empty()) opts.meshes = meshes;
        opts.substeps = substeps;
        return walk::trotter_report(fs, gprime, g, r, t, opts);
      },
      py::arg("fs"), py::arg("gprime"), py::arg("g"), py::arg("r"),
      py::arg("t"), py::arg("meshes") = std::vector<double>{},
      py::arg("substeps") = 0LL);

  py::class_<form::QuadForm>(m, "QuadForm")
      .def(py::init<>())
      .def_readwrite("dim_h", &form::QuadForm::dim_h)
      .def_readwrite("dim_k", &form::QuadForm::dim_k)
      .def_readwrite("domain_frame", &form::QuadForm::domain_frame)
      .def_readwrite("gamma", &form::QuadForm::gamma)
      .def_readwrite("L", &form::QuadForm::L)
      .def_readwrite("Ltilde", &form::QuadForm::Ltilde)
      .def_readwrite("C", &form::QuadForm::C)
      .def("validate", &form::QuadForm::validate)
      .def("domain_dim", &form::QuadForm::domain_dim)
      .def("noise_dim", &form::QuadForm::noise_dim);

  py::class_<form::FormVector>(m, "FormVector")
      .def(py::init<>())
      .def_readwrite("u", &form::FormVector::u)
      .def_readwrite("zeta", &form::FormVector::zeta);

  m.def("qf_identity", &form::qf_identity, py::arg("dim_h"), py::arg("dim_k"));
  m.def("bounded_to_form", &form::bounded_to_form, py::arg("f"));
  m.def(
      "qf_eval",
      [](const form::QuadForm& g, const form::FormVector& xi) {
        return form::qf_eval(g, xi);
      },
      py::arg("g"), py::arg("xi"));
  m.def(
      "qf_eval_pair",
      [](const form::QuadForm& g, const form::FormVector& xi,
         const form::FormVector& eta) { return form::qf_eval(g, xi, eta); },
      py::arg("g"), py::arg("xi"), py::arg("eta"));
  m.def("qf_adjoint", &form::qf_adjoint, py::arg("g"));
  m.def("qf_delta", &form::qf_delta, py::arg("a"), py::arg("b"));
  m.def("qf_series", &form::qf_series, py::arg("a"), py::arg("b"));
  m.def("qf_inverse", &form::qf_inverse, py::arg("g"));
  m.def("form_matrix", &form::form_matrix, py::arg("g"));
  m.def(
      "qf_defect_check",
      [](const form::QuadForm& g, double beta) {
        return form::qf_defect_check(g, beta);
      },
      py::arg("g"), py::arg("beta"));
  m.def("qf_triple_identity_residual", &form::qf_triple_identity_residual,
        py::arg("a"), py::arg("b"), py::arg("c"), py::arg("xi"));
  m.def("qf_defect_exchange_residual", &form::qf_defect_exchange_residual,
        py::arg("g"), py::arg("xi"));
}
