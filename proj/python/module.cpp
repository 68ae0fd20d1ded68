#include "finphase/multipoly.hpp"
#include "finphase/oscillatory.hpp"
#include "finphase/polydetect.hpp"
#include "finphase/sections.hpp"
#include "finphase/stphase.hpp"
#include "finphase/surfaces.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace finphase;

PYBIND11_MODULE(_core, m) {
    m.doc() = "core bindings: surfaces, section volumes, oscillatory "
              "integrals, exact lemma checks";

    py::class_<MultiPoly>(m, "MultiPoly")
        .def(py::init<int>())
        .def_static("from_json", &MultiPoly::from_json)
        .def("to_json", &MultiPoly::to_json)
        .def("dim", &MultiPoly::dim)
        .def("degree", &MultiPoly::degree)
        .def("eval",
             [](const MultiPoly& p, const std::vector<double>& x) {
                 return p.eval(x);
             })
        .def("__mul__",
             [](const MultiPoly& a, const MultiPoly& b) { return a * b; })
        .def("__add__",
             [](const MultiPoly& a, const MultiPoly& b) { return a + b; });
    m.def("t_k_symbol", &t_k_symbol);
    m.def("laplacian", &laplacian);
    m.def("iterated_laplacian_at_zero",
          [](const MultiPoly& p, int j) {
              return static_cast<double>(iterated_laplacian_at_zero(p, j));
          });

    py::class_<GraphSurface>(m, "GraphSurface")
        .def("n", &GraphSurface::n)
        .def("r_dom", &GraphSurface::r_dom)
        .def("name", &GraphSurface::name)
        .def("f", &GraphSurface::f);
    m.def("surface_from_json", &surface_from_json);

    py::class_<TangentFrame>(m, "TangentFrame")
        .def_readonly("xi", &TangentFrame::xi)
        .def_readonly("a", &TangentFrame::a)
        .def_readonly("h", &TangentFrame::h)
        .def_readonly("residual", &TangentFrame::residual);
    m.def("inverse_gauss", &inverse_gauss, py::arg("surface"), py::arg("xi"),
          py::arg("tol") = 1e-12, py::arg("max_iter") = 100);
    m.def("gaussian_curvature", &gaussian_curvature);
    m.def("contact_order", &contact_order);

    py::class_<VolumeProfile>(m, "VolumeProfile")
        .def_readonly("t_grid", &VolumeProfile::t_grid)
        .def_readonly("values", &VolumeProfile::values)
        .def_readonly("err", &VolumeProfile::err)
        .def_readonly("method", &VolumeProfile::method);
    m.def("volume_profile", &volume_profile, py::arg("surface"), py::arg("xi"),
          py::arg("t_grid"), py::arg("c"), py::arg("angular_nodes") = 256,
          py::arg("seed") = 20240901, py::arg("mc_samples") = 2000000);
    m.def("leading_exponent",
          [](const VolumeProfile& p) {
              ExponentFit f = leading_exponent(p);
              return std::make_pair(f.exponent, f.std_error);
          });
    m.def("detect_json", [](const VolumeProfile& p, int max_degree) {
        return detect(p, max_degree).to_json();
    });

    py::class_<OscSample>(m, "OscSample")
        .def_readonly("lambda_grid", &OscSample::lambda_grid)
        .def_readonly("I", &OscSample::I)
        .def_readonly("F1", &OscSample::F1)
        .def_readonly("F2", &OscSample::F2)
        .def_readonly("F3", &OscSample::F3);
    m.def(
        "compute_osc_sample",
        [](const GraphSurface& s, const TangentFrame& fr, double c,
           const std::vector<double>& lg, int k) {
            CutoffSpec spec;
            spec.c = c;
            return compute_osc_sample(s, fr, spec, lg, k);
        },
        py::arg("surface"), py::arg("frame"), py::arg("c"),
        py::arg("lambda_grid"), py::arg("k") = 0);
    m.def("stokes_residual", &stokes_residual, py::arg("sample"),
          py::arg("eps") = 1e-30);
    m.def("decay_order", &decay_order);
    m.def("extract_expansion_json",
          [](const OscSample& s, int k_max, int k_min) {
              return extract_expansion(s, k_max, k_min).to_json();
          },
          py::arg("sample"), py::arg("k_max"), py::arg("k_min") = -1);

    m.def("quad_phase_partial_sum",
          [](const MultiPoly& p, double mu, int j_count) {
              return quad_phase_expand(p, j_count - 1).evaluate(mu, j_count);
          });
    m.def("leading_term_indices_json", [](int m_, int alpha, int n, int N0) {
        return leading_term_indices(m_, alpha, n, N0).to_json();
    });
    m.def("delta_vanishing_is_zero", [](const MultiPoly& H, int m_, int alpha) {
        DeltaVanishing dv = delta_vanishing_check(H, m_, alpha);
        if (!dv.identity_ok)
            throw std::runtime_error("exact identity check failed");
        return dv.value == 0;
    });
    m.def("verify_phi_lemma",
          [](const GraphSurface& s, const MultiPoly& H_m, int m_) {
              return verify_phi_lemma(morse_normalize(s), H_m, m_);
          });
}
