#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pestctl/scenarios.hpp"

namespace py = pybind11;
using namespace pestctl;

namespace {

py::array_t<double> trajectory_values(const Trajectory& t) {
    py::array_t<double> out({t.values.size(), static_cast<std::size_t>(4)});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t k = 0; k < t.values.size(); ++k) {
        for (int c = 0; c < 4; ++c) view(k, c) = t.values[k][c];
    }
    return out;
}

py::array_t<double> trajectory_times(const Trajectory& t) {
    py::array_t<double> out(t.values.size());
    auto view = out.mutable_unchecked<1>();
    for (std::size_t k = 0; k < t.values.size(); ++k) view(k) = t.grid.node(k);
    return out;
}

py::array_t<double> schedule_values(const ControlSchedule& s) {
    py::array_t<double> out({s.values.size(), static_cast<std::size_t>(3)});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t k = 0; k < s.values.size(); ++k) {
        view(k, 0) = s.values[k].u1;
        view(k, 1) = s.values[k].u2;
        view(k, 2) = s.values[k].u3;
    }
    return out;
}

ControlSchedule schedule_from_array(const TimeGrid& grid, py::array_t<double> values) {
    const auto view = values.unchecked<2>();
    if (static_cast<std::size_t>(view.shape(0)) != grid.n_nodes() || view.shape(1) != 3) {
        throw py::value_error("control array must have shape (n_steps + 1, 3)");
    }
    ControlSchedule s;
    s.grid = grid;
    s.values.resize(grid.n_nodes());
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
        s.values[k] = ControlTriple{view(k, 0), view(k, 1), view(k, 2)};
    }
    return s;
}

}  // namespace

PYBIND11_MODULE(pestctl, m) {
    m.doc() = "crop pest dynamics: simulation, equilibria, stability and optimal control";

    py::register_exception<NumericDomainError>(m, "NumericDomainError");
    py::register_exception<NoCoexistence>(m, "NoCoexistenceError");
    py::register_exception<StepUnstable>(m, "StepUnstableError");
    py::register_exception<PositivityViolated>(m, "PositivityViolatedError");
    py::register_exception<ConsistencyError>(m, "ConsistencyCheckError");

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def_readwrite("r", &ModelParams::r)
        .def_readwrite("K", &ModelParams::K)
        .def_readwrite("alpha", &ModelParams::alpha)
        .def_readwrite("phi", &ModelParams::phi)
        .def_readwrite("a", &ModelParams::a)
        .def_readwrite("m1", &ModelParams::m1)
        .def_readwrite("m2", &ModelParams::m2)
        .def_readwrite("lam", &ModelParams::lambda)
        .def_readwrite("d", &ModelParams::d)
        .def_readwrite("delta", &ModelParams::delta)
        .def_readwrite("gamma", &ModelParams::gamma)
        .def_readwrite("sigma", &ModelParams::sigma)
        .def_readwrite("eta", &ModelParams::eta)
        .def_readwrite("omega", &ModelParams::omega)
        .def("validate", &ModelParams::validate)
        .def("__repr__", [](const ModelParams& p) {
            return "ModelParams(r=" + std::to_string(p.r) + ", K=" + std::to_string(p.K) +
                   ", alpha=" + std::to_string(p.alpha) + ", ...)";
        });

    py::class_<State>(m, "State")
        .def(py::init<>())
        .def(py::init([](double X, double S, double I, double A) {
                 return State{X, S, I, A};
             }),
             py::arg("X"), py::arg("S"), py::arg("I"), py::arg("A"))
        .def_readwrite("X", &State::X)
        .def_readwrite("S", &State::S)
        .def_readwrite("I", &State::I)
        .def_readwrite("A", &State::A)
        .def("__repr__", [](const State& s) {
            return "State(X=" + std::to_string(s.X) + ", S=" + std::to_string(s.S) +
                   ", I=" + std::to_string(s.I) + ", A=" + std::to_string(s.A) + ")";
        });

    py::class_<ControlTriple>(m, "ControlTriple")
        .def(py::init<>())
        .def(py::init([](double u1, double u2, double u3) {
                 return ControlTriple{u1, u2, u3};
             }),
             py::arg("u1"), py::arg("u2"), py::arg("u3"))
        .def_readwrite("u1", &ControlTriple::u1)
        .def_readwrite("u2", &ControlTriple::u2)
        .def_readwrite("u3", &ControlTriple::u3);

    py::class_<TimeGrid>(m, "TimeGrid")
        .def(py::init([](double t0, double tf, std::size_t n_steps) {
                 return TimeGrid{t0, tf, n_steps};
             }),
             py::arg("t0"), py::arg("tf"), py::arg("n_steps"))
        .def_readwrite("t0", &TimeGrid::t0)
        .def_readwrite("tf", &TimeGrid::tf)
        .def_readwrite("n_steps", &TimeGrid::n_steps)
        .def("step", &TimeGrid::step);

    py::class_<ObjectiveWeights>(m, "ObjectiveWeights")
        .def(py::init<>())
        .def_readwrite("P1", &ObjectiveWeights::P1)
        .def_readwrite("P2", &ObjectiveWeights::P2)
        .def_readwrite("P3", &ObjectiveWeights::P3)
        .def_readwrite("Q", &ObjectiveWeights::Q)
        .def_readwrite("R", &ObjectiveWeights::R);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("grid", &Trajectory::grid)
        .def_property_readonly("times", &trajectory_times)
        .def_property_readonly("values", &trajectory_values)
        .def("at", [](const Trajectory& t, double time) -> Vec4 { return t.at(time); });

    py::class_<ControlSchedule>(m, "ControlSchedule")
        .def_readonly("grid", &ControlSchedule::grid)
        .def_property_readonly("values", &schedule_values)
        .def_static("constant",
                    [](const TimeGrid& g, const ControlTriple& u) {
                        return ControlSchedule::constant(g, u);
                    })
        .def_static("from_array", &schedule_from_array, py::arg("grid"), py::arg("values"));

    py::class_<BoundsCertificate>(m, "BoundsCertificate")
        .def_readonly("L", &BoundsCertificate::L)
        .def_readonly("bound_XSI", &BoundsCertificate::bound_XSI)
        .def_readonly("bound_A", &BoundsCertificate::bound_A)
        .def_readonly("sup_XSI", &BoundsCertificate::sup_XSI)
        .def_readonly("sup_A", &BoundsCertificate::sup_A)
        .def_readonly("tail_only", &BoundsCertificate::tail_only)
        .def_readonly("satisfied", &BoundsCertificate::satisfied);

    py::enum_<EquilibriumKind>(m, "EquilibriumKind")
        .value("Axial", EquilibriumKind::Axial)
        .value("PestFree", EquilibriumKind::PestFree)
        .value("HealthyPestFree", EquilibriumKind::HealthyPestFree)
        .value("Coexistence", EquilibriumKind::Coexistence);

    py::class_<Equilibrium>(m, "Equilibrium")
        .def_readonly("kind", &Equilibrium::kind)
        .def_readonly("state", &Equilibrium::state)
        .def_readonly("residual_norm", &Equilibrium::residual_norm)
        .def_readonly("existence_flags", &Equilibrium::existence_flags);

    py::class_<NonExistenceReport>(m, "NonExistenceReport")
        .def_readonly("c2", &NonExistenceReport::c2)
        .def_readonly("c1", &NonExistenceReport::c1)
        .def_readonly("c0", &NonExistenceReport::c0)
        .def_readonly("discriminant", &NonExistenceReport::discriminant)
        .def_readonly("root1", &NonExistenceReport::root1)
        .def_readonly("root2", &NonExistenceReport::root2)
        .def_readonly("positive_root_exists", &NonExistenceReport::positive_root_exists);

    py::class_<CubicCoefficients>(m, "CubicCoefficients")
        .def_readonly("a1", &CubicCoefficients::a1)
        .def_readonly("a2", &CubicCoefficients::a2)
        .def_readonly("a3", &CubicCoefficients::a3);

    py::class_<SexticCoefficients>(m, "SexticCoefficients")
        .def_readonly("a1", &SexticCoefficients::a1)
        .def_readonly("a2", &SexticCoefficients::a2)
        .def_readonly("a3", &SexticCoefficients::a3)
        .def_readonly("a4", &SexticCoefficients::a4)
        .def_readonly("a5", &SexticCoefficients::a5)
        .def_readonly("a6", &SexticCoefficients::a6)
        .def("eval", &SexticCoefficients::eval)
        .def("max_coefficient_magnitude", &SexticCoefficients::max_coefficient_magnitude);

    py::enum_<StabilityVerdict>(m, "StabilityVerdict")
        .value("Stable", StabilityVerdict::Stable)
        .value("Unstable", StabilityVerdict::Unstable)
        .value("Marginal", StabilityVerdict::Marginal);

    py::class_<ThresholdPair>(m, "ThresholdPair")
        .def_readonly("R0", &ThresholdPair::R0)
        .def_readonly("R1", &ThresholdPair::R1);

    py::class_<QuarticCoefficients>(m, "QuarticCoefficients")
        .def_readonly("y1", &QuarticCoefficients::y1)
        .def_readonly("y2", &QuarticCoefficients::y2)
        .def_readonly("y3", &QuarticCoefficients::y3)
        .def_readonly("y4", &QuarticCoefficients::y4);

    py::class_<E0Classification>(m, "E0Classification")
        .def_readonly("verdict", &E0Classification::verdict)
        .def_readonly("witness_eigenvalue", &E0Classification::witness_eigenvalue)
        .def_readonly("eigenvalues", &E0Classification::eigenvalues);

    py::class_<E1Classification>(m, "E1Classification")
        .def_readonly("verdict", &E1Classification::verdict)
        .def_readonly("thresholds", &E1Classification::thresholds)
        .def_readonly("closed_form_eigenvalues", &E1Classification::closed_form_eigenvalues)
        .def_readonly("max_real_numeric", &E1Classification::max_real_numeric);

    py::class_<CubicStabilityReport>(m, "CubicStabilityReport")
        .def_readonly("C1", &CubicStabilityReport::C1)
        .def_readonly("C2", &CubicStabilityReport::C2)
        .def_readonly("C3", &CubicStabilityReport::C3)
        .def_readonly("F11", &CubicStabilityReport::F11)
        .def_readonly("F22", &CubicStabilityReport::F22)
        .def_readonly("F33", &CubicStabilityReport::F33)
        .def_readonly("cond_F22_negative", &CubicStabilityReport::cond_F22_negative)
        .def_readonly("cond_C1_positive", &CubicStabilityReport::cond_C1_positive)
        .def_readonly("cond_C3_positive", &CubicStabilityReport::cond_C3_positive)
        .def_readonly("cond_hurwitz", &CubicStabilityReport::cond_hurwitz)
        .def_readonly("verdict", &CubicStabilityReport::verdict)
        .def_readonly("max_real_numeric", &CubicStabilityReport::max_real_numeric)
        .def_readonly("printed_C2", &CubicStabilityReport::printed_C2)
        .def_readonly("printed_C3", &CubicStabilityReport::printed_C3)
        .def_readonly("printed_max_rel_deviation",
                      &CubicStabilityReport::printed_max_rel_deviation);

    py::class_<EstarClassification>(m, "EstarClassification")
        .def_readonly("verdict", &EstarClassification::verdict)
        .def_readonly("y", &EstarClassification::y)
        .def_readonly("cond_y4_positive", &EstarClassification::cond_y4_positive)
        .def_readonly("cond_y1y2_y3", &EstarClassification::cond_y1y2_y3)
        .def_readonly("cond_hurwitz", &EstarClassification::cond_hurwitz)
        .def_readonly("max_real_numeric", &EstarClassification::max_real_numeric);

    py::class_<HopfScanResult>(m, "HopfScanResult")
        .def_readonly("alpha_star", &HopfScanResult::alpha_star)
        .def_readonly("psi_at_star", &HopfScanResult::psi_at_star)
        .def_readonly("imag_part_omega0", &HopfScanResult::imag_part_omega0)
        .def_readonly("omega0_sq_ratio", &HopfScanResult::omega0_sq_ratio)
        .def_readonly("transversality_value", &HopfScanResult::transversality_value)
        .def_readonly("predicted_re_slope", &HopfScanResult::predicted_re_slope)
        .def_readonly("fd_re_slope", &HopfScanResult::fd_re_slope)
        .def_readonly("eigen_crossing_verified", &HopfScanResult::eigen_crossing_verified)
        .def_readonly("equilibrium", &HopfScanResult::equilibrium);

    py::class_<HopfGridSample>(m, "HopfGridSample")
        .def_readonly("alpha", &HopfGridSample::alpha)
        .def_readonly("has_coexistence", &HopfGridSample::has_coexistence)
        .def_readonly("psi", &HopfGridSample::psi)
        .def_readonly("max_real_eig", &HopfGridSample::max_real_eig)
        .def_readonly("equilibrium", &HopfGridSample::equilibrium);

    py::class_<HopfScan>(m, "HopfScan")
        .def_readonly("points", &HopfScan::points)
        .def_readonly("skipped_segments", &HopfScan::skipped_segments)
        .def_readonly("grid", &HopfScan::grid);

    py::class_<SweepIteration>(m, "SweepIteration")
        .def_readonly("max_control_change", &SweepIteration::max_control_change)
        .def_readonly("objective", &SweepIteration::objective);

    py::class_<SweepResult>(m, "SweepResult")
        .def_readonly("state", &SweepResult::state)
        .def_readonly("adjoint", &SweepResult::adjoint)
        .def_readonly("control", &SweepResult::control)
        .def_readonly("objective", &SweepResult::objective)
        .def_readonly("iterations", &SweepResult::iterations)
        .def_readonly("converged", &SweepResult::converged)
        .def_readonly("history", &SweepResult::history);

    // model
    m.def("rhs", &rhs, py::arg("params"), py::arg("state"));
    m.def("rhs_controlled", &rhs_controlled, py::arg("params"), py::arg("state"),
          py::arg("control"));
    m.def("jacobian", &jacobian, py::arg("params"), py::arg("state"));

    // equilibria
    m.def("axial_equilibrium", &axial_equilibrium);
    m.def("pest_free_equilibrium", &pest_free_equilibrium);
    m.def("boundary_equilibrium_check", &boundary_equilibrium_check);
    m.def("cubic_coefficients", &cubic_coefficients);
    m.def("healthy_pest_free_equilibria", &healthy_pest_free_equilibria);
    m.def("coexistence_equilibria", &coexistence_equilibria);
    m.def("sextic_coefficients", &sextic_coefficients);

    // stability
    m.def("thresholds", &thresholds);
    m.def("eigenvalues", &eigenvalues, py::arg("matrix"));
    m.def("classify_E0", &classify_E0);
    m.def("classify_E1", &classify_E1);
    m.def("classify_E3", &classify_E3, py::arg("params"), py::arg("equilibrium"));
    m.def("quartic_coefficients", &quartic_coefficients, py::arg("params"),
          py::arg("equilibrium"));
    m.def("classify_Estar", &classify_Estar, py::arg("params"), py::arg("equilibrium"));
    m.def("psi", &psi, py::arg("params"), py::arg("alpha"));
    m.def("hopf_scan", &hopf_scan, py::arg("params"), py::arg("alpha_lo"), py::arg("alpha_hi"),
          py::arg("n_grid"));
    m.def("track_interior_equilibrium", &track_interior_equilibrium, py::arg("params"),
          py::arg("alpha"), py::arg("seed") = std::nullopt);

    // steady-state closed forms
    m.def("interior_crop_from_awareness", &interior_crop_from_awareness, py::arg("params"),
          py::arg("A"));
    m.def("interior_pests_from_crop_awareness", &interior_pests_from_crop_awareness,
          py::arg("params"), py::arg("X"), py::arg("A"));
    m.def("coexistence_awareness_threshold", &coexistence_awareness_threshold,
          py::arg("params"));

    // integration
    m.def(
        "integrate_forward",
        [](const ModelParams& p, const State& s0, const TimeGrid& grid,
           const ControlSchedule* u) { return integrate_forward(p, s0, grid, u); },
        py::arg("params"), py::arg("initial_state"), py::arg("grid"),
        py::arg("control") = nullptr);
    m.def("integrate_adjoint_backward", &integrate_adjoint_backward, py::arg("params"),
          py::arg("state_trajectory"), py::arg("control"), py::arg("weights"), py::arg("grid"));
    m.def("bounds_certificate", &bounds_certificate, py::arg("params"), py::arg("trajectory"));

    // optimal control
    m.def("objective", &objective, py::arg("params"), py::arg("weights"), py::arg("state"),
          py::arg("control"));
    m.def("hamiltonian", &hamiltonian, py::arg("params"), py::arg("weights"), py::arg("state"),
          py::arg("control"), py::arg("adjoint"));
    m.def("pmp_control", &pmp_control, py::arg("params"), py::arg("weights"), py::arg("state"),
          py::arg("adjoint"));
    m.def("fbsm", &fbsm, py::arg("params"), py::arg("weights"), py::arg("initial_state"),
          py::arg("grid"), py::arg("relaxation") = 0.5, py::arg("tol") = 1e-3,
          py::arg("max_iter") = 200);

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "0.1.0";
#endif
}
