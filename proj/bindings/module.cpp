#include <pybind11/pybind11.h>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/stl.h>

#include "pairlind/sweep.hpp"

namespace py = pybind11;
using namespace pairlind;

namespace {

Drive make_drive_hz(double delta_omega_hz, std::optional<double> omega_r_hz,
                    std::optional<double> omega_hz) {
    Drive d;
    d.delta_omega = delta_omega_hz;
    d.omega_r = omega_r_hz;
    d.omega = omega_hz;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Two-photon qubit-oscillator cooling: operators, rates, "
              "Lindblad generators, steady states and sweeps";

    // ----- algebra -----
    py::enum_<BasisKind>(m, "BasisKind")
        .value("Fock", BasisKind::Fock)
        .value("Su11Sector", BasisKind::Su11Sector)
        .value("Qubit", BasisKind::Qubit)
        .value("QubitTensorFock", BasisKind::QubitTensorFock)
        .value("Composite", BasisKind::Composite);

    py::class_<BasisTag>(m, "BasisTag")
        .def_static("fock", &BasisTag::fock, py::arg("cutoff"))
        .def_static("sector", &BasisTag::sector, py::arg("j"), py::arg("m_cutoff"))
        .def_static("qubit", &BasisTag::qubit)
        .def_static("qubit_fock", &BasisTag::qubit_fock, py::arg("cutoff"))
        .def_readonly("kind", &BasisTag::kind)
        .def_readonly("cutoff", &BasisTag::cutoff)
        .def_readonly("j", &BasisTag::j)
        .def("dim", &BasisTag::dim)
        .def("__eq__",
             [](const BasisTag& a, const BasisTag& b) { return a == b; });

    py::class_<Operator>(m, "Operator")
        .def(py::init<Matrix, BasisTag>(), py::arg("entries"), py::arg("basis"))
        .def_property_readonly("entries", &Operator::entries)
        .def_property_readonly("dim", &Operator::dim)
        .def_property_readonly("basis", &Operator::basis)
        .def("adjoint", &Operator::adjoint)
        .def("__add__", [](const Operator& a, const Operator& b) { return a + b; })
        .def("__sub__", [](const Operator& a, const Operator& b) { return a - b; })
        .def("__matmul__", [](const Operator& a, const Operator& b) { return a * b; })
        .def("__rmul__", [](const Operator& a, Complex s) { return s * a; });

    m.def("identity_op", &identity_op, py::arg("basis"));
    m.def("ladder_ops", &ladder_ops, py::arg("cutoff"),
          "(a, a_dag) on the truncated Fock basis");
    m.def(
        "su11_from_mode",
        [](int cutoff) {
            auto t = su11_from_mode(cutoff);
            return py::make_tuple(t.bp, t.bm, t.bz);
        },
        py::arg("cutoff"), "(beta+, beta-, beta_z) built from the mode operators");
    m.def(
        "su11_sector",
        [](double j, int m_cutoff) {
            auto t = su11_sector(j, m_cutoff);
            return py::make_tuple(t.bp, t.bm, t.bz);
        },
        py::arg("j"), py::arg("m_cutoff"),
        "(beta+, beta-, beta_z) on the sector basis");
    m.def("tensor", &tensor, py::arg("a"), py::arg("b"));
    m.def("pauli_x", &pauli_x);
    m.def("pauli_y", &pauli_y);
    m.def("pauli_z", &pauli_z);
    m.def("sigma_plus", &sigma_plus);
    m.def("sigma_minus", &sigma_minus);
    m.def(
        "fock_to_sector",
        [](int n) {
            auto s = fock_to_sector(n);
            return py::make_tuple(s.j, s.m);
        },
        py::arg("n"));
    m.def(
        "sector_to_fock",
        [](double j, int mm) { return sector_to_fock({j, mm}); }, py::arg("j"),
        py::arg("m"));
    m.def("parity_states", &parity_states, py::arg("basis"), py::arg("parity"));

    // ----- model -----
    m.def("angular", &angular, py::arg("cyclic_hz"));
    m.def("cyclic_hz", &cyclic_hz, py::arg("angular"));

    py::class_<Drive>(m, "Drive")
        .def(py::init<>())
        .def_readwrite("delta_omega", &Drive::delta_omega)
        .def_readwrite("omega_r", &Drive::omega_r)
        .def_readwrite("omega", &Drive::omega);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def_readwrite("omega_c", &ModelParams::omega_c)
        .def_readwrite("delta_q", &ModelParams::delta_q)
        .def_readwrite("g", &ModelParams::g)
        .def_readwrite("gamma0", &ModelParams::gamma0)
        .def_readwrite("kappa", &ModelParams::kappa)
        .def_readwrite("n_bar", &ModelParams::n_bar)
        .def_readwrite("chi_bar", &ModelParams::chi_bar)
        .def_readwrite("drive", &ModelParams::drive);

    m.def(
        "params_from_cyclic",
        [](double omega_c_hz, double delta_q_hz, double g_hz, double gamma0_hz,
           double kappa_hz, double n_bar, double chi_bar_hz, double delta_omega_hz,
           std::optional<double> omega_r_hz, std::optional<double> omega_hz) {
            return params_from_cyclic(
                omega_c_hz, delta_q_hz, g_hz, gamma0_hz, kappa_hz, n_bar,
                chi_bar_hz, make_drive_hz(delta_omega_hz, omega_r_hz, omega_hz));
        },
        py::arg("omega_c_hz"), py::arg("delta_q_hz"), py::arg("g_hz"),
        py::arg("gamma0_hz"), py::arg("kappa_hz"), py::arg("n_bar") = 0.0,
        py::arg("chi_bar_hz") = 0.0, py::arg("delta_omega_hz") = 0.0,
        py::arg("omega_r_hz") = std::nullopt, py::arg("omega_hz") = std::nullopt);
    m.def("check_params", &check_params, py::arg("params"),
          "validates and returns warnings");

    py::class_<DerivedRates>(m, "DerivedRates")
        .def(py::init<>())
        .def_readwrite("theta", &DerivedRates::theta)
        .def_readwrite("g2", &DerivedRates::g2)
        .def_readwrite("g0", &DerivedRates::g0)
        .def_readwrite("gamma_plus", &DerivedRates::gamma_plus)
        .def_readwrite("gamma_minus", &DerivedRates::gamma_minus)
        .def_readwrite("gamma_deph", &DerivedRates::gamma_deph)
        .def_readwrite("gamma_par", &DerivedRates::gamma_par)
        .def_readwrite("gamma_perp", &DerivedRates::gamma_perp)
        .def_readwrite("sz0", &DerivedRates::sz0)
        .def_readwrite("gamma_up", &DerivedRates::gamma_up)
        .def_readwrite("gamma_down", &DerivedRates::gamma_down)
        .def_readwrite("eta", &DerivedRates::eta)
        .def_readwrite("alpha", &DerivedRates::alpha)
        .def_readwrite("n_sat", &DerivedRates::n_sat)
        .def_readwrite("delta_omega", &DerivedRates::delta_omega)
        .def_readwrite("omega_r", &DerivedRates::omega_r)
        .def_readwrite("omega", &DerivedRates::omega);

    m.def("derive_rates", &derive_rates, py::arg("params"));

    py::class_<BathParams>(m, "BathParams")
        .def(py::init([](double nu, double chi_tilde, double chi) {
                 return BathParams{nu, chi_tilde, chi};
             }),
             py::arg("nu"), py::arg("chi_tilde"), py::arg("chi"))
        .def_readwrite("nu", &BathParams::nu)
        .def_readwrite("chi_tilde", &BathParams::chi_tilde)
        .def_readwrite("chi", &BathParams::chi);
    m.def("bath_rates", &bath_rates, py::arg("bath"), py::arg("omega_c"),
          "(kappa, chi_bar), angular units");

    py::class_<ResonanceResult>(m, "ResonanceResult")
        .def_readonly("omega_r", &ResonanceResult::omega_r)
        .def_readonly("iterations", &ResonanceResult::iterations)
        .def_readonly("residual", &ResonanceResult::residual);
    m.def("resonance_omega_r", &resonance_omega_r, py::arg("params"), py::arg("j"),
          py::arg("tol") = angular_resonance_tol(), py::arg("max_iter") = 100);

    py::class_<ValidityFlags>(m, "ValidityFlags")
        .def_readonly("good_cavity", &ValidityFlags::good_cavity)
        .def_readonly("below_saturation", &ValidityFlags::below_saturation)
        .def_readonly("cooling_regime", &ValidityFlags::cooling_regime);
    m.def("validity_flags", &validity_flags, py::arg("rates"), py::arg("params"),
          py::arg("n_mean"), py::arg("much_less_factor") = 10.0);

    // ----- analytic -----
    py::class_<SteadyStats>(m, "SteadyStats")
        .def_readonly("beta_z_mean", &SteadyStats::beta_z_mean)
        .def_readonly("n_mean", &SteadyStats::n_mean)
        .def_readonly("b2", &SteadyStats::b2)
        .def_readonly("b4", &SteadyStats::b4)
        .def_readonly("g2", &SteadyStats::g2)
        .def_readonly("g4", &SteadyStats::g4);
    m.def("analytic_moments", &analytic_moments, py::arg("eta"), py::arg("j"));
    m.def("analytic_g", &analytic_g, py::arg("eta"), py::arg("j"));
    m.def("analytic_g_parity", &analytic_g_parity, py::arg("eta"), py::arg("j"));
    m.def("oracle_moments", &oracle_moments, py::arg("eta"), py::arg("j"),
          py::arg("m_cutoff"));

    // ----- dynamics -----
    py::class_<DensityMatrix>(m, "DensityMatrix")
        .def(py::init<Matrix, BasisTag>(), py::arg("entries"), py::arg("basis"))
        .def_static("basis_state", &DensityMatrix::basis_state, py::arg("basis"),
                    py::arg("index"))
        .def_static("thermal_fock", &DensityMatrix::thermal_fock, py::arg("n_bar"),
                    py::arg("cutoff"))
        .def_static("thermal_sector", &DensityMatrix::thermal_sector,
                    py::arg("n_bar"), py::arg("j"), py::arg("m_cutoff"))
        .def_property_readonly("entries", &DensityMatrix::entries)
        .def_property_readonly("dim", &DensityMatrix::dim)
        .def_property_readonly("basis", &DensityMatrix::basis)
        .def("trace_deviation", &DensityMatrix::trace_deviation)
        .def("min_eigenvalue", &DensityMatrix::min_eigenvalue);

    py::class_<DissipatorTerm>(m, "DissipatorTerm")
        .def(py::init([](Operator a, Operator b, double rate) {
                 return DissipatorTerm{std::move(a), std::move(b), rate};
             }),
             py::arg("A"), py::arg("B"), py::arg("rate"))
        .def_readonly("rate", &DissipatorTerm::rate);

    m.def(
        "apply_cross_dissipator",
        [](const Operator& a, const Operator& b, double rate, const Matrix& rho) {
            return apply_cross_dissipator(a, b, rate, rho);
        },
        py::arg("A"), py::arg("B"), py::arg("rate"), py::arg("rho"));

    py::class_<Generator>(m, "Generator")
        .def(py::init<Operator, std::vector<DissipatorTerm>>(),
             py::arg("hamiltonian"), py::arg("dissipators"))
        .def_property_readonly("dim", &Generator::dim)
        .def_property_readonly("basis", &Generator::basis)
        .def_property_readonly("hamiltonian", &Generator::hamiltonian)
        .def("apply", &Generator::apply, py::arg("rho"))
        .def("norm_inf", &Generator::norm_inf)
        .def("fastest_term", &Generator::fastest_term);

    m.def(
        "build_full_generator",
        [](const ModelParams& p, const DerivedRates& r, int cutoff,
           bool rotating_frame) {
            return build_full_generator(p, r, cutoff, {rotating_frame});
        },
        py::arg("params"), py::arg("rates"), py::arg("cutoff"),
        py::arg("rotating_frame") = false);
    m.def(
        "build_reduced_generator",
        [](const DerivedRates& r, const ModelParams& p, double j, int m_cutoff) {
            std::vector<std::string> warnings;
            Generator g = build_reduced_generator(r, p, j, m_cutoff, &warnings);
            return py::make_tuple(std::move(g), std::move(warnings));
        },
        py::arg("rates"), py::arg("params"), py::arg("j"), py::arg("m_cutoff"),
        "(generator, warnings)");

    py::class_<EvolveResult>(m, "EvolveResult")
        .def_readonly("rho", &EvolveResult::rho)
        .def_readonly("trace_deviation", &EvolveResult::trace_deviation)
        .def_readonly("steps_accepted", &EvolveResult::steps_accepted)
        .def_readonly("steps_rejected", &EvolveResult::steps_rejected);
    m.def("evolve", &evolve, py::arg("generator"), py::arg("rho0"),
          py::arg("t_final"), py::arg("tol") = 1e-10);

    py::class_<MassConstraint>(m, "MassConstraint")
        .def(py::init([](std::vector<int> states, double mass) {
                 return MassConstraint{std::move(states), mass};
             }),
             py::arg("states"), py::arg("mass"));

    py::class_<SteadySolution>(m, "SteadySolution")
        .def_readonly("rho", &SteadySolution::rho)
        .def_readonly("residual_norm", &SteadySolution::residual_norm)
        .def_readonly("generator_norm", &SteadySolution::generator_norm)
        .def_readonly("state_norm", &SteadySolution::state_norm);
    m.def("steady_state",
          py::overload_cast<const Generator&>(&steady_state), py::arg("generator"));
    m.def("steady_state",
          py::overload_cast<const Generator&, const std::vector<MassConstraint>&>(
              &steady_state),
          py::arg("generator"), py::arg("constraints"));

    m.def(
        "steady_populations_birth_death",
        [](double eta, double j, int m_cutoff) {
            auto d = steady_populations_birth_death(eta, j, m_cutoff);
            return py::make_tuple(d.p, d.tail_mass);
        },
        py::arg("eta"), py::arg("j"), py::arg("m_cutoff"), "(p, tail_mass)");

    py::class_<MomentOps>(m, "MomentOps")
        .def_static("for_basis", &MomentOps::for_basis, py::arg("basis"));
    py::class_<StateMoments>(m, "StateMoments")
        .def_readonly("n_mean", &StateMoments::n_mean)
        .def_readonly("b2", &StateMoments::b2)
        .def_readonly("b4", &StateMoments::b4)
        .def_readonly("g2", &StateMoments::g2)
        .def_readonly("g4", &StateMoments::g4)
        .def_readonly("parity_even", &StateMoments::parity_even)
        .def_readonly("parity_odd", &StateMoments::parity_odd);
    m.def("moments", &moments, py::arg("rho"), py::arg("ops"));

    // ----- sweep / cross-validation -----
    py::enum_<SweepMode>(m, "SweepMode")
        .value("Analytic", SweepMode::Analytic)
        .value("ReducedNumeric", SweepMode::ReducedNumeric)
        .value("FullNumeric", SweepMode::FullNumeric);

    py::class_<SweepGrid>(m, "SweepGrid")
        .def(py::init<>())
        .def_readwrite("min_hz", &SweepGrid::min_hz)
        .def_readwrite("max_hz", &SweepGrid::max_hz)
        .def_readwrite("points", &SweepGrid::points);
    py::class_<ToleranceSpec>(m, "ToleranceSpec")
        .def(py::init<>())
        .def_readwrite("tail", &ToleranceSpec::tail)
        .def_readwrite("solver_residual", &ToleranceSpec::solver_residual)
        .def_readwrite("much_less_factor", &ToleranceSpec::much_less_factor)
        .def_readwrite("resonance_hz", &ToleranceSpec::resonance_hz);
    py::class_<OutputSpec>(m, "OutputSpec")
        .def(py::init<>())
        .def_readwrite("csv_path", &OutputSpec::csv_path)
        .def_readwrite("svg_path", &OutputSpec::svg_path)
        .def_readwrite("svg_y", &OutputSpec::svg_y);
    py::class_<SweepConfig>(m, "SweepConfig")
        .def(py::init<>())
        .def_readwrite("model", &SweepConfig::model)
        .def_readwrite("j_list", &SweepConfig::j_list)
        .def_readwrite("grid", &SweepConfig::grid)
        .def_readwrite("n_bar_list", &SweepConfig::n_bar_list)
        .def_readwrite("mode", &SweepConfig::mode)
        .def_readwrite("tol", &SweepConfig::tol)
        .def_readwrite("outputs", &SweepConfig::outputs)
        .def_readwrite("full_cutoff", &SweepConfig::full_cutoff);
    m.def("load_config", &load_config, py::arg("path"));

    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("delta_omega_hz", &SweepRow::delta_omega_hz)
        .def_readonly("n_bar", &SweepRow::n_bar)
        .def_readonly("j", &SweepRow::j)
        .def_readonly("eta", &SweepRow::eta)
        .def_readonly("n_mean", &SweepRow::n_mean)
        .def_readonly("n_sat", &SweepRow::n_sat)
        .def_readonly("g2", &SweepRow::g2)
        .def_readonly("g4", &SweepRow::g4)
        .def_readonly("sz0", &SweepRow::sz0)
        .def_readonly("good_cavity", &SweepRow::good_cavity)
        .def_readonly("below_saturation", &SweepRow::below_saturation)
        .def_readonly("cooling_regime", &SweepRow::cooling_regime)
        .def_readonly("mode", &SweepRow::mode);

    m.def(
        "run_sweep",
        [](const SweepConfig& cfg) {
            std::vector<std::string> diagnostics;
            auto rows = run_sweep(cfg, &diagnostics);
            return py::make_tuple(std::move(rows), std::move(diagnostics));
        },
        py::arg("config"), "(rows, diagnostics)");
    m.def("emit_csv", &emit_csv, py::arg("rows"), py::arg("path"));
    m.def("read_csv", &read_csv, py::arg("path"));
    m.def(
        "emit_svg",
        [](const std::vector<SweepRow>& rows, const std::string& y_column,
           const std::string& title, const std::string& path) {
            emit_svg(rows, {y_column, title}, path);
        },
        py::arg("rows"), py::arg("y_column"), py::arg("title"), py::arg("path"));

    py::class_<CrossValidationInput>(m, "CrossValidationInput")
        .def(py::init<>())
        .def_readwrite("kappa", &CrossValidationInput::kappa)
        .def_readwrite("n_bar", &CrossValidationInput::n_bar)
        .def_readwrite("gamma_up", &CrossValidationInput::gamma_up)
        .def_readwrite("gamma_down", &CrossValidationInput::gamma_down)
        .def_readwrite("chi_bar", &CrossValidationInput::chi_bar)
        .def_readwrite("j", &CrossValidationInput::j)
        .def_readwrite("tail_tol", &CrossValidationInput::tail_tol);
    py::class_<PathStats>(m, "PathStats")
        .def_readonly("label", &PathStats::label)
        .def_readonly("stats", &PathStats::stats);
    py::class_<CrossValidationReport>(m, "CrossValidationReport")
        .def_readonly("eta", &CrossValidationReport::eta)
        .def_readonly("j", &CrossValidationReport::j)
        .def_readonly("paths", &CrossValidationReport::paths)
        .def("deviation", &CrossValidationReport::deviation, py::arg("a"),
             py::arg("b"))
        .def("render", &CrossValidationReport::render);
    m.def("cross_validate", &cross_validate, py::arg("input"));
    m.def(
        "cross_validate_point",
        [](const SweepConfig& cfg, double delta_omega_hz, double n_bar, double j,
           bool include_full) {
            return cross_validate_point(cfg, delta_omega_hz, n_bar, j,
                                        include_full, nullptr);
        },
        py::arg("config"), py::arg("delta_omega_hz"), py::arg("n_bar"),
        py::arg("j"), py::arg("include_full") = false);

    m.attr("BARGMANN_EVEN") = kBargmannEven;
    m.attr("BARGMANN_ODD") = kBargmannOdd;

    py::list all;
    for (auto handle : m.attr("__dict__")) {
        const std::string name = py::cast<std::string>(handle);
        if (!name.empty() && name.front() != '_') all.append(handle);
    }
    m.attr("__all__") = all;
}
