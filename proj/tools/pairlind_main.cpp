#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pairlind/sweep.hpp"

namespace {

using namespace pairlind;

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

struct CommonFlags {
    std::string config_path;
    std::optional<double> omega_r_hz;
    std::optional<double> n_bar;
    double j = kBargmannEven;
};

SweepConfig load_with_overrides(const CommonFlags& flags) {
    SweepConfig cfg = load_config(flags.config_path);
    if (flags.omega_r_hz) {
        cfg.model.drive.omega_r = angular(*flags.omega_r_hz);
        cfg.model.drive.omega.reset();
    }
    if (flags.n_bar) cfg.model.n_bar = *flags.n_bar;
    print_warnings(check_params(cfg.model));
    return cfg;
}

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_j = true) {
    cmd->add_option("--config", flags.config_path, "config file path")->required();
    cmd->add_option("--omega-r-hz", flags.omega_r_hz,
                    "override the generalized Rabi frequency (cyclic Hz)");
    cmd->add_option("--n-bar", flags.n_bar, "override the thermal occupation");
    if (with_j) {
        cmd->add_option("--j", flags.j, "Bargmann index (0.25 or 0.75)")
            ->check(CLI::IsMember({0.25, 0.75}));
    }
}

/// Resolves omega_r per the model policy (explicit value wins, resonance
/// solver otherwise) and derives the rates at one detuning point.
DerivedRates derive_point(const SweepConfig& cfg, double delta_omega_hz, double j) {
    ModelParams p = cfg.model;
    p.drive.delta_omega = angular(delta_omega_hz);
    if (!p.drive.omega_r && !p.drive.omega) {
        const auto res =
            resonance_omega_r(p, j, angular(cfg.tol.resonance_hz));
        p.drive.omega_r = res.omega_r;
        std::cerr << "resonance: omega_r = " << cyclic_hz(res.omega_r)
                  << " Hz after " << res.iterations << " iterations\n";
    }
    return derive_rates(p);
}

int cmd_derive(const CommonFlags& flags, double delta_omega_hz) {
    const SweepConfig cfg = load_with_overrides(flags);
    const DerivedRates r = derive_point(cfg, delta_omega_hz, flags.j);

    auto line = [](const char* name, double v, const char* unit) {
        std::printf("%-14s %.10g %s\n", name, v, unit);
    };
    line("theta", r.theta, "rad");
    line("g2", cyclic_hz(r.g2), "Hz");
    line("g0", cyclic_hz(r.g0), "Hz");
    line("gamma_plus", cyclic_hz(r.gamma_plus), "Hz");
    line("gamma_minus", cyclic_hz(r.gamma_minus), "Hz");
    line("gamma_deph", cyclic_hz(r.gamma_deph), "Hz");
    line("gamma_par", cyclic_hz(r.gamma_par), "Hz");
    line("gamma_perp", cyclic_hz(r.gamma_perp), "Hz");
    line("sz0", r.sz0, "");
    line("gamma_up", cyclic_hz(r.gamma_up), "Hz");
    line("gamma_down", cyclic_hz(r.gamma_down), "Hz");
    line("eta", r.eta, "");
    line("alpha", r.alpha, "");
    line("n_sat", r.n_sat, "");
    line("omega_r", cyclic_hz(r.omega_r), "Hz");
    line("omega", cyclic_hz(r.omega), "Hz");

    if (r.eta > 1.0) {
        const SteadyStats s = analytic_moments(r.eta, flags.j);
        ModelParams p = cfg.model;
        const ValidityFlags f =
            validity_flags(r, p, s.n_mean, cfg.tol.much_less_factor);
        line("n_mean", s.n_mean, "(analytic)");
        std::printf("%-14s good_cavity=%s below_saturation=%s cooling_regime=%s\n",
                    "flags", f.good_cavity ? "true" : "false",
                    f.below_saturation ? "true" : "false",
                    f.cooling_regime ? "true" : "false");
    } else {
        std::printf("%-14s eta <= 1: outside the cooling regime\n", "flags");
    }
    return 0;
}

int cmd_bath_rates(double nu_hz, double chi_hz, double chi_tilde_hz,
                   double omega_c_hz) {
    BathParams b;
    b.nu = angular(nu_hz);
    b.chi = angular(chi_hz);
    b.chi_tilde = angular(chi_tilde_hz);
    const auto [kappa, chi_bar] = bath_rates(b, angular(omega_c_hz));
    std::printf("kappa_hz   %.10g\n", cyclic_hz(kappa));
    std::printf("chi_bar_hz %.10g\n", cyclic_hz(chi_bar));
    return 0;
}

int cmd_sweep(SweepConfig cfg) {
    std::vector<std::string> diagnostics;
    const std::vector<SweepRow> rows = run_sweep(cfg, &diagnostics);
    for (const auto& d : diagnostics) std::cerr << "sweep: " << d << '\n';

    const std::string csv = cfg.outputs.csv_path.empty() ? "sweep.csv"
                                                         : cfg.outputs.csv_path;
    emit_csv(rows, csv);
    std::cout << rows.size() << " rows -> " << csv << '\n';
    if (!cfg.outputs.svg_path.empty()) {
        PlotSpec spec;
        spec.y_column = cfg.outputs.svg_y;
        spec.title = cfg.outputs.svg_y + " vs detuning (" + to_string(cfg.mode) + ")";
        emit_svg(rows, spec, cfg.outputs.svg_path);
        std::cout << "plot -> " << cfg.outputs.svg_path << '\n';
    }
    return 0;
}

int cmd_steady(const CommonFlags& flags, double delta_omega_hz, bool full) {
    const SweepConfig cfg = load_with_overrides(flags);
    std::vector<std::string> diagnostics;
    const CrossValidationReport report = cross_validate_point(
        cfg, delta_omega_hz, cfg.model.n_bar, flags.j, full, &diagnostics);
    for (const auto& d : diagnostics) std::cerr << d << '\n';
    std::cout << report.render();
    return 0;
}

int cmd_simulate(const CommonFlags& flags, double t_final_s, double delta_omega_hz,
                 int samples, int m_cutoff, double tol, std::string csv_path) {
    const SweepConfig cfg = load_with_overrides(flags);
    ModelParams p = cfg.model;
    p.drive.delta_omega = angular(delta_omega_hz);
    if (!p.drive.omega_r && !p.drive.omega) {
        p.drive.omega_r =
            resonance_omega_r(p, flags.j, angular(cfg.tol.resonance_hz)).omega_r;
    }
    const DerivedRates r = derive_rates(p);

    std::vector<std::string> warnings;
    const bool full = cfg.mode == SweepMode::FullNumeric;
    Generator gen = full ? build_full_generator(p, r, cfg.full_cutoff)
                         : build_reduced_generator(r, p, flags.j, m_cutoff, &warnings);
    print_warnings(warnings);

    DensityMatrix state = [&] {
        if (!full) return DensityMatrix::thermal_sector(p.n_bar, flags.j, m_cutoff);
        // qubit ground (x) thermal oscillator
        const DensityMatrix osc = DensityMatrix::thermal_fock(p.n_bar, cfg.full_cutoff);
        Matrix qubit = Matrix::Zero(2, 2);
        qubit(1, 1) = 1.0;
        Matrix joint = Matrix::Zero(2 * cfg.full_cutoff, 2 * cfg.full_cutoff);
        for (int q = 0; q < 2; ++q) {
            joint.block(q * cfg.full_cutoff, q * cfg.full_cutoff, cfg.full_cutoff,
                        cfg.full_cutoff) = qubit(q, q) * osc.entries();
        }
        return DensityMatrix(std::move(joint), BasisTag::qubit_fock(cfg.full_cutoff));
    }();

    const MomentOps ops = MomentOps::for_basis(state.basis());

    std::ofstream out(csv_path);
    if (!out) throw ConfigError("cannot write '" + csv_path + "'");
    out << "t_s,n_mean,b2,g2,parity_even,parity_odd,trace_deviation\n";
    char buf[160];
    double trace_dev = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double t = t_final_s * k / std::max(1, samples - 1);
        if (k > 0) {
            const double dt = t_final_s / std::max(1, samples - 1);
            EvolveResult step = evolve(gen, state, dt, tol);
            state = step.rho;
            trace_dev = std::max(trace_dev, step.trace_deviation);
        }
        const StateMoments m = moments(state, ops);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,", t, m.n_mean, m.b2);
        out << buf;
        if (m.g2) {
            std::snprintf(buf, sizeof buf, "%.17g", *m.g2);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g\n", m.parity_even,
                      m.parity_odd, trace_dev);
        out << buf;
    }
    std::cout << samples << " samples -> " << csv_path << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-photon qubit-oscillator cooling: rates, steady states and sweeps"};
    app.require_subcommand(1);

    // sweep
    CommonFlags sweep_flags;
    std::string sweep_mode, sweep_j, sweep_csv, sweep_svg, sweep_svg_y, sweep_nbars;
    std::optional<double> sweep_min, sweep_max;
    std::optional<int> sweep_points;
    auto* sweep_cmd = app.add_subcommand("sweep", "detuning sweep to CSV/SVG");
    sweep_cmd->add_option("--config", sweep_flags.config_path)->required();
    sweep_cmd->add_option("--mode", sweep_mode,
                          "analytic | reduced-numeric | full-numeric");
    sweep_cmd->add_option("--j", sweep_j, "0.25 | 0.75 | both");
    sweep_cmd->add_option("--csv", sweep_csv, "CSV output path");
    sweep_cmd->add_option("--svg", sweep_svg, "SVG output path");
    sweep_cmd->add_option("--svg-y", sweep_svg_y, "column plotted in the SVG");
    sweep_cmd->add_option("--n-bar-list", sweep_nbars, "comma-separated list");
    sweep_cmd->add_option("--delta-omega-min-hz", sweep_min);
    sweep_cmd->add_option("--delta-omega-max-hz", sweep_max);
    sweep_cmd->add_option("--points", sweep_points);
    sweep_cmd->add_option("--omega-r-hz", sweep_flags.omega_r_hz);

    // derive
    CommonFlags derive_flags;
    double derive_dw = 0.0;
    auto* derive_cmd = app.add_subcommand("derive", "print the derived rates at one point");
    add_common(derive_cmd, derive_flags);
    derive_cmd->add_option("--delta-omega-hz", derive_dw, "detuning (cyclic Hz)")
        ->required();

    // steady
    CommonFlags steady_flags;
    double steady_dw = 0.0;
    bool steady_full = false;
    auto* steady_cmd =
        app.add_subcommand("steady", "cross-validate one point's steady state");
    add_common(steady_cmd, steady_flags);
    steady_cmd->add_option("--delta-omega-hz", steady_dw)->required();
    steady_cmd->add_flag("--full", steady_full, "include the full-model solve");

    // bath-rates
    double nu_hz = 0.0, chi_hz = 0.0, chi_tilde_hz = 0.0, omega_c_hz = 0.0;
    auto* bath_cmd = app.add_subcommand("bath-rates", "Appendix elimination formulas");
    bath_cmd->add_option("--nu-hz", nu_hz)->required();
    bath_cmd->add_option("--chi-hz", chi_hz)->required();
    bath_cmd->add_option("--chi-tilde-hz", chi_tilde_hz)->required();
    bath_cmd->add_option("--omega-c-hz", omega_c_hz)->required();

    // simulate
    CommonFlags sim_flags;
    double sim_t_final = 0.0, sim_dw = 0.0, sim_tol = 1e-10;
    int sim_samples = 201, sim_m_cutoff = 64;
    std::string sim_csv = "simulate.csv";
    auto* sim_cmd = app.add_subcommand("simulate", "transient evolution time series");
    add_common(sim_cmd, sim_flags);
    sim_cmd->add_option("--t-final-s", sim_t_final, "final time (s)")->required();
    sim_cmd->add_option("--delta-omega-hz", sim_dw);
    sim_cmd->add_option("--samples", sim_samples);
    sim_cmd->add_option("--m-cutoff", sim_m_cutoff);
    sim_cmd->add_option("--tol", sim_tol, "integrator per-step tolerance");
    sim_cmd->add_option("--csv", sim_csv);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (sweep_cmd->parsed()) {
            SweepConfig cfg = load_with_overrides(sweep_flags);
            if (!sweep_mode.empty()) cfg.mode = sweep_mode_from_string(sweep_mode);
            if (!sweep_j.empty()) {
                if (sweep_j == "both") {
                    cfg.j_list = {kBargmannEven, kBargmannOdd};
                } else if (sweep_j == "0.25") {
                    cfg.j_list = {kBargmannEven};
                } else if (sweep_j == "0.75") {
                    cfg.j_list = {kBargmannOdd};
                } else {
                    throw ConfigError("--j must be 0.25, 0.75 or both");
                }
            }
            if (!sweep_csv.empty()) cfg.outputs.csv_path = sweep_csv;
            if (!sweep_svg.empty()) cfg.outputs.svg_path = sweep_svg;
            if (!sweep_svg_y.empty()) cfg.outputs.svg_y = sweep_svg_y;
            if (sweep_min) cfg.grid.min_hz = *sweep_min;
            if (sweep_max) cfg.grid.max_hz = *sweep_max;
            if (sweep_points) cfg.grid.points = *sweep_points;
            if (!sweep_nbars.empty()) {
                cfg.n_bar_list.clear();
                std::stringstream ss(sweep_nbars);
                std::string item;
                while (std::getline(ss, item, ','))
                    if (!item.empty()) cfg.n_bar_list.push_back(std::stod(item));
                if (cfg.n_bar_list.empty()) throw ConfigError("--n-bar-list is empty");
            }
            return cmd_sweep(std::move(cfg));
        }
        if (derive_cmd->parsed()) return cmd_derive(derive_flags, derive_dw);
        if (steady_cmd->parsed()) return cmd_steady(steady_flags, steady_dw, steady_full);
        if (bath_cmd->parsed())
            return cmd_bath_rates(nu_hz, chi_hz, chi_tilde_hz, omega_c_hz);
        if (sim_cmd->parsed())
            return cmd_simulate(sim_flags, sim_t_final, sim_dw, sim_samples,
                                sim_m_cutoff, sim_tol, sim_csv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kExitSolver;
    }
    return 0;
}
