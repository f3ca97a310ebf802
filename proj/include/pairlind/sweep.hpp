#ifndef PAIRLIND_SWEEP_HPP
#define PAIRLIND_SWEEP_HPP

#include <optional>
#include <string>
#include <vector>

#include "pairlind/analytic.hpp"
#include "pairlind/dynamics.hpp"
#include "pairlind/model.hpp"

namespace pairlind {

enum class SweepMode { Analytic, ReducedNumeric, FullNumeric };

std::string to_string(SweepMode mode);
SweepMode sweep_mode_from_string(const std::string& s);

struct SweepGrid {
    double min_hz = 0.0;
    double max_hz = 0.0;
    int points = 401;
};

struct ToleranceSpec {
    double tail = 1e-12;            // steady-state truncation tail
    double solver_residual = 1e-10; // relative residual bound for steady solves
    double much_less_factor = 10.0; // operationalizes "<<"
    double resonance_hz = 0.1;      // fixed-point tolerance, cyclic
};

struct OutputSpec {
    std::string csv_path;
    std::string svg_path;          // empty = no plot
    std::string svg_y = "n_mean";  // column plotted against delta_omega_hz
};

struct SweepConfig {
    ModelParams model;             // angular; drive.delta_omega ignored by sweeps
    std::vector<double> j_list = {kBargmannEven};
    SweepGrid grid;
    std::vector<double> n_bar_list;
    SweepMode mode = SweepMode::Analytic;
    ToleranceSpec tol;
    OutputSpec outputs;
    int full_cutoff = 48;          // Fock levels for full-numeric mode
};

/// Parses the sectioned key=value config format (see README for the key
/// list). Unknown keys, bad numbers and missing required fields raise
/// ConfigError with line diagnostics.
SweepConfig load_config(const std::string& path);

/// One detuning point's outputs. Empty optionals serialize as empty CSV
/// fields (never NaN).
struct SweepRow {
    double delta_omega_hz = 0.0;
    double n_bar = 0.0;
    double j = kBargmannEven;
    std::optional<double> eta;
    std::optional<double> n_mean;
    std::optional<double> n_sat;
    std::optional<double> g2;
    std::optional<double> g4;
    std::optional<double> sz0;
    bool good_cavity = false;
    bool below_saturation = false;
    bool cooling_regime = false;
    std::string mode;
};

/// Evaluates the grid in row order (n_bar outer, then j, then delta_omega).
/// Per-point failures leave the statistics empty and append a diagnostic;
/// the sweep never aborts.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg,
                                std::vector<std::string>* diagnostics = nullptr);

/// CSV with exactly the SweepRow columns, header included, '.' decimal,
/// empty string for undefined values.
void emit_csv(const std::vector<SweepRow>& rows, const std::string& path);
std::vector<SweepRow> read_csv(const std::string& path);

struct PlotSpec {
    std::string y_column = "n_mean";
    std::string title;
};

/// Self-contained SVG line plot of the chosen column vs delta_omega_hz,
/// one polyline per (n_bar, j) series.
void emit_svg(const std::vector<SweepRow>& rows, const PlotSpec& spec,
              const std::string& path);

/// Rate-level cross-validation input; Gamma_+/Gamma_- may come from
/// derive_rates or be chosen by hand.
struct CrossValidationInput {
    double kappa = 0.0;
    double n_bar = 0.0;
    double gamma_up = 0.0;    // Gamma_+
    double gamma_down = 0.0;  // Gamma_-
    double chi_bar = 0.0;
    double j = kBargmannEven;
    double tail_tol = 1e-12;
};

struct PathStats {
    std::string label;
    SteadyStats stats;
};

struct CrossValidationReport {
    double eta = 0.0;
    double j = kBargmannEven;
    std::vector<PathStats> paths;

    /// Largest relative deviation of `field` between two labelled paths.
    double deviation(const std::string& a, const std::string& b) const;
    std::string render() const;
};

/// Compares analytic_moments, oracle_moments and the reduced-numeric steady
/// state for one rate tuple.
CrossValidationReport cross_validate(const CrossValidationInput& in);

/// Same comparison for one config point (resolves Omega_R per model policy),
/// optionally adding the full-model parity-sector statistics.
CrossValidationReport cross_validate_point(const SweepConfig& cfg,
                                           double delta_omega_hz, double n_bar,
                                           double j, bool include_full,
                                           std::vector<std::string>* diagnostics = nullptr);

} // namespace pairlind

#endif
