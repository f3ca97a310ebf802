#ifndef PAIRLIND_MODEL_HPP
#define PAIRLIND_MODEL_HPP

#include <optional>
#include <string>
#include <vector>

#include "pairlind/errors.hpp"

namespace pairlind {

/// Converts a cyclic frequency (Hz, the "/2pi" numbers quoted in configs)
/// to the angular value used everywhere internally.
double angular(double cyclic_hz);
double cyclic_hz(double angular);

/// Drive specification: the detuning plus either the generalized Rabi
/// frequency or the bare amplitude. Leaving both optional fields empty means
/// "resolve omega_r from the two-photon resonance condition".
struct Drive {
    double delta_omega = 0.0;        // angular
    std::optional<double> omega_r;   // angular
    std::optional<double> omega;     // angular
};

/// Raw physical inputs, stored as angular frequencies (rad/s).
struct ModelParams {
    double omega_c = 0.0;  // oscillator frequency
    double delta_q = 0.0;  // qubit splitting
    double g = 0.0;        // transverse coupling
    double gamma0 = 0.0;   // qubit decay
    double kappa = 0.0;    // two-photon damping
    double n_bar = 0.0;    // thermal photons at 2*omega_c
    double chi_bar = 0.0;  // bath-induced shift
    Drive drive;
};

/// Builds ModelParams from cyclic-Hz inputs (the unit configs speak).
ModelParams params_from_cyclic(double omega_c_hz, double delta_q_hz, double g_hz,
                               double gamma0_hz, double kappa_hz, double n_bar,
                               double chi_bar_hz, Drive drive_hz);

/// Validates p; throws InvalidArgument on hard violations, returns
/// human-readable warnings (e.g. omega_c/delta_q > 0.05).
std::vector<std::string> check_params(const ModelParams& p);

/// Everything Sections 2-3 derive from the raw inputs. Angular units.
struct DerivedRates {
    double theta = 0.0;        // mixing angle, in (0, pi/2)
    double g2 = 0.0;           // nonlinear coupling 2 g^2 sin(2theta)/Delta
    double g0 = 0.0;           // dispersive shift 4 g^2 cos(2theta)/Delta
    double gamma_plus = 0.0;   // Gamma0 cos^4(theta)/2, drives sigma- jumps
    double gamma_minus = 0.0;  // Gamma0 sin^4(theta)/2, drives sigma+ jumps
    double gamma_deph = 0.0;   // Gamma0 sin^2(2theta)/8
    double gamma_par = 0.0;    // Gamma_parallel
    double gamma_perp = 0.0;   // Gamma_perp = 4 gamma_deph + Gamma_parallel
    double sz0 = 0.0;          // bare qubit inversion, in [-1, 1]
    double gamma_up = 0.0;     // Gamma_+ = g2^2 (1+sz0)/(2 Gamma_perp)
    double gamma_down = 0.0;   // Gamma_- = g2^2 (1-sz0)/(2 Gamma_perp)
    double eta = 0.0;          // (kappa(1+n_bar)+Gamma_-)/(kappa n_bar+Gamma_+)
    double alpha = 0.0;        // ln(eta)
    double n_sat = 0.0;        // sqrt(Gamma_par Gamma_perp / (2 g2^2)), +inf at g2=0

    // resolved drive, carried along so generators need no second lookup
    double delta_omega = 0.0;
    double omega_r = 0.0;
    double omega = 0.0;
};

/// Derives every rate from p. The drive must specify omega_r or omega;
/// |delta_omega| > omega_r is invalid-argument, Gamma_par = 0 degenerate.
DerivedRates derive_rates(const ModelParams& p);

/// Broadband reservoir at carrier nu coupled through chi_tilde with
/// linewidth chi.
struct BathParams {
    double nu = 0.0;
    double chi_tilde = 0.0;
    double chi = 0.0;
};

/// Appendix elimination formulas:
///   kappa   = chi (2 chi_tilde)^2 / ((nu - 2 omega_c)^2 + chi^2)
///   chi_bar = (nu - 2 omega_c) (2 chi_tilde)^2 / ((nu - 2 omega_c)^2 + chi^2)
std::pair<double, double> bath_rates(const BathParams& b, double omega_c);

struct ResonanceResult {
    double omega_r = 0.0;
    int iterations = 0;
    double residual = 0.0;   // |last update| in rad/s
};

/// Default resonance tolerance: 0.1 Hz cyclic, as angular rad/s.
double angular_resonance_tol();

/// Solves Omega_R - 2 g0 <beta_z> = 2(omega_c + chi_bar n_bar)
/// self-consistently; <beta_z> = j + 1/(eta-1) is re-evaluated from the
/// rates at each iterate, seeded with <beta_z> = j.
ResonanceResult resonance_omega_r(const ModelParams& p, double j,
                                  double tol = angular_resonance_tol(),
                                  int max_iter = 100);

struct ValidityFlags {
    bool good_cavity = false;       // kappa(1+n_bar) << g2 and g2 < Gamma0
    bool below_saturation = false;  // n_mean < n_sat
    bool cooling_regime = false;    // eta > 1
};

/// The "<<" is operationalized as a factor (default 10).
ValidityFlags validity_flags(const DerivedRates& r, const ModelParams& p,
                             double n_mean, double much_less_factor = 10.0);

} // namespace pairlind

#endif
