#include "pairlind/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pairlind/algebra.hpp"

namespace pairlind {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double angular(double f_hz) { return kTwoPi * f_hz; }
double cyclic_hz(double w) { return w / kTwoPi; }
double angular_resonance_tol() { return angular(0.1); }

ModelParams params_from_cyclic(double omega_c_hz, double delta_q_hz, double g_hz,
                               double gamma0_hz, double kappa_hz, double n_bar,
                               double chi_bar_hz, Drive drive_hz) {
    ModelParams p;
    p.omega_c = angular(omega_c_hz);
    p.delta_q = angular(delta_q_hz);
    p.g = angular(g_hz);
    p.gamma0 = angular(gamma0_hz);
    p.kappa = angular(kappa_hz);
    p.n_bar = n_bar;
    p.chi_bar = angular(chi_bar_hz);
    p.drive.delta_omega = angular(drive_hz.delta_omega);
    if (drive_hz.omega_r) p.drive.omega_r = angular(*drive_hz.omega_r);
    if (drive_hz.omega) p.drive.omega = angular(*drive_hz.omega);
    return p;
}

std::vector<std::string> check_params(const ModelParams& p) {
    if (!(p.omega_c > 0)) throw InvalidArgument("omega_c must be > 0");
    if (!(p.delta_q > 0)) throw InvalidArgument("delta_q must be > 0");
    if (!(p.g > 0)) throw InvalidArgument("g must be > 0");
    if (!(p.gamma0 >= 0)) throw InvalidArgument("gamma0 must be >= 0");
    if (!(p.kappa >= 0)) throw InvalidArgument("kappa must be >= 0");
    if (!(p.n_bar >= 0)) throw InvalidArgument("n_bar must be >= 0");
    if (p.drive.omega_r && p.drive.omega) {
        throw InvalidArgument("drive: give omega_r or omega, not both");
    }
    if (p.drive.omega_r && std::abs(p.drive.delta_omega) > *p.drive.omega_r) {
        throw InvalidArgument("|delta_omega| exceeds omega_r");
    }
    std::vector<std::string> warnings;
    if (p.omega_c / p.delta_q > 0.05) {
        std::ostringstream os;
        os << "omega_c/delta_q = " << p.omega_c / p.delta_q
           << " violates omega_c << delta_q; the two-photon Hamiltonian may be inaccurate";
        warnings.push_back(os.str());
    }
    return warnings;
}

DerivedRates derive_rates(const ModelParams& p) {
    check_params(p);
    const double dw = p.drive.delta_omega;

    double omega_r = 0.0;
    double omega = 0.0;
    if (p.drive.omega_r) {
        omega_r = *p.drive.omega_r;
        if (std::abs(dw) > omega_r) throw InvalidArgument("|delta_omega| exceeds omega_r");
        omega = std::sqrt(std::max(0.0, omega_r * omega_r - dw * dw));
    } else if (p.drive.omega) {
        omega = *p.drive.omega;
        if (omega < 0) throw InvalidArgument("omega must be >= 0");
        omega_r = std::hypot(dw, omega);
    } else {
        throw InvalidArgument("drive must specify omega_r or omega");
    }
    if (omega_r <= 0) throw DegenerateInput("omega_r = 0: drive angle undefined");

    DerivedRates r;
    r.delta_omega = dw;
    r.omega_r = omega_r;
    r.omega = omega;

    // theta in (0, pi/2]; sin(2 theta) >= 0 so g2 >= 0 for all detunings
    r.theta = 0.5 * std::atan2(omega, dw);
    const double sin2t = omega / omega_r;
    const double cos2t = dw / omega_r;

    r.g2 = 2.0 * p.g * p.g * sin2t / p.delta_q;
    r.g0 = 4.0 * p.g * p.g * cos2t / p.delta_q;

    const double c = std::cos(r.theta);
    const double s = std::sin(r.theta);
    r.gamma_plus = p.gamma0 * c * c * c * c / 2.0;
    r.gamma_minus = p.gamma0 * s * s * s * s / 2.0;
    r.gamma_deph = p.gamma0 * sin2t * sin2t / 8.0;
    r.gamma_par = r.gamma_plus + r.gamma_minus;
    r.gamma_perp = 4.0 * r.gamma_deph + r.gamma_par;
    if (r.gamma_par <= 0.0) {
        throw DegenerateInput("Gamma_par = 0 (gamma0 = 0): qubit inversion undefined");
    }
    r.sz0 = (r.gamma_minus - r.gamma_plus) / r.gamma_par;
    r.gamma_up = r.g2 * r.g2 * (1.0 + r.sz0) / (2.0 * r.gamma_perp);
    r.gamma_down = r.g2 * r.g2 * (1.0 - r.sz0) / (2.0 * r.gamma_perp);

    const double pump = p.kappa * p.n_bar + r.gamma_up;
    const double decay = p.kappa * (1.0 + p.n_bar) + r.gamma_down;
    r.eta = pump > 0.0 ? decay / pump
                       : std::numeric_limits<double>::infinity();
    r.alpha = std::log(r.eta);
    r.n_sat = r.g2 > 0.0
                  ? std::sqrt(r.gamma_par * r.gamma_perp / (2.0 * r.g2 * r.g2))
                  : std::numeric_limits<double>::infinity();
    return r;
}

std::pair<double, double> bath_rates(const BathParams& b, double omega_c) {
    if (!(b.chi > 0)) throw InvalidArgument("bath linewidth chi must be > 0");
    if (!(b.chi_tilde >= 0)) throw InvalidArgument("chi_tilde must be >= 0");
    const double detuning = b.nu - 2.0 * omega_c;
    const double num = 4.0 * b.chi_tilde * b.chi_tilde;
    const double den = detuning * detuning + b.chi * b.chi;
    return {b.chi * num / den, detuning * num / den};
}

ResonanceResult resonance_omega_r(const ModelParams& p, double j, double tol,
                                  int max_iter) {
    require_bargmann(j);
    if (p.drive.omega_r) {
        throw InvalidArgument("resonance_omega_r: omega_r already specified");
    }
    const double target = 2.0 * (p.omega_c + p.chi_bar * p.n_bar);
    // g0 vanishes at delta_omega = 0, so the bare target is exact there
    double omega_r = target;
    ModelParams q = p;
    for (int it = 1; it <= max_iter; ++it) {
        double beta_z = j;
        if (std::abs(p.drive.delta_omega) > 0) {
            if (std::abs(p.drive.delta_omega) > omega_r) {
                throw InvalidArgument(
                    "resonance_omega_r: |delta_omega| exceeds the resonant omega_r");
            }
            q.drive.omega_r = omega_r;
            q.drive.omega.reset();
            DerivedRates r = derive_rates(q);
            if (it > 1) {
                // self-consistent <beta_z>; first pass keeps the seed j
                if (!(r.eta > 1.0)) {
                    throw OutsideCoolingRegime(
                        "resonance_omega_r: eta <= 1, steady <beta_z> undefined");
                }
                beta_z = j + 1.0 / (r.eta - 1.0);
            }
            const double next = target + 2.0 * r.g0 * beta_z;
            const double step = std::abs(next - omega_r);
            omega_r = next;
            if (step < tol && it > 1) return {omega_r, it, step};
        } else {
            return {omega_r, it, 0.0};
        }
    }
    // report the last iterate and residual through the exception
    q.drive.omega_r = omega_r;
    DerivedRates r = derive_rates(q);
    const double beta_z = r.eta > 1.0 ? j + 1.0 / (r.eta - 1.0) : j;
    const double residual = std::abs(target + 2.0 * r.g0 * beta_z - omega_r);
    std::ostringstream os;
    os << "resonance_omega_r: no fixed point after " << max_iter
       << " iterations; last omega_r = " << cyclic_hz(omega_r)
       << " Hz, residual = " << cyclic_hz(residual) << " Hz";
    throw NoConvergence(os.str(), omega_r, residual);
}

ValidityFlags validity_flags(const DerivedRates& r, const ModelParams& p,
                             double n_mean, double much_less_factor) {
    ValidityFlags f;
    f.good_cavity = p.kappa * (1.0 + p.n_bar) < r.g2 / much_less_factor &&
                    r.g2 < p.gamma0;
    f.below_saturation = n_mean < r.n_sat;
    f.cooling_regime = r.eta > 1.0;
    return f;
}

} // namespace pairlind
