#ifndef PAIRLIND_ANALYTIC_HPP
#define PAIRLIND_ANALYTIC_HPP

#include <optional>
#include <utility>

namespace pairlind {

/// Steady-state expectation values of the sector distribution.
/// g2/g4 are absent when the normalizing moment vanishes.
struct SteadyStats {
    double beta_z_mean = 0.0;
    double n_mean = 0.0;        // 2 <beta_z> - 1/2
    double b2 = 0.0;            // <beta+ beta->
    double b4 = 0.0;            // <beta+^2 beta-^2>
    std::optional<double> g2;   // 4 b2 / n_mean^2
    std::optional<double> g4;   // b4 / b2^2
};

/// Closed-form moments of rho_s = Z^-1 exp(-ln(eta) beta_z):
///   <beta_z>        = j + 1/(eta-1)
///   <beta+ beta->   = 2(1 + j(eta-1))/(eta-1)^2
///   <beta+^2 beta-^2> = (12(1+eta) + 4(eta-1)(5+eta)j)/(eta-1)^4 + 8j^2/(eta-1)^2
/// Throws LasingInstability for eta <= 1.
SteadyStats analytic_moments(double eta, double j);

/// General closed-form coherence functions:
///   g2 = 32(1 + (eta-1)j) / (5 + 4j(eta-1) - eta)^2
///   g4 = 2 + (1 + 3 eta + j(eta^2-1)) / (1 + j(eta-1))^2
std::pair<double, double> analytic_g(double eta, double j);

/// Per-parity reductions of the general forms:
///   j=1/4: g2 = (3+eta)/2,            g4 = 2 + 4(3+12 eta+eta^2)/(3+eta)^2
///   j=3/4: g2 = 2(1+3 eta)/(1+eta)^2, g4 = 2 + 4(1+12 eta+3 eta^2)/(1+3 eta)^2
std::pair<double, double> analytic_g_parity(double eta, double j);

/// Brute-force oracle: sums p_m proportional to eta^-m against the sector
/// matrix elements. m_cutoff must satisfy eta^-m_cutoff < 1e-15.
SteadyStats oracle_moments(double eta, double j, int m_cutoff);

} // namespace pairlind

#endif
