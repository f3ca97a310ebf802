#include "pairlind/analytic.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "pairlind/algebra.hpp"
#include "pairlind/errors.hpp"

namespace pairlind {

namespace {

void require_cooling(double eta) {
    if (!(eta > 1.0)) {
        std::ostringstream os;
        os << "eta = " << eta
           << " <= 1: lasing instability, the reduced steady state is not valid";
        throw LasingInstability(os.str());
    }
}

void fill_ratios(SteadyStats& s) {
    if (s.n_mean > 0.0) s.g2 = 4.0 * s.b2 / (s.n_mean * s.n_mean);
    if (s.b2 > 0.0) s.g4 = s.b4 / (s.b2 * s.b2);
}

} // namespace

SteadyStats analytic_moments(double eta, double j) {
    require_bargmann(j);
    require_cooling(eta);
    if (std::isinf(eta)) {
        // sector ground state
        SteadyStats s;
        s.beta_z_mean = j;
        s.n_mean = 2.0 * j - 0.5;
        s.b2 = 0.0;
        s.b4 = 0.0;
        if (s.n_mean > 0.0) s.g2 = 0.0;
        return s;
    }
    const double u = eta - 1.0;
    SteadyStats s;
    s.beta_z_mean = j + 1.0 / u;
    s.n_mean = 2.0 * s.beta_z_mean - 0.5;
    s.b2 = 2.0 * (1.0 + j * u) / (u * u);
    s.b4 = (12.0 * (1.0 + eta) + 4.0 * u * (5.0 + eta) * j) / (u * u * u * u) +
           8.0 * j * j / (u * u);
    fill_ratios(s);
    return s;
}

std::pair<double, double> analytic_g(double eta, double j) {
    require_bargmann(j);
    require_cooling(eta);
    if (std::isinf(eta)) {
        // eta -> inf limits of Eq. (11)
        if (j == kBargmannEven) {
            return {std::numeric_limits<double>::infinity(), 6.0};
        }
        return {0.0, 10.0 / 3.0};
    }
    const double u = eta - 1.0;
    const double den2 = 5.0 + 4.0 * j * u - eta;
    const double g2 = 32.0 * (1.0 + u * j) / (den2 * den2);
    const double den4 = 1.0 + j * u;
    const double g4 = 2.0 + (1.0 + 3.0 * eta + j * (eta * eta - 1.0)) / (den4 * den4);
    return {g2, g4};
}

std::pair<double, double> analytic_g_parity(double eta, double j) {
    require_bargmann(j);
    require_cooling(eta);
    if (j == kBargmannEven) {
        const double g2 = (3.0 + eta) / 2.0;
        const double g4 =
            2.0 + 4.0 * (3.0 + 12.0 * eta + eta * eta) / ((3.0 + eta) * (3.0 + eta));
        return {g2, g4};
    }
    const double g2 = 2.0 * (1.0 + 3.0 * eta) / ((1.0 + eta) * (1.0 + eta));
    const double g4 = 2.0 + 4.0 * (1.0 + 12.0 * eta + 3.0 * eta * eta) /
                                ((1.0 + 3.0 * eta) * (1.0 + 3.0 * eta));
    return {g2, g4};
}

SteadyStats oracle_moments(double eta, double j, int m_cutoff) {
    require_bargmann(j);
    require_cooling(eta);
    if (m_cutoff < 2) throw InvalidArgument("oracle_moments: m_cutoff must be >= 2");
    if (std::pow(eta, -double(m_cutoff)) >= 1e-15) {
        std::ostringstream os;
        os << "oracle_moments: eta^-m_cutoff = " << std::pow(eta, -double(m_cutoff))
           << " >= 1e-15, increase m_cutoff";
        throw InvalidArgument(os.str());
    }

    // weights eta^-m summed most-significant-last for accuracy
    std::vector<double> w(m_cutoff);
    const double q = 1.0 / eta;
    double wm = 1.0;
    for (int m = 0; m < m_cutoff; ++m, wm *= q) w[m] = wm;

    double z = 0.0, bz = 0.0, b2 = 0.0, b4 = 0.0;
    for (int m = m_cutoff - 1; m >= 0; --m) {
        z += w[m];
        bz += w[m] * (m + j);
        b2 += w[m] * m * (m + 2.0 * j - 1.0);
        b4 += w[m] * m * (m - 1.0) * (m + 2.0 * j - 1.0) * (m + 2.0 * j - 2.0);
    }
    SteadyStats s;
    s.beta_z_mean = bz / z;
    s.n_mean = 2.0 * s.beta_z_mean - 0.5;
    s.b2 = b2 / z;
    s.b4 = b4 / z;
    fill_ratios(s);
    return s;
}

} // namespace pairlind
