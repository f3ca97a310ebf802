#include <doctest.h>

#include <cmath>
#include <limits>

#include "pairlind/analytic.hpp"
#include "pairlind/errors.hpp"

using namespace pairlind;

namespace {

const double kGrid[] = {1.1, 1.5, 2.0, 5.0, 10.0, 100.0};
const double kSectors[] = {0.25, 0.75};

double rel(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

} // namespace

TEST_CASE("closed-form moments at eta = 2, j = 1/4") {
    const SteadyStats s = analytic_moments(2.0, 0.25);
    CHECK(s.beta_z_mean == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(s.n_mean == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(s.b2 == doctest::Approx(2.5).epsilon(1e-15));
    // 12(1+eta) + 4(eta-1)(5+eta)j = 36 + 7 at eta=2, j=1/4, plus 8 j^2 = 1/2
    CHECK(s.b4 == doctest::Approx(43.5).epsilon(1e-15));
    CHECK(*s.g2 == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(*s.g4 == doctest::Approx(43.5 / 6.25).epsilon(1e-15));
}

TEST_CASE("closed-form moments at eta = 3, j = 3/4") {
    const SteadyStats s = analytic_moments(3.0, 0.75);
    CHECK(s.beta_z_mean == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(s.n_mean == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("sector steady state at eta = 3, j = 1/4") {
    const SteadyStats s = analytic_moments(3.0, 0.25);
    CHECK(s.n_mean == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(*s.g2 == doctest::Approx(3.0).epsilon(1e-15));
    const auto [g2, g4] = analytic_g(3.0, 0.25);
    CHECK(g2 == doctest::Approx(3.0).epsilon(1e-14)); // 32*1.5/16
}

TEST_CASE("lasing instability below eta = 1") {
    CHECK_THROWS_AS(analytic_moments(1.0, 0.25), LasingInstability);
    CHECK_THROWS_AS(analytic_moments(0.5, 0.75), LasingInstability);
    CHECK_THROWS_AS(analytic_g(0.9, 0.25), LasingInstability);
    CHECK_THROWS_AS(oracle_moments(1.0, 0.25, 100), LasingInstability);
    CHECK_THROWS_AS(analytic_moments(2.0, 0.3), InvalidArgument);
}

TEST_CASE("ground-state limits as eta grows") {
    const SteadyStats even = analytic_moments(1e12, 0.25);
    CHECK(std::abs(even.n_mean) < 1e-11);
    const SteadyStats odd = analytic_moments(1e12, 0.75);
    CHECK(odd.n_mean == doctest::Approx(1.0).epsilon(1e-11));

    const double inf = std::numeric_limits<double>::infinity();
    CHECK(analytic_moments(inf, 0.25).n_mean == 0.0);
    CHECK(analytic_moments(inf, 0.75).n_mean == 1.0);
}

TEST_CASE("coherence limits toward the instability") {
    const auto [g2, g4] = analytic_g_parity(1.0 + 1e-9, 0.25);
    CHECK(g2 == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(g4 == doctest::Approx(6.0).epsilon(1e-8));
    // odd sector, single-photon limit: g2 ~ 6/eta -> 0
    const auto [g2_odd, g4_odd] = analytic_g(1e9, 0.75);
    CHECK(g2_odd < 1e-8);
    (void)g4_odd;
}

TEST_CASE("closed forms match the summation oracle on the grid") {
    for (double eta : kGrid) {
        const int m_cutoff = eta < 1.2 ? 400 : 96;
        for (double j : kSectors) {
            const SteadyStats a = analytic_moments(eta, j);
            const SteadyStats o = oracle_moments(eta, j, m_cutoff);
            CHECK(rel(a.beta_z_mean, o.beta_z_mean) < 1e-10);
            CHECK(rel(a.n_mean, o.n_mean) < 1e-10);
            CHECK(rel(a.b2, o.b2) < 1e-10);
            CHECK(rel(a.b4, o.b4) < 1e-10);
            const auto [g2, g4] = analytic_g(eta, j);
            CHECK(rel(g2, *o.g2) < 1e-10);
            CHECK(rel(g4, *o.g4) < 1e-10);
        }
    }
}

TEST_CASE("oracle example: eta = 2, j = 1/4, m_cutoff = 200") {
    const SteadyStats o = oracle_moments(2.0, 0.25, 200);
    CHECK(o.b2 == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("general coherence formulas reduce to the per-parity forms") {
    for (double eta : kGrid) {
        for (double j : kSectors) {
            const auto [g2, g4] = analytic_g(eta, j);
            const auto [g2p, g4p] = analytic_g_parity(eta, j);
            CHECK(rel(g2, g2p) < 1e-12);
            CHECK(rel(g4, g4p) < 1e-12);
        }
    }
}

TEST_CASE("parity discrimination monotonicity of g2 in eta") {
    double prev_even = 0.0;
    double prev_odd = std::numeric_limits<double>::infinity();
    for (double eta = 1.01; eta < 50.0; eta *= 1.17) {
        const auto [even, even4] = analytic_g(eta, 0.25);
        const auto [odd, odd4] = analytic_g(eta, 0.75);
        CHECK(even > prev_even);
        CHECK(odd < prev_odd);
        prev_even = even;
        prev_odd = odd;
        (void)even4;
        (void)odd4;
    }
}

TEST_CASE("sub-unity mean photon number starts at eta = 3 for j = 1/4") {
    CHECK(analytic_moments(3.0, 0.25).n_mean == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(analytic_moments(3.0 + 1e-12, 0.25).n_mean < 1.0);
    CHECK(analytic_moments(3.0 - 1e-12, 0.25).n_mean > 1.0);
    CHECK(analytic_moments(5.0, 0.25).n_mean == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("oracle cutoff precondition") {
    CHECK_THROWS_AS(oracle_moments(1.1, 0.25, 40), InvalidArgument);
    CHECK_NOTHROW(oracle_moments(1.1, 0.25, 400));
}

TEST_CASE("moments are positive and consistent") {
    for (double eta : kGrid) {
        for (double j : kSectors) {
            const SteadyStats s = analytic_moments(eta, j);
            CHECK(s.n_mean > 0.0);
            CHECK(s.n_mean ==
                  doctest::Approx(2 * s.beta_z_mean - 0.5).epsilon(1e-15));
            CHECK(*s.g2 >= 0.0);
            CHECK(*s.g4 >= 0.0);
        }
    }
}
