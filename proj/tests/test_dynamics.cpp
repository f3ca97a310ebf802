#include <doctest.h>

#include <cmath>
#include <random>

#include "brute_force.hpp"
#include "pairlind/dynamics.hpp"

using namespace pairlind;

namespace {

double max_abs(const Matrix& m) {
    return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

Matrix random_hermitian(int dim, std::mt19937& rng) {
    std::normal_distribution<double> dist;
    Matrix m(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) m(r, c) = Complex{dist(rng), dist(rng)};
    Matrix h = 0.5 * (m + m.adjoint().eval());
    return h / h.norm();
}

// Fig. 1 point used throughout: delta_omega/2pi = 50 MHz, n_bar = 2
ModelParams fig1_point() {
    Drive d;
    d.delta_omega = 50e6;
    d.omega_r = 55e6;
    return params_from_cyclic(27.5e6, 3e9, 18e6, 0.5e6, 2e3, 2.0, 0.0, d);
}

// rate-level reduced-model inputs with a clean eta
DerivedRates synthetic_rates(double gamma_up, double gamma_down) {
    DerivedRates r{};
    r.gamma_up = gamma_up;
    r.gamma_down = gamma_down;
    return r;
}

ModelParams bare_bath(double kappa, double n_bar, double chi_bar = 0.0) {
    ModelParams p{};
    p.kappa = kappa;
    p.n_bar = n_bar;
    p.chi_bar = chi_bar;
    return p;
}

} // namespace

TEST_CASE("density matrix validation") {
    Matrix ok = Matrix::Zero(2, 2);
    ok(0, 0) = 0.25;
    ok(1, 1) = 0.75;
    CHECK_NOTHROW(DensityMatrix(ok, BasisTag::qubit()));

    Matrix skew = ok;
    skew(0, 1) = Complex{0.0, 1e-3};
    CHECK_THROWS_AS(DensityMatrix(skew, BasisTag::qubit()), InvalidArgument);

    Matrix off_trace = ok;
    off_trace(0, 0) = 0.3;
    CHECK_THROWS_AS(DensityMatrix(off_trace, BasisTag::qubit()), InvalidArgument);

    Matrix negative = Matrix::Zero(2, 2);
    negative(0, 0) = 1.1;
    negative(1, 1) = -0.1;
    CHECK_THROWS_AS(DensityMatrix(negative, BasisTag::qubit()), InvalidArgument);

    const DensityMatrix thermal = DensityMatrix::thermal_fock(2.0, 96);
    CHECK(thermal.trace_deviation() < 1e-14);
    const StateMoments m = moments(thermal, MomentOps::for_basis(thermal.basis()));
    CHECK(m.n_mean == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(*m.g2 == doctest::Approx(2.0).epsilon(1e-9)); // thermal bunching

    const DensityMatrix sector = DensityMatrix::thermal_sector(2.0, 0.75, 48);
    CHECK(sector.trace_deviation() < 1e-14);
    // conditional thermal within the sector is geometric with ratio (nbar/(1+nbar))^2
    const double ratio = sector.entries()(1, 1).real() / sector.entries()(0, 0).real();
    CHECK(ratio == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("cross-dissipator equals a standard jump dissipator when B = A^dag") {
    auto s = su11_from_mode(10);
    const double rate = 0.7;
    std::mt19937 rng(11);
    const Matrix rho = random_hermitian(10, rng);

    const Matrix got = apply_cross_dissipator(s.bp, s.bm, rate, rho);
    // 2 rate (L rho L^dag - {L^dag L, rho}/2) with L = beta-
    const Matrix l = s.bm.entries();
    const Matrix want =
        2 * rate *
        (l * rho * l.adjoint() -
         0.5 * (l.adjoint() * l * rho + rho * l.adjoint() * l));
    CHECK(max_abs(got - want) < 1e-13);
}

TEST_CASE("pure dephasing fixes populations and the maximally mixed state") {
    const Operator sz = pauli_z();
    Matrix diag = Matrix::Zero(2, 2);
    diag(0, 0) = 0.3;
    diag(1, 1) = 0.7;
    CHECK(max_abs(apply_cross_dissipator(sz, sz, 0.4, diag)) < 1e-15);

    std::mt19937 rng(5);
    auto [a, ad] = ladder_ops(6);
    const Matrix rho = random_hermitian(6, rng);
    const Matrix out = apply_cross_dissipator(ad, 2.0 * a, 0.9, rho);
    CHECK(std::abs(out.trace()) < 1e-13); // trace-preserving for any A, B
}

TEST_CASE("generator preserves trace and hermiticity on random inputs") {
    const ModelParams p = fig1_point();
    const DerivedRates r = derive_rates(p);
    const Generator full = build_full_generator(p, r, 12);
    const Generator reduced = build_reduced_generator(r, p, 0.25, 12, nullptr);

    std::mt19937 rng(2024);
    for (const Generator* g : {&full, &reduced}) {
        for (int trial = 0; trial < 25; ++trial) {
            const Matrix rho = random_hermitian(g->dim(), rng);
            const Matrix out = g->apply(rho);
            const double scale = g->norm_inf() * rho.norm();
            CHECK(std::abs(out.trace()) <= 1e-10 * scale);
            CHECK(max_abs(out - out.adjoint()) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("decoupled full model conserves the oscillator photon number") {
    ModelParams p = fig1_point();
    p.kappa = 0.0;
    DerivedRates r = derive_rates(p);
    r.g2 = 0.0; // decouple the exchange
    const Generator g = build_full_generator(p, r, 12);

    // qubit excited (x) oscillator thermal diagonal
    const DensityMatrix osc = DensityMatrix::thermal_fock(1.0, 12);
    Matrix joint = Matrix::Zero(24, 24);
    joint.block(0, 0, 12, 12) = osc.entries();
    const DensityMatrix rho0{joint, BasisTag::qubit_fock(12)};

    const MomentOps ops = MomentOps::for_basis(rho0.basis());
    const double n0 = moments(rho0, ops).n_mean;
    const EvolveResult res = evolve(g, rho0, 3.0 / p.gamma0, 1e-9);
    CHECK(moments(res.rho, ops).n_mean == doctest::Approx(n0).epsilon(1e-7));
}

TEST_CASE("two-photon decay cascades in steps of two") {
    // g2 = 0, qubit rates zero, kappa > 0, n_bar = 0, start in |n=2>
    ModelParams p = bare_bath(1.0, 0.0);
    p.omega_c = 1.0;
    DerivedRates r{};
    r.omega_r = 2.0;
    const Generator g = build_full_generator(p, r, 8);

    const int cutoff = 8;
    const DensityMatrix rho0 =
        DensityMatrix::basis_state(BasisTag::qubit_fock(cutoff), cutoff + 2);
    const EvolveResult res = evolve(g, rho0, 6.0, 1e-10);
    const Matrix& out = res.rho.entries();
    // population must reach |0>, never |1>
    const double p0 = out(cutoff + 0, cutoff + 0).real();
    const double p1 = out(cutoff + 1, cutoff + 1).real();
    CHECK(p0 > 0.99);
    CHECK(std::abs(p1) < 1e-12);
}

TEST_CASE("reduced generator keeps diagonal states diagonal") {
    const DerivedRates r = synthetic_rates(0.3, 1.1);
    const ModelParams p = bare_bath(0.2, 0.5, 0.7);
    const Generator g = build_reduced_generator(r, p, 0.25, 10, nullptr);

    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    Eigen::VectorXd w(10);
    for (int i = 0; i < 10; ++i) w(i) = u(rng);
    w /= w.sum();
    Matrix diag = Matrix::Zero(10, 10);
    diag.diagonal() = w.cast<Complex>();
    const DensityMatrix rho0{diag, BasisTag::sector(0.25, 10)};

    const EvolveResult res = evolve(g, rho0, 2.0, 1e-10);
    Matrix off = res.rho.entries();
    off.diagonal().setZero();
    CHECK(max_abs(off) < 1e-12);
}

TEST_CASE("reduced steady state is geometric with ratio 1/eta") {
    const DerivedRates r = synthetic_rates(0.4, 1.0);
    const ModelParams p = bare_bath(0.3, 1.0);
    const double eta = (p.kappa * 2.0 + 1.0) / (p.kappa * 1.0 + 0.4);
    const Generator g = build_reduced_generator(r, p, 0.75, 48, nullptr);
    const SteadySolution sol = steady_state(g);
    CHECK(sol.residual_norm <= 1e-10 * sol.generator_norm * sol.state_norm);
    for (int m = 0; m + 1 < 20; ++m) {
        const double ratio = sol.rho.entries()(m + 1, m + 1).real() /
                             sol.rho.entries()(m, m).real();
        CHECK(ratio == doctest::Approx(1.0 / eta).epsilon(1e-9));
    }
    // matches the birth-death populations elementwise
    const BirthDeathDistribution bd = steady_populations_birth_death(eta, 0.75, 48);
    for (int m = 0; m < 48; ++m) {
        CHECK(std::abs(sol.rho.entries()(m, m).real() - bd.p(m)) < 1e-10);
    }
}

TEST_CASE("steady state is independent of the chi_bar Lamb shift") {
    const DerivedRates r = synthetic_rates(0.2, 0.9);
    const Generator g0 =
        build_reduced_generator(r, bare_bath(0.1, 0.4, 0.0), 0.25, 32, nullptr);
    const Generator g1 =
        build_reduced_generator(r, bare_bath(0.1, 0.4, 5.0), 0.25, 32, nullptr);
    const double n0 = moments(steady_state(g0).rho,
                              MomentOps::for_basis(g0.basis())).n_mean;
    const double n1 = moments(steady_state(g1).rho,
                              MomentOps::for_basis(g1.basis())).n_mean;
    CHECK(std::abs(n0 - n1) < 1e-10);
}

TEST_CASE("evolve is the identity at t = 0") {
    const DensityMatrix rho0 = DensityMatrix::thermal_sector(1.0, 0.25, 8);
    const DerivedRates r = synthetic_rates(0.1, 0.5);
    const Generator g = build_reduced_generator(r, bare_bath(0.1, 1.0), 0.25, 8, nullptr);
    const EvolveResult res = evolve(g, rho0, 0.0, 1e-10);
    CHECK(max_abs(res.rho.entries() - rho0.entries()) == 0.0);
    CHECK(res.steps_accepted == 0);
}

TEST_CASE("qubit coherence decays at exp(-4 gamma_deph t) under pure dephasing") {
    const double gamma = 0.8;
    const Generator g{Operator{Matrix::Zero(2, 2), BasisTag::qubit()},
                      {{pauli_z(), pauli_z(), gamma}}};
    Matrix plus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    const DensityMatrix rho0{plus, BasisTag::qubit()};
    for (double t : {0.1, 0.5, 1.3}) {
        const EvolveResult res = evolve(g, rho0, t, 1e-12);
        CHECK(res.rho.entries()(0, 1).real() ==
              doctest::Approx(0.5 * std::exp(-4 * gamma * t)).epsilon(1e-8));
    }
}

TEST_CASE("transient relaxation approaches the analytic steady state from above") {
    const ModelParams p = fig1_point();
    const DerivedRates r = derive_rates(p);
    const Generator g = build_reduced_generator(r, p, 0.25, 24, nullptr);
    const double n_target = analytic_moments(r.eta, 0.25).n_mean;

    DensityMatrix state = DensityMatrix::thermal_sector(2.0, 0.25, 24);
    const MomentOps ops = MomentOps::for_basis(state.basis());
    double prev = moments(state, ops).n_mean;
    CHECK(prev > n_target);
    const double t_relax = 1.0 / (2 * (p.kappa * 3 + r.gamma_down));
    for (int step = 0; step < 8; ++step) {
        state = evolve(g, state, 5.0 * t_relax, 1e-9).rho;
        const double now = moments(state, ops).n_mean;
        CHECK(now < prev + 1e-9);
        prev = now;
    }
    CHECK(prev == doctest::Approx(n_target).epsilon(1e-5));
}

TEST_CASE("evolution keeps states positive within tolerance") {
    const ModelParams p = fig1_point();
    const DerivedRates r = derive_rates(p);
    const Generator g = build_reduced_generator(r, p, 0.25, 16, nullptr);
    DensityMatrix state = DensityMatrix::thermal_sector(2.0, 0.25, 16);
    const double t_relax = 1.0 / (2 * (p.kappa * 3 + r.gamma_down));
    state = evolve(g, state, t_relax, 1e-8).rho;
    CHECK(state.min_eigenvalue() >= -1e-6);
    CHECK(state.trace_deviation() < 1e-10);
}

TEST_CASE("stiff generator reports the fastest rate instead of grinding") {
    const DerivedRates r = synthetic_rates(1e11, 5e11);
    const Generator g = build_reduced_generator(r, bare_bath(0.0, 0.0), 0.25, 2, nullptr);
    const DensityMatrix rho0 = DensityMatrix::basis_state(BasisTag::sector(0.25, 2), 1);
    try {
        evolve(g, rho0, 1.0, 1e-10);
        FAIL("expected StiffnessError");
    } catch (const StiffnessError& e) {
        CHECK(e.fastest_rate > 1e10);
        CHECK(std::string(e.what()).find("fastest rate") != std::string::npos);
    }
}

TEST_CASE("qubit-only steady state reproduces the bare inversion") {
    const ModelParams p = fig1_point();
    const DerivedRates r = derive_rates(p);
    const Operator id2 = identity_op(BasisTag::qubit());
    const Generator g{0.5 * r.omega_r * pauli_z(),
                      {{pauli_z(), pauli_z(), r.gamma_deph},
                       {sigma_plus(), sigma_minus(), r.gamma_plus},
                       {sigma_minus(), sigma_plus(), r.gamma_minus}}};
    const SteadySolution sol = steady_state(g);
    const double sz =
        (sol.rho.entries()(0, 0) - sol.rho.entries()(1, 1)).real();
    CHECK(sz == doctest::Approx(r.sz0).epsilon(1e-12));
    (void)id2;
}

TEST_CASE("pure dephasing has no unique steady state") {
    const Generator g{Operator{Matrix::Zero(2, 2), BasisTag::qubit()},
                      {{pauli_z(), pauli_z(), 0.5}}};
    try {
        steady_state(g);
        FAIL("expected NonUniqueSteadyState");
    } catch (const NonUniqueSteadyState& e) {
        CHECK(e.nullity == 2);
    }
}

TEST_CASE("reduced steady state equals the brute-force dense null space") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(0.05, 1.5);
    for (int trial = 0; trial < 10; ++trial) {
        const double kappa = u(rng);
        const double n_bar = u(rng);
        const double gamma_up = 0.2 * u(rng);
        const double gamma_down = 2.0 * u(rng) + kappa;
        const double chi_bar = u(rng) - 0.75;
        const double eta =
            (kappa * (1 + n_bar) + gamma_down) / (kappa * n_bar + gamma_up);
        if (eta <= 1.2) continue;
        const double j = trial % 2 == 0 ? 0.25 : 0.75;
        const int m_cutoff = 3 + trial % 4;

        const Generator g = build_reduced_generator(
            synthetic_rates(gamma_up, gamma_down),
            bare_bath(kappa, n_bar, chi_bar), j, m_cutoff, nullptr);
        const SteadySolution sol = steady_state(g);

        auto ops = su11_sector(j, m_cutoff);
        const Matrix h = -chi_bar * (ops.bp.entries() * ops.bm.entries());
        const std::vector<brute::Term> terms{
            {ops.bp.entries(), ops.bm.entries(), kappa * (1 + n_bar) + gamma_down},
            {ops.bm.entries(), ops.bp.entries(), kappa * n_bar + gamma_up}};
        const Matrix expected = brute::steady_state_null_space(h, terms);
        CHECK(max_abs(sol.rho.entries() - expected) < 1e-9);
    }
}

TEST_CASE("full-model parity masses are conserved and sectors are independent") {
    const ModelParams p = fig1_point();
    const DerivedRates r = derive_rates(p);
    const Generator g = build_full_generator(p, r, 12);
    const MomentOps ops = MomentOps::for_basis(g.basis());

    // definite-parity initial states keep their sector mass
    for (int parity : {0, 1}) {
        const DensityMatrix rho0 =
            DensityMatrix::basis_state(g.basis(), 12 + parity); // qubit ground
        const EvolveResult res = evolve(g, rho0, 2e-7, 1e-9);
        const StateMoments m = moments(res.rho, ops);
        const double mass = parity == 0 ? m.parity_even : m.parity_odd;
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }

    // without sector constraints the stationary state is not unique
    CHECK_THROWS_AS(steady_state(g), NonUniqueSteadyState);

    // parity-constrained solves are valid states of each sector
    for (int parity : {0, 1}) {
        const std::vector<MassConstraint> cons{
            {parity_states(g.basis(), parity), 1.0},
            {parity_states(g.basis(), 1 - parity), 0.0}};
        const SteadySolution sol = steady_state(g, cons);
        const StateMoments m = moments(sol.rho, ops);
        CHECK((parity == 0 ? m.parity_even : m.parity_odd) ==
              doctest::Approx(1.0).epsilon(1e-9));
        CHECK(sol.residual_norm <= 1e-10 * sol.generator_norm * sol.state_norm);
    }
}

TEST_CASE("full model approaches the reduced statistics in the wide-linewidth regime") {
    // raising Gamma0 shrinks both 2 g0 / Gamma_perp and n/n0, which is where
    // the qubit elimination behind the reduced model is controlled
    Drive d;
    d.delta_omega = 50e6;
    ModelParams p = params_from_cyclic(27.5e6, 3e9, 18e6, 50e6, 2e3, 2.0, 0.0, d);
    p.drive.omega_r = resonance_omega_r(p, kBargmannEven).omega_r;
    const DerivedRates r = derive_rates(p);
    CHECK(2 * r.g0 / r.gamma_perp < 0.05);

    const Generator g = build_full_generator(p, r, 64);
    const std::vector<MassConstraint> cons{
        {parity_states(g.basis(), 0), 1.0}, {parity_states(g.basis(), 1), 0.0}};
    const StateMoments m = moments(steady_state(g, cons).rho,
                                   MomentOps::for_basis(g.basis()));
    const double n_reduced = analytic_moments(r.eta, kBargmannEven).n_mean;
    CHECK(std::abs(m.n_mean - n_reduced) / n_reduced < 0.01);
}

TEST_CASE("frame shift leaves steady populations and moments unchanged") {
    const ModelParams p = fig1_point();
    const DerivedRates r = derive_rates(p);
    const std::vector<MassConstraint> cons{
        {parity_states(BasisTag::qubit_fock(24), 0), 1.0},
        {parity_states(BasisTag::qubit_fock(24), 1), 0.0}};
    const Generator lab = build_full_generator(p, r, 24);
    const Generator rot = build_full_generator(p, r, 24, {true});
    const StateMoments a = moments(steady_state(lab, cons).rho,
                                   MomentOps::for_basis(lab.basis()));
    const StateMoments b = moments(steady_state(rot, cons).rho,
                                   MomentOps::for_basis(rot.basis()));
    CHECK(a.n_mean == doctest::Approx(b.n_mean).epsilon(1e-8));
    CHECK(a.b2 == doctest::Approx(b.b2).epsilon(1e-8));
}

TEST_CASE("birth-death distribution basics") {
    const BirthDeathDistribution d = steady_populations_birth_death(2.0, 0.25, 64);
    CHECK(d.p(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(d.p(1) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(d.p(2) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(d.tail_mass == doctest::Approx(std::pow(2.0, -64)).epsilon(1e-12));
    CHECK(std::abs(d.p.sum() + d.tail_mass - 1.0) < 1e-14);

    for (double eta : {1.7, 3.0, 40.0}) {
        const int m = eta < 2 ? 80 : 40;
        CHECK(std::abs(steady_populations_birth_death(eta, 0.75, m).p.sum() - 1.0) <
              1e-14);
    }

    const double inf = std::numeric_limits<double>::infinity();
    CHECK(steady_populations_birth_death(inf, 0.25, 8).p(0) == 1.0);

    CHECK_THROWS_AS(steady_populations_birth_death(1.0, 0.25, 64), NotNormalizable);
    CHECK_THROWS_AS(steady_populations_birth_death(0.4, 0.25, 64), NotNormalizable);
    CHECK_THROWS_AS(steady_populations_birth_death(1.1, 0.25, 10), InvalidArgument);
}

TEST_CASE("observable moments on known states") {
    const BasisTag fock8 = BasisTag::fock(8);
    const MomentOps ops = MomentOps::for_basis(fock8);

    const StateMoments vac = moments(DensityMatrix::basis_state(fock8, 0), ops);
    CHECK(vac.n_mean == 0.0);
    CHECK(vac.b2 == 0.0);
    CHECK_FALSE(vac.g2.has_value());
    CHECK_FALSE(vac.g4.has_value());
    CHECK(vac.parity_even == doctest::Approx(1.0));

    const StateMoments two = moments(DensityMatrix::basis_state(fock8, 2), ops);
    CHECK(two.n_mean == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(two.b2 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(*two.g2 == doctest::Approx(0.5).epsilon(1e-14));

    // sector steady state at eta = 3, j = 1/4: n = 1, g2 = 3
    const Generator g = build_reduced_generator(synthetic_rates(1.0, 3.0),
                                                bare_bath(0.0, 1.0), 0.25, 64,
                                                nullptr);
    const SteadySolution sol = steady_state(g);
    const StateMoments m = moments(sol.rho, MomentOps::for_basis(g.basis()));
    CHECK(m.n_mean == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(*m.g2 == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(m.parity_even == doctest::Approx(1.0));
    CHECK(m.parity_odd == 0.0);
}

TEST_CASE("auto truncation doubles the cutoff until the tail is resolved") {
    const DerivedRates r = synthetic_rates(1.0, 2.2); // eta = 2.2
    const ModelParams p = bare_bath(0.0, 1.0);
    AutoSteadyOptions opts;
    opts.tail_tol = 1e-10;
    opts.start_cutoff = 8;
    opts.max_cutoff = 256;
    const AutoSteadyResult res = steady_state_auto(
        [&](int m) { return build_reduced_generator(r, p, 0.25, m, nullptr); },
        opts);
    CHECK(res.tail_mass < 1e-10);
    CHECK(res.cutoff >= 16); // eta^-8 ~ 2e-3 is far too coarse

    AutoSteadyOptions capped;
    capped.tail_tol = 1e-10;
    capped.start_cutoff = 8;
    capped.max_cutoff = 16;
    const DerivedRates slow = synthetic_rates(1.0, 1.05);
    CHECK_THROWS_AS(
        steady_state_auto(
            [&](int m) { return build_reduced_generator(slow, p, 0.25, m, nullptr); },
            capped),
        NoConvergence);
}

TEST_CASE("good-cavity warning from the reduced builder") {
    ModelParams p = fig1_point();
    p.kappa = angular(50e3); // kappa(1+n_bar) comparable to g2
    const DerivedRates r = derive_rates(p);
    std::vector<std::string> warnings;
    build_reduced_generator(r, p, 0.25, 8, &warnings);
    CHECK(warnings.size() == 1);
}
