#include "pairlind/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_set>

#include <Eigen/SVD>
#include <Eigen/SparseLU>

namespace pairlind {

namespace {

using Triplet = Eigen::Triplet<Complex>;

Eigen::Index vec_index(int row, int col, int dim) {
    // column stacking: vec(rho)[c*dim + r] = rho(r, c)
    return static_cast<Eigen::Index>(col) * dim + row;
}

struct SparseEntry {
    int row;
    int col;
    Complex value;
};

std::vector<SparseEntry> collect_nonzeros(const Matrix& m) {
    std::vector<SparseEntry> out;
    for (int c = 0; c < m.cols(); ++c) {
        for (int r = 0; r < m.rows(); ++r) {
            if (m(r, c) != Complex{}) out.push_back({r, c, m(r, c)});
        }
    }
    return out;
}

/// out += scale * (X kron Y), skipping exact zeros.
void add_kron(std::vector<Triplet>& out, const Matrix& x, const Matrix& y,
              Complex scale) {
    const int yd = static_cast<int>(y.rows());
    const auto xs = collect_nonzeros(x);
    const auto ys = collect_nonzeros(y);
    out.reserve(out.size() + xs.size() * ys.size());
    for (const auto& xe : xs) {
        const Complex sx = scale * xe.value;
        for (const auto& ye : ys) {
            out.emplace_back(xe.row * yd + ye.row, xe.col * yd + ye.col,
                             sx * ye.value);
        }
    }
}

void add_cross_dissipator_triplets(std::vector<Triplet>& out, const Matrix& a,
                                   const Matrix& b, double rate) {
    const int dim = static_cast<int>(a.rows());
    const Matrix ab = a * b;
    const Matrix id = Matrix::Identity(dim, dim);
    add_kron(out, a.transpose(), b, 2.0 * rate);
    add_kron(out, id, ab, -rate);
    add_kron(out, ab.transpose(), id, -rate);
}

Matrix unvec(const Vector& v, int dim) {
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

Vector to_vec(const Matrix& m) {
    return Eigen::Map<const Vector>(m.data(), m.size());
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(Matrix entries, BasisTag basis)
    : DensityMatrix(std::move(entries), basis, Tolerances{}) {}

DensityMatrix::DensityMatrix(Matrix entries, BasisTag basis, const Tolerances& tol)
    : entries_(std::move(entries)), basis_(basis) {
    if (entries_.rows() != entries_.cols() || entries_.rows() != basis_.dim()) {
        throw DimensionMismatch("density matrix does not match its basis");
    }
    const double herm = max_abs(entries_ - entries_.adjoint());
    if (herm > tol.hermiticity) {
        std::ostringstream os;
        os << "density matrix not Hermitian: max deviation " << herm;
        throw InvalidArgument(os.str());
    }
    const double tr_dev = std::abs(entries_.trace() - Complex{1.0, 0.0});
    if (tr_dev > tol.trace) {
        std::ostringstream os;
        os << "density matrix trace deviates from 1 by " << tr_dev;
        throw InvalidArgument(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(
        0.5 * (entries_ + entries_.adjoint()), Eigen::EigenvaluesOnly);
    const double min_ev = es.eigenvalues().minCoeff();
    if (min_ev < -tol.positivity) {
        std::ostringstream os;
        os << "density matrix not positive: min eigenvalue " << min_ev;
        throw InvalidArgument(os.str());
    }
}

DensityMatrix DensityMatrix::basis_state(const BasisTag& basis, int index) {
    const int dim = basis.dim();
    if (index < 0 || index >= dim) throw InvalidArgument("basis_state: index out of range");
    Matrix m = Matrix::Zero(dim, dim);
    m(index, index) = 1.0;
    return {std::move(m), basis};
}

DensityMatrix DensityMatrix::pure(const Vector& amplitudes, BasisTag basis) {
    const double norm2 = amplitudes.squaredNorm();
    if (norm2 <= 0) throw InvalidArgument("pure: zero state vector");
    Matrix m = amplitudes * amplitudes.adjoint() / norm2;
    return {std::move(m), basis};
}

DensityMatrix DensityMatrix::thermal_fock(double n_bar, int cutoff) {
    if (n_bar < 0) throw InvalidArgument("thermal_fock: n_bar must be >= 0");
    if (cutoff < 1) throw InvalidArgument("thermal_fock: cutoff must be >= 1");
    const double r = n_bar / (1.0 + n_bar);
    Eigen::VectorXd w(cutoff);
    double wn = 1.0;
    for (int n = 0; n < cutoff; ++n, wn *= r) w(n) = wn;
    w /= w.sum();
    Matrix m = Matrix::Zero(cutoff, cutoff);
    m.diagonal() = w.cast<Complex>();
    return {std::move(m), BasisTag::fock(cutoff)};
}

DensityMatrix DensityMatrix::thermal_sector(double n_bar, double j, int m_cutoff) {
    require_bargmann(j);
    if (n_bar < 0) throw InvalidArgument("thermal_sector: n_bar must be >= 0");
    if (m_cutoff < 1) throw InvalidArgument("thermal_sector: m_cutoff must be >= 1");
    // conditional thermal distribution within the parity sector; the common
    // factor r^parity cancels, so p_m is geometric with ratio r^2
    const double r = n_bar / (1.0 + n_bar);
    Eigen::VectorXd w(m_cutoff);
    double wm = 1.0;
    for (int m = 0; m < m_cutoff; ++m, wm *= r * r) w(m) = wm;
    w /= w.sum();
    Matrix m = Matrix::Zero(m_cutoff, m_cutoff);
    m.diagonal() = w.cast<Complex>();
    return {std::move(m), BasisTag::sector(j, m_cutoff)};
}

double DensityMatrix::trace_deviation() const {
    return std::abs(entries_.trace() - Complex{1.0, 0.0});
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(
        0.5 * (entries_ + entries_.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------
// superoperator assembly

SpMat cross_dissipator(const Operator& A, const Operator& B, double rate) {
    if (A.dim() != B.dim()) throw DimensionMismatch("cross_dissipator: dims differ");
    if (rate < 0) throw InvalidArgument("cross_dissipator: rate must be >= 0");
    const int dim = A.dim();
    std::vector<Triplet> trips;
    add_cross_dissipator_triplets(trips, A.entries(), B.entries(), rate);
    SpMat out(static_cast<Eigen::Index>(dim) * dim,
              static_cast<Eigen::Index>(dim) * dim);
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

Matrix apply_cross_dissipator(const Operator& A, const Operator& B, double rate,
                              const Matrix& rho) {
    if (A.dim() != B.dim() || A.dim() != rho.rows()) {
        throw DimensionMismatch("apply_cross_dissipator: dims differ");
    }
    if (rate < 0) throw InvalidArgument("apply_cross_dissipator: rate must be >= 0");
    const Matrix& a = A.entries();
    const Matrix& b = B.entries();
    const Matrix ab = a * b;
    return rate * (2.0 * b * rho * a - ab * rho - rho * ab);
}

Generator::Generator(Operator hamiltonian, std::vector<DissipatorTerm> dissipators)
    : hamiltonian_(std::move(hamiltonian)), dissipators_(std::move(dissipators)) {
    const int dim = hamiltonian_.dim();
    const Matrix& h = hamiltonian_.entries();
    if (max_abs(h - h.adjoint()) > 1e-9 * std::max(1.0, max_abs(h))) {
        throw InvalidArgument("generator Hamiltonian must be Hermitian");
    }
    std::vector<Triplet> trips;
    const Matrix id = Matrix::Identity(dim, dim);
    const Complex i{0.0, 1.0};
    add_kron(trips, id, h, -i);
    add_kron(trips, h.transpose(), id, i);
    for (const auto& d : dissipators_) {
        if (d.A.dim() != dim || d.B.dim() != dim) {
            throw DimensionMismatch("dissipator dimension differs from Hamiltonian");
        }
        if (d.rate < 0) throw InvalidArgument("dissipator rate must be >= 0");
        add_cross_dissipator_triplets(trips, d.A.entries(), d.B.entries(), d.rate);
    }
    matrix_.resize(static_cast<Eigen::Index>(dim) * dim,
                   static_cast<Eigen::Index>(dim) * dim);
    matrix_.setFromTriplets(trips.begin(), trips.end());
    matrix_.prune([](const Eigen::Index&, const Eigen::Index&, const Complex& v) {
        return v != Complex{};
    });

    Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(matrix_.rows());
    for (int k = 0; k < matrix_.outerSize(); ++k) {
        for (SpMat::InnerIterator it(matrix_, k); it; ++it) {
            row_sums(it.row()) += std::abs(it.value());
        }
    }
    norm_inf_ = row_sums.size() > 0 ? row_sums.maxCoeff() : 0.0;
}

Matrix Generator::apply(const Matrix& rho) const {
    if (rho.rows() != dim() || rho.cols() != dim()) {
        throw DimensionMismatch("Generator::apply: state dimension mismatch");
    }
    Vector out = matrix_ * to_vec(rho);
    return unvec(out, dim());
}

std::string Generator::fastest_term() const {
    double best = 2.0 * max_abs(hamiltonian_.entries());
    std::string name = "hamiltonian";
    for (std::size_t k = 0; k < dissipators_.size(); ++k) {
        const auto& d = dissipators_[k];
        const double scale =
            4.0 * d.rate * max_abs(d.A.entries()) * max_abs(d.B.entries());
        if (scale > best) {
            best = scale;
            name = "dissipator #" + std::to_string(k) +
                   " (rate = " + std::to_string(d.rate) + " rad/s)";
        }
    }
    std::ostringstream os;
    os << name << ", scale ~ " << best << " rad/s";
    return os.str();
}

// ---------------------------------------------------------------------------
// model generators

Generator build_full_generator(const ModelParams& p, const DerivedRates& r,
                               int cutoff, FullGeneratorOptions opts) {
    if (cutoff < 8) throw InvalidArgument("build_full_generator: cutoff must be >= 8");
    auto osc = su11_from_mode(cutoff);
    const Operator i2 = identity_op(BasisTag::qubit());
    const Operator id_f = identity_op(BasisTag::fock(cutoff));

    const Operator bz = tensor(i2, osc.bz);
    const Operator bp = tensor(i2, osc.bp);
    const Operator bm = tensor(i2, osc.bm);
    const Operator sz = tensor(pauli_z(), id_f);
    const Operator sp = tensor(sigma_plus(), id_f);
    const Operator sm = tensor(sigma_minus(), id_f);

    const double shift = 2.0 * (p.omega_c + p.chi_bar * p.n_bar);
    const double bz_coeff = opts.rotating_frame ? 0.0 : shift;
    const double sz_coeff = 0.5 * (opts.rotating_frame ? r.omega_r - shift : r.omega_r);

    Operator h = bz_coeff * bz - p.chi_bar * (bp * bm) + sz_coeff * sz -
                 r.g0 * (sz * bz) + r.g2 * (sm * bp + sp * bm);

    std::vector<DissipatorTerm> dissipators{
        {sz, sz, r.gamma_deph},
        {sp, sm, r.gamma_plus},
        {sm, sp, r.gamma_minus},
        {bp, bm, p.kappa * (1.0 + p.n_bar)},
        {bm, bp, p.kappa * p.n_bar},
    };
    return {std::move(h), std::move(dissipators)};
}

Generator build_reduced_generator(const DerivedRates& r, const ModelParams& p,
                                  double j, int m_cutoff,
                                  std::vector<std::string>* warnings) {
    require_bargmann(j);
    auto ops = su11_sector(j, m_cutoff);
    if (warnings) {
        const bool good_cavity =
            p.kappa * (1.0 + p.n_bar) < r.g2 / 10.0 && r.g2 < p.gamma0;
        if (!good_cavity) {
            warnings->push_back(
                "reduced generator outside the good-cavity regime: "
                "kappa(1+n_bar) << g2 < Gamma0 does not hold");
        }
    }
    Operator h = -p.chi_bar * (ops.bp * ops.bm);
    std::vector<DissipatorTerm> dissipators{
        {ops.bp, ops.bm, p.kappa * (1.0 + p.n_bar) + r.gamma_down},
        {ops.bm, ops.bp, p.kappa * p.n_bar + r.gamma_up},
    };
    return {std::move(h), std::move(dissipators)};
}

// ---------------------------------------------------------------------------
// time evolution: Dormand-Prince 5(4)

namespace {

constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

} // namespace

EvolveResult evolve(const Generator& G, const DensityMatrix& rho0,
                    double t_final, double tol) {
    if (t_final < 0) throw InvalidArgument("evolve: t_final must be >= 0");
    if (tol <= 0) throw InvalidArgument("evolve: tol must be > 0");
    if (rho0.dim() != G.dim()) throw DimensionMismatch("evolve: state/generator dims");

    const DensityMatrix::Tolerances out_tol{1e-10, 1e-8, 1e-6};
    if (t_final == 0.0) {
        return {DensityMatrix(rho0.entries(), rho0.basis(), out_tol), 0.0, 0, 0};
    }

    const SpMat& L = G.matrix();
    Vector y = to_vec(rho0.entries());

    auto f = [&](const Vector& v) -> Vector { return L * v; };

    Vector k1 = f(y);
    const double d0 = y.cwiseAbs().maxCoeff();
    const double d1 = k1.cwiseAbs().maxCoeff();
    double h = d1 > 0 ? 0.01 * std::max(d0, 1e-6) / d1 : t_final;
    h = std::min(h, t_final);

    double t = 0.0;
    std::size_t accepted = 0, rejected = 0;
    const std::size_t max_steps = 20'000'000;
    const double h_floor = t_final * 1e-14;

    while (t < t_final) {
        if (accepted + rejected >= max_steps) {
            std::ostringstream os;
            os << "evolve: step budget exhausted at t = " << t
               << " s; the generator is stiff, fastest rate from "
               << G.fastest_term();
            throw StiffnessError(os.str(), G.norm_inf());
        }
        h = std::min(h, t_final - t);
        if (h <= h_floor) {
            std::ostringstream os;
            os << "evolve: step size underflow (dt = " << h << " s at t = " << t
               << " s); fastest rate from " << G.fastest_term();
            throw StiffnessError(os.str(), G.norm_inf());
        }

        Vector k2 = f(y + h * (kA21 * k1));
        Vector k3 = f(y + h * (kA31 * k1 + kA32 * k2));
        Vector k4 = f(y + h * (kA41 * k1 + kA42 * k2 + kA43 * k3));
        Vector k5 = f(y + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
        Vector k6 =
            f(y + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
        Vector y5 = y + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
        Vector k7 = f(y5);

        const double err =
            (h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7))
                .cwiseAbs()
                .maxCoeff();

        if (err <= tol) {
            t += h;
            y.swap(y5);
            k1.swap(k7); // first-same-as-last
            ++accepted;
        } else {
            ++rejected;
        }
        const double grow = err > 0 ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
    }

    Matrix rho = unvec(y, G.dim());
    const double trace_dev = std::abs(rho.trace() - Complex{1.0, 0.0});
    rho = 0.5 * (rho + rho.adjoint().eval());
    return {DensityMatrix(std::move(rho), rho0.basis(), out_tol), trace_dev,
            accepted, rejected};
}

// ---------------------------------------------------------------------------
// steady state

namespace {

int estimate_nullity(const SpMat& L) {
    if (L.rows() > 1024) return -1; // too large to estimate densely
    Matrix dense = Matrix(L);
    Eigen::BDCSVD<Matrix> svd(dense);
    const auto& sv = svd.singularValues();
    const double thresh = std::max(sv.maxCoeff(), 1e-300) * 1e-10;
    int nullity = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) < thresh) ++nullity;
    }
    return nullity;
}

[[noreturn]] void throw_non_unique(const SpMat& L, const char* stage) {
    const int nullity = estimate_nullity(L);
    std::ostringstream os;
    os << "steady_state: " << stage << "; null-space dimension ";
    if (nullity >= 0) {
        os << "estimate " << nullity;
    } else {
        os << ">= 2 suspected (system too large for a dense estimate)";
    }
    throw NonUniqueSteadyState(os.str(), nullity);
}

} // namespace

SteadySolution steady_state(const Generator& G) {
    std::vector<int> all(G.dim());
    for (int i = 0; i < G.dim(); ++i) all[i] = i;
    return steady_state(G, {MassConstraint{std::move(all), 1.0}});
}

SteadySolution steady_state(const Generator& G,
                            const std::vector<MassConstraint>& constraints) {
    const int dim = G.dim();
    const Eigen::Index n = static_cast<Eigen::Index>(dim) * dim;
    const SpMat& L = G.matrix();
    if (constraints.empty()) throw InvalidArgument("steady_state: no constraints");

    // each constraint replaces the rho' equation of its first member state
    std::unordered_set<Eigen::Index> replaced;
    Vector b = Vector::Zero(n);
    std::vector<Triplet> extra;
    for (const auto& c : constraints) {
        if (c.states.empty()) throw InvalidArgument("steady_state: empty constraint");
        const Eigen::Index row = vec_index(c.states.front(), c.states.front(), dim);
        if (!replaced.insert(row).second) {
            throw InvalidArgument("steady_state: constraints share a pivot state");
        }
        for (int s : c.states) {
            if (s < 0 || s >= dim) {
                throw InvalidArgument("steady_state: constraint state out of range");
            }
            extra.emplace_back(row, vec_index(s, s, dim), Complex{1.0, 0.0});
        }
        b(row) = c.mass;
    }

    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(L.nonZeros()) + extra.size());
    for (int k = 0; k < L.outerSize(); ++k) {
        for (SpMat::InnerIterator it(L, k); it; ++it) {
            if (replaced.count(it.row())) continue;
            trips.emplace_back(it.row(), it.col(), it.value());
        }
    }
    trips.insert(trips.end(), extra.begin(), extra.end());

    SpMat M(n, n);
    M.setFromTriplets(trips.begin(), trips.end());
    M.makeCompressed();

    Eigen::SparseLU<SpMat> solver;
    solver.compute(M);
    if (solver.info() != Eigen::Success) {
        throw_non_unique(L, "constrained system is singular");
    }
    Vector x = solver.solve(b);
    if (solver.info() != Eigen::Success) {
        throw_non_unique(L, "solve failed");
    }

    // uniqueness check a posteriori: two inverse-iteration steps on the
    // factorized system estimate its smallest singular value; a stationary
    // family larger than the constrained directions leaves M singular to
    // machine precision
    {
        std::mt19937 rng(0x5eed);
        std::normal_distribution<double> dist;
        Vector z(n);
        for (Eigen::Index i = 0; i < n; ++i) z(i) = Complex{dist(rng), dist(rng)};
        z /= z.norm();
        Vector z1 = solver.solve(z);
        const double g1 = z1.norm();
        Vector z2 = solver.solve(z1 / g1);
        const double sigma_min_est = 1.0 / std::max(z2.norm(), 1e-300);
        if (sigma_min_est < 1e-13 * G.norm_inf()) {
            throw_non_unique(L, "constrained system is singular to machine precision");
        }
    }

    Matrix rho = unvec(x, dim);
    rho = 0.5 * (rho + rho.adjoint().eval());

    SteadySolution sol{DensityMatrix(rho, G.basis()),
                       (L * to_vec(rho)).norm(), G.norm_inf(),
                       to_vec(rho).norm()};
    // far outside the contract bound means the factorization quietly failed
    if (!(sol.residual_norm <= 1e-6 * sol.generator_norm * sol.state_norm)) {
        throw_non_unique(L, "residual exceeds tolerance");
    }
    return sol;
}

BirthDeathDistribution steady_populations_birth_death(double eta, double j,
                                                      int m_cutoff) {
    require_bargmann(j);
    if (!(eta > 1.0)) {
        throw NotNormalizable("steady_populations_birth_death: eta <= 1");
    }
    if (m_cutoff < 1) throw InvalidArgument("m_cutoff must be >= 1");
    const double tail = std::pow(eta, -double(m_cutoff));
    if (tail >= 1e-15) {
        std::ostringstream os;
        os << "steady_populations_birth_death: tail mass " << tail
           << " >= 1e-15, increase m_cutoff";
        throw InvalidArgument(os.str());
    }
    Eigen::VectorXd p(m_cutoff);
    const double head = 1.0 - 1.0 / eta;
    double w = 1.0;
    for (int m = 0; m < m_cutoff; ++m, w /= eta) p(m) = head * w;
    return {std::move(p), tail};
}

// ---------------------------------------------------------------------------
// observables

MomentOps MomentOps::for_basis(const BasisTag& basis) {
    switch (basis.kind) {
        case BasisKind::Fock: {
            auto [a, ad] = ladder_ops(basis.cutoff);
            auto s = su11_from_mode(basis.cutoff);
            return {ad * a, s.bp * s.bm, s.bp * s.bp * s.bm * s.bm,
                    parity_states(basis, 0), parity_states(basis, 1)};
        }
        case BasisKind::Su11Sector: {
            auto s = su11_sector(basis.j, basis.cutoff);
            Operator number = 2.0 * s.bz - 0.5 * identity_op(basis);
            return {number, s.bp * s.bm, s.bp * s.bp * s.bm * s.bm,
                    parity_states(basis, 0), parity_states(basis, 1)};
        }
        case BasisKind::QubitTensorFock: {
            MomentOps fock = for_basis(BasisTag::fock(basis.cutoff));
            const Operator i2 = identity_op(BasisTag::qubit());
            return {tensor(i2, fock.number), tensor(i2, fock.pair2),
                    tensor(i2, fock.pair4), parity_states(basis, 0),
                    parity_states(basis, 1)};
        }
        default:
            throw InvalidArgument("MomentOps: unsupported basis");
    }
}

SteadyStats StateMoments::as_stats() const {
    SteadyStats s;
    s.n_mean = n_mean;
    s.beta_z_mean = 0.5 * (n_mean + 0.5);
    s.b2 = b2;
    s.b4 = b4;
    s.g2 = g2;
    s.g4 = g4;
    return s;
}

StateMoments moments(const DensityMatrix& rho, const MomentOps& ops) {
    if (rho.dim() != ops.number.dim()) {
        throw DimensionMismatch("moments: state/operator dims differ");
    }
    const Matrix& r = rho.entries();
    StateMoments m;
    m.n_mean = (r * ops.number.entries()).trace().real();
    m.b2 = (r * ops.pair2.entries()).trace().real();
    m.b4 = (r * ops.pair4.entries()).trace().real();
    if (m.n_mean > 0.0) m.g2 = 4.0 * m.b2 / (m.n_mean * m.n_mean);
    if (m.b2 > 0.0) m.g4 = m.b4 / (m.b2 * m.b2);
    for (int s : ops.even_states) m.parity_even += r(s, s).real();
    for (int s : ops.odd_states) m.parity_odd += r(s, s).real();
    return m;
}

// ---------------------------------------------------------------------------
// truncation policy

namespace {

double top_levels_population(const DensityMatrix& rho, int levels) {
    const BasisTag& basis = rho.basis();
    const int cutoff = basis.cutoff;
    const int lo = std::max(0, cutoff - levels);
    double mass = 0.0;
    switch (basis.kind) {
        case BasisKind::Fock:
        case BasisKind::Su11Sector:
            for (int s = lo; s < cutoff; ++s) mass += rho.entries()(s, s).real();
            break;
        case BasisKind::QubitTensorFock:
            for (int q = 0; q < 2; ++q)
                for (int s = lo; s < cutoff; ++s)
                    mass += rho.entries()(q * cutoff + s, q * cutoff + s).real();
            break;
        default:
            throw InvalidArgument("tail check: unsupported basis");
    }
    return mass;
}

} // namespace

AutoSteadyResult steady_state_auto(
    const std::function<Generator(int)>& build, AutoSteadyOptions opts,
    const std::function<std::vector<MassConstraint>(const Generator&)>& constraints) {
    if (!build) throw InvalidArgument("steady_state_auto: no builder");
    double tail = std::numeric_limits<double>::quiet_NaN();
    int cutoff = opts.start_cutoff;
    for (; cutoff <= opts.max_cutoff; cutoff *= 2) {
        Generator g = build(cutoff);
        SteadySolution sol = constraints ? steady_state(g, constraints(g))
                                         : steady_state(g);
        tail = top_levels_population(sol.rho, 4);
        if (tail < opts.tail_tol) return {std::move(sol), cutoff, tail};
    }
    std::ostringstream os;
    os << "steady_state_auto: tail population " << tail << " still above "
       << opts.tail_tol << " at the cutoff cap " << opts.max_cutoff;
    throw NoConvergence(os.str(), opts.max_cutoff, tail);
}

} // namespace pairlind
