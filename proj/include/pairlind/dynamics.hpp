#ifndef PAIRLIND_DYNAMICS_HPP
#define PAIRLIND_DYNAMICS_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pairlind/algebra.hpp"
#include "pairlind/analytic.hpp"
#include "pairlind/model.hpp"

namespace pairlind {

using SpMat = Eigen::SparseMatrix<Complex>;

/// Hermitian, unit-trace, positive (within tolerance) state.
class DensityMatrix {
public:
    struct Tolerances {
        double hermiticity = 1e-12; // max |rho - rho^dag| entry
        double trace = 1e-10;       // |Tr rho - 1|
        double positivity = 1e-8;   // -min eigenvalue allowed
    };

    DensityMatrix(Matrix entries, BasisTag basis);
    DensityMatrix(Matrix entries, BasisTag basis, const Tolerances& tol);

    static DensityMatrix basis_state(const BasisTag& basis, int index);
    static DensityMatrix pure(const Vector& amplitudes, BasisTag basis);
    /// Thermal Fock-diagonal state at mean occupation n_bar.
    static DensityMatrix thermal_fock(double n_bar, int cutoff);
    /// Thermal state projected onto the parity sector of j and renormalized.
    static DensityMatrix thermal_sector(double n_bar, double j, int m_cutoff);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Matrix& entries() const { return entries_; }
    const BasisTag& basis() const { return basis_; }
    double trace_deviation() const;
    double min_eigenvalue() const;

private:
    Matrix entries_;
    BasisTag basis_;
};

/// One -rate*([A, B rho] + [rho A, B]) term. With B = A^dag this is the
/// standard dissipator with jump operator B at rate 2*rate.
struct DissipatorTerm {
    Operator A;
    Operator B;
    double rate = 0.0;
};

/// Column-stacked superoperator matrix of a single cross-dissipator term.
SpMat cross_dissipator(const Operator& A, const Operator& B, double rate);

/// Direct dense application of the same term to rho.
Matrix apply_cross_dissipator(const Operator& A, const Operator& B, double rate,
                              const Matrix& rho);

/// Liouvillian: rho' = -i[H, rho] + sum of cross-dissipator terms.
/// The sparse column-stacked matrix is assembled once at construction and
/// shared freely; the object is immutable.
class Generator {
public:
    Generator(Operator hamiltonian, std::vector<DissipatorTerm> dissipators);

    int dim() const { return hamiltonian_.dim(); }
    const BasisTag& basis() const { return hamiltonian_.basis(); }
    const Operator& hamiltonian() const { return hamiltonian_; }
    const std::vector<DissipatorTerm>& dissipators() const { return dissipators_; }
    const SpMat& matrix() const { return matrix_; }

    Matrix apply(const Matrix& rho) const;

    /// Max absolute row sum of the superoperator: the fastest rate scale.
    double norm_inf() const { return norm_inf_; }
    /// Names the dominant contribution ("hamiltonian" or "dissipator #k").
    std::string fastest_term() const;

private:
    Operator hamiltonian_;
    std::vector<DissipatorTerm> dissipators_;
    SpMat matrix_;
    double norm_inf_ = 0.0;
};

struct FullGeneratorOptions {
    /// Remove 2(omega_c + chi_bar n_bar)(beta_z + sigma_z/2) from the
    /// Hamiltonian (interaction frame at the two-photon resonance). Diagonal
    /// observables and steady populations are unchanged.
    bool rotating_frame = false;
};

/// Full qubit (x) oscillator generator of the master equation:
/// H = 2(omega_c+chi_bar n_bar) beta_z - chi_bar beta+ beta-
///     + (Omega_R - 2 g0 beta_z) sigma_z/2 + g2 (sigma- beta+ + beta- sigma+),
/// qubit dissipators (sigma_z, sigma_z, gamma_deph), (sigma+, sigma-, gamma_plus),
/// (sigma-, sigma+, gamma_minus), oscillator dissipators
/// (beta+, beta-, kappa(1+n_bar)), (beta-, beta+, kappa n_bar). cutoff >= 8.
Generator build_full_generator(const ModelParams& p, const DerivedRates& r,
                               int cutoff, FullGeneratorOptions opts = {});

/// Oscillator-only generator on the su(1,1) sector: Hamiltonian
/// -chi_bar beta+ beta-, dissipators (beta+, beta-, kappa(1+n_bar)+Gamma_-)
/// and (beta-, beta+, kappa n_bar+Gamma_+). Appends a warning when the
/// good-cavity inequality does not hold.
Generator build_reduced_generator(const DerivedRates& r, const ModelParams& p,
                                  double j, int m_cutoff,
                                  std::vector<std::string>* warnings = nullptr);

struct EvolveResult {
    DensityMatrix rho;
    double trace_deviation = 0.0; // reported, not corrected
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;
};

/// Adaptive Dormand-Prince 5(4) on the vectorized equation, per-step error
/// bounded by tol (infinity norm). Step underflow raises StiffnessError
/// naming the fastest rate in G.
EvolveResult evolve(const Generator& G, const DensityMatrix& rho0,
                    double t_final, double tol = 1e-10);

/// Pins the total population of a set of basis states. Used both for the
/// trace normalization and for parity-superselected sectors.
struct MassConstraint {
    std::vector<int> states;
    double mass = 1.0;
};

struct SteadySolution {
    DensityMatrix rho;
    double residual_norm = 0.0;   // ||G(rho)||_F
    double generator_norm = 0.0;  // ||G||_inf
    double state_norm = 0.0;      // ||rho||_F
};

/// Solves G(rho) = 0 as a sparse linear system with one equation per
/// constraint replaced by the constraint row (default: trace one). Rank
/// deficiency beyond the constrained directions raises NonUniqueSteadyState.
SteadySolution steady_state(const Generator& G);
SteadySolution steady_state(const Generator& G,
                            const std::vector<MassConstraint>& constraints);

struct BirthDeathDistribution {
    Eigen::VectorXd p;       // p_m = (1 - 1/eta) eta^-m
    double tail_mass = 0.0;  // mass beyond m_cutoff
};

/// Detailed-balance stationary distribution of the reduced chain,
/// p_{m+1}/p_m = 1/eta. eta <= 1 raises NotNormalizable.
BirthDeathDistribution steady_populations_birth_death(double eta, double j,
                                                      int m_cutoff);

/// Observable set matched to a basis: photon number, pair correlation
/// beta+ beta-, and beta+^2 beta-^2, plus the parity decomposition.
struct MomentOps {
    Operator number;
    Operator pair2;
    Operator pair4;
    std::vector<int> even_states;
    std::vector<int> odd_states;

    static MomentOps for_basis(const BasisTag& basis);
};

struct StateMoments {
    double n_mean = 0.0;
    double b2 = 0.0;
    double b4 = 0.0;
    std::optional<double> g2; // absent when n_mean = 0
    std::optional<double> g4; // absent when b2 = 0
    double parity_even = 0.0;
    double parity_odd = 0.0;

    SteadyStats as_stats() const;
};

StateMoments moments(const DensityMatrix& rho, const MomentOps& ops);

struct AutoSteadyOptions {
    double tail_tol = 1e-10; // steady population allowed in the top 4 levels
    int start_cutoff = 32;
    int max_cutoff = 512;
};

struct AutoSteadyResult {
    SteadySolution solution;
    int cutoff = 0;
    double tail_mass = 0.0;
};

/// Doubles the cutoff until the steady-state population of the top 4
/// oscillator levels drops below tail_tol. `constraints` (optional) builds
/// the mass constraints for each candidate generator.
AutoSteadyResult steady_state_auto(
    const std::function<Generator(int)>& build, AutoSteadyOptions opts = {},
    const std::function<std::vector<MassConstraint>(const Generator&)>& constraints = {});

} // namespace pairlind

#endif
