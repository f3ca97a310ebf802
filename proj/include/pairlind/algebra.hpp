#ifndef PAIRLIND_ALGEBRA_HPP
#define PAIRLIND_ALGEBRA_HPP

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pairlind/errors.hpp"

namespace pairlind {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

constexpr double kBargmannEven = 0.25; // even photon parity sector
constexpr double kBargmannOdd = 0.75;  // odd photon parity sector

/// Throws InvalidArgument unless j is 1/4 or 3/4.
void require_bargmann(double j);

enum class BasisKind {
    Fock,            // |0> ... |cutoff-1>, ascending photon number
    Su11Sector,      // |j,0> ... |j,m_cutoff-1>
    Qubit,           // (excited, ground), sigma_z = diag(+1,-1)
    QubitTensorFock, // qubit (x) Fock, index = q*cutoff + n
    Composite,       // any other tensor combination
};

struct BasisTag {
    BasisKind kind = BasisKind::Composite;
    int cutoff = 0;  // Fock levels / sector m-levels / total dim for Composite
    double j = 0.0;  // Bargmann index, Su11Sector only

    static BasisTag fock(int cutoff);
    static BasisTag sector(double j, int m_cutoff);
    static BasisTag qubit();
    static BasisTag qubit_fock(int cutoff);
    static BasisTag composite(int dim);

    /// Hilbert-space dimension spanned by this tag.
    int dim() const;

    bool operator==(const BasisTag&) const = default;
};

/// Dense complex matrix over a truncated basis. Immutable after construction.
class Operator {
public:
    Operator(Matrix entries, BasisTag basis);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Matrix& entries() const { return entries_; }
    const BasisTag& basis() const { return basis_; }

    Operator adjoint() const;

    friend Operator operator+(const Operator& a, const Operator& b);
    friend Operator operator-(const Operator& a, const Operator& b);
    friend Operator operator*(const Operator& a, const Operator& b);
    friend Operator operator*(Complex scale, const Operator& a);
    friend Operator operator*(double scale, const Operator& a);

private:
    Matrix entries_;
    BasisTag basis_;
};

Operator identity_op(const BasisTag& basis);

/// Truncated annihilation/creation pair: a|n> = sqrt(n)|n-1>.
/// cutoff is the number of retained Fock levels, at least 2.
std::pair<Operator, Operator> ladder_ops(int cutoff);

struct Su11Triple {
    Operator bp; // beta+
    Operator bm; // beta-
    Operator bz; // beta_z
};

/// Pair operators on the Fock basis: beta+ = a_dag^2/2, beta- = a^2/2,
/// beta_z = (a_dag a + 1/2)/2. cutoff >= 4.
Su11Triple su11_from_mode(int cutoff);

/// Sector representation on {|j,0> ... |j,m_cutoff-1>}:
///   beta+|j,m> = sqrt((m+1)(m+2j)) |j,m+1>
///   beta-|j,m> = sqrt(m(m+2j-1))   |j,m-1>
///   beta_z|j,m> = (m+j)            |j,m>
Su11Triple su11_sector(double j, int m_cutoff);

/// Kronecker product; tags the result QubitTensorFock when A is the qubit
/// and B is a Fock-basis operator.
Operator tensor(const Operator& a, const Operator& b);

// Pauli set in the dressed basis, ordering (excited, ground).
Operator pauli_x();
Operator pauli_y();
Operator pauli_z();
Operator sigma_plus();
Operator sigma_minus();

struct SectorIndex {
    double j = kBargmannEven;
    int m = 0;
};

/// |n> <-> |j,m> with n = 2(m+j) - 1/2; even n pairs with j=1/4, odd with j=3/4.
SectorIndex fock_to_sector(int n);
int sector_to_fock(const SectorIndex& s);

/// Basis indices whose photon number has the requested parity (0 even, 1 odd).
/// Defined for Fock, QubitTensorFock and Su11Sector tags.
std::vector<int> parity_states(const BasisTag& basis, int parity);

} // namespace pairlind

#endif
