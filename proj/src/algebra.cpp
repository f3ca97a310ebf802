#include "pairlind/algebra.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace pairlind {

void require_bargmann(double j) {
    if (j != kBargmannEven && j != kBargmannOdd) {
        throw InvalidArgument("Bargmann index must be 1/4 or 3/4, got " +
                              std::to_string(j));
    }
}

BasisTag BasisTag::fock(int cutoff) {
    if (cutoff < 1) throw InvalidArgument("Fock cutoff must be >= 1");
    return {BasisKind::Fock, cutoff, 0.0};
}

BasisTag BasisTag::sector(double j, int m_cutoff) {
    require_bargmann(j);
    if (m_cutoff < 1) throw InvalidArgument("sector cutoff must be >= 1");
    return {BasisKind::Su11Sector, m_cutoff, j};
}

BasisTag BasisTag::qubit() { return {BasisKind::Qubit, 2, 0.0}; }

BasisTag BasisTag::qubit_fock(int cutoff) {
    if (cutoff < 1) throw InvalidArgument("Fock cutoff must be >= 1");
    return {BasisKind::QubitTensorFock, cutoff, 0.0};
}

BasisTag BasisTag::composite(int dim) {
    if (dim < 1) throw InvalidArgument("composite dim must be >= 1");
    return {BasisKind::Composite, dim, 0.0};
}

int BasisTag::dim() const {
    switch (kind) {
        case BasisKind::QubitTensorFock: return 2 * cutoff;
        default: return cutoff;
    }
}

Operator::Operator(Matrix entries, BasisTag basis)
    : entries_(std::move(entries)), basis_(basis) {
    if (entries_.rows() != entries_.cols()) {
        throw InvalidArgument("operator matrix must be square");
    }
    if (entries_.rows() != basis_.dim()) {
        throw DimensionMismatch("operator is " + std::to_string(entries_.rows()) +
                                "x" + std::to_string(entries_.cols()) +
                                " but basis dim is " + std::to_string(basis_.dim()));
    }
}

Operator Operator::adjoint() const { return {entries_.adjoint(), basis_}; }

namespace {

BasisTag merged_tag(const Operator& a, const Operator& b, const char* what) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatch(std::string(what) + ": dims " +
                                std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()));
    }
    // keep the richer tag when one side is generic
    if (a.basis() == b.basis()) return a.basis();
    if (a.basis().kind == BasisKind::Composite) return b.basis();
    return a.basis();
}

} // namespace

Operator operator+(const Operator& a, const Operator& b) {
    return {a.entries() + b.entries(), merged_tag(a, b, "operator+")};
}

Operator operator-(const Operator& a, const Operator& b) {
    return {a.entries() - b.entries(), merged_tag(a, b, "operator-")};
}

Operator operator*(const Operator& a, const Operator& b) {
    return {a.entries() * b.entries(), merged_tag(a, b, "operator*")};
}

Operator operator*(Complex scale, const Operator& a) {
    return {scale * a.entries(), a.basis()};
}

Operator operator*(double scale, const Operator& a) {
    return {scale * a.entries(), a.basis()};
}

Operator identity_op(const BasisTag& basis) {
    return {Matrix::Identity(basis.dim(), basis.dim()), basis};
}

std::pair<Operator, Operator> ladder_ops(int cutoff) {
    if (cutoff < 2) throw InvalidArgument("ladder_ops: cutoff must be >= 2");
    Matrix a = Matrix::Zero(cutoff, cutoff);
    for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(double(n));
    BasisTag tag = BasisTag::fock(cutoff);
    Operator annihilate{a, tag};
    return {annihilate, annihilate.adjoint()};
}

Su11Triple su11_from_mode(int cutoff) {
    if (cutoff < 4) throw InvalidArgument("su11_from_mode: cutoff must be >= 4");
    auto [a, ad] = ladder_ops(cutoff);
    Operator bp = 0.5 * (ad * ad);
    Operator bm = 0.5 * (a * a);
    Matrix bz = 0.5 * (ad.entries() * a.entries() +
                       0.5 * Matrix::Identity(cutoff, cutoff));
    return {bp, bm, Operator{bz, a.basis()}};
}

Su11Triple su11_sector(double j, int m_cutoff) {
    require_bargmann(j);
    if (m_cutoff < 2) throw InvalidArgument("su11_sector: m_cutoff must be >= 2");
    Matrix bp = Matrix::Zero(m_cutoff, m_cutoff);
    Matrix bm = Matrix::Zero(m_cutoff, m_cutoff);
    Matrix bz = Matrix::Zero(m_cutoff, m_cutoff);
    for (int m = 0; m < m_cutoff; ++m) {
        if (m + 1 < m_cutoff) bp(m + 1, m) = std::sqrt((m + 1) * (m + 2 * j));
        if (m > 0) bm(m - 1, m) = std::sqrt(m * (m + 2 * j - 1));
        bz(m, m) = m + j;
    }
    BasisTag tag = BasisTag::sector(j, m_cutoff);
    return {Operator{bp, tag}, Operator{bm, tag}, Operator{bz, tag}};
}

Operator tensor(const Operator& a, const Operator& b) {
    Matrix out = Eigen::kroneckerProduct(a.entries(), b.entries());
    BasisTag tag = BasisTag::composite(a.dim() * b.dim());
    if (a.dim() == 2 && b.basis().kind == BasisKind::Fock) {
        tag = BasisTag::qubit_fock(b.basis().cutoff);
    }
    return {std::move(out), tag};
}

namespace {

Operator make_qubit(std::initializer_list<Complex> entries) {
    Matrix m(2, 2);
    auto it = entries.begin();
    m(0, 0) = *it++; m(0, 1) = *it++;
    m(1, 0) = *it++; m(1, 1) = *it++;
    return {m, BasisTag::qubit()};
}

} // namespace

Operator pauli_x() { return make_qubit({0, 1, 1, 0}); }
Operator pauli_y() { return make_qubit({0, {0, -1}, {0, 1}, 0}); }
Operator pauli_z() { return make_qubit({1, 0, 0, -1}); }
Operator sigma_plus() { return make_qubit({0, 1, 0, 0}); }
Operator sigma_minus() { return make_qubit({0, 0, 1, 0}); }

SectorIndex fock_to_sector(int n) {
    if (n < 0) throw InvalidArgument("fock_to_sector: n must be >= 0");
    if (n % 2 == 0) return {kBargmannEven, n / 2};
    return {kBargmannOdd, (n - 1) / 2};
}

int sector_to_fock(const SectorIndex& s) {
    require_bargmann(s.j);
    if (s.m < 0) throw InvalidArgument("sector_to_fock: m must be >= 0");
    // n = 2(m + j) - 1/2
    return static_cast<int>(std::lround(2 * (s.m + s.j) - 0.5));
}

std::vector<int> parity_states(const BasisTag& basis, int parity) {
    if (parity != 0 && parity != 1) {
        throw InvalidArgument("parity must be 0 (even) or 1 (odd)");
    }
    std::vector<int> out;
    switch (basis.kind) {
        case BasisKind::Fock:
            for (int n = parity; n < basis.cutoff; n += 2) out.push_back(n);
            break;
        case BasisKind::QubitTensorFock:
            for (int q = 0; q < 2; ++q)
                for (int n = parity; n < basis.cutoff; n += 2)
                    out.push_back(q * basis.cutoff + n);
            break;
        case BasisKind::Su11Sector: {
            int sector_parity = basis.j == kBargmannEven ? 0 : 1;
            if (sector_parity == parity)
                for (int m = 0; m < basis.cutoff; ++m) out.push_back(m);
            break;
        }
        default:
            throw InvalidArgument("parity_states: basis has no photon parity");
    }
    return out;
}

} // namespace pairlind
