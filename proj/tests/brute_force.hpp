#ifndef PAIRLIND_TESTS_BRUTE_FORCE_HPP
#define PAIRLIND_TESTS_BRUTE_FORCE_HPP

// Independent dense oracle for steady-state checks: the Liouvillian matrix is
// assembled column by column by applying the master equation to each matrix
// unit with plain dense algebra, and the stationary state comes from an SVD
// null vector. No code is shared with the sparse production path.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <stdexcept>
#include <vector>

namespace brute {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Complex = std::complex<double>;

struct Term {
    Matrix A;
    Matrix B;
    double rate;
};

inline Matrix rhs(const Matrix& h, const std::vector<Term>& terms,
                  const Matrix& rho) {
    const Complex i{0.0, 1.0};
    Matrix out = -i * (h * rho - rho * h);
    for (const auto& t : terms) {
        // -rate ([A, B rho] + [rho A, B])
        out -= t.rate * (t.A * t.B * rho - t.B * rho * t.A);
        out -= t.rate * (rho * t.A * t.B - t.B * rho * t.A);
    }
    return out;
}

inline Matrix dense_liouvillian(const Matrix& h, const std::vector<Term>& terms) {
    const int dim = static_cast<int>(h.rows());
    Matrix l(dim * dim, dim * dim);
    for (int c = 0; c < dim; ++c) {
        for (int r = 0; r < dim; ++r) {
            Matrix unit = Matrix::Zero(dim, dim);
            unit(r, c) = 1.0;
            const Matrix image = rhs(h, terms, unit);
            // column stacking, matching vec(rho)[col*dim + row]
            l.col(c * dim + r) =
                Eigen::Map<const Vector>(image.data(), dim * dim);
        }
    }
    return l;
}

/// Trace-normalized null vector of the dense Liouvillian, as a density matrix.
inline Matrix steady_state_null_space(const Matrix& h,
                                      const std::vector<Term>& terms) {
    const int dim = static_cast<int>(h.rows());
    const Matrix l = dense_liouvillian(h, terms);
    Eigen::JacobiSVD<Matrix> svd(l, Eigen::ComputeFullV);
    const Vector null_vec = svd.matrixV().col(dim * dim - 1);
    Matrix rho = Eigen::Map<const Matrix>(null_vec.data(), dim, dim);
    const Complex tr = rho.trace();
    if (std::abs(tr) < 1e-12) {
        throw std::runtime_error("brute-force null vector has zero trace");
    }
    rho /= tr;
    return 0.5 * (rho + rho.adjoint().eval());
}

} // namespace brute

#endif
