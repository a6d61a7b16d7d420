// core.hpp
// Dense complex linear algebra kernel: construction, composition, spectral
// analysis and validation of operators and bipartite states. Everything is
// value-semantic and pure; Eigen is the only math dependency.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

namespace nonlocality {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using Ket = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Global numeric tolerances. Structural checks (Hermiticity, trace, PSD
// slack) use 1e-9; spectral reconstruction residuals scale as 1e-8 * dim.
inline constexpr double kStructuralTol = 1e-9;
inline constexpr double kGramTol = 1e-8;
inline constexpr double kSpectralResidualScale = 1e-8;
inline constexpr double kBranchPruneTol = 1e-12;

// Dense-op size guards: kron refuses results beyond this many entries, and
// state constructors cap the local dimension at 30 (900x900 joint matrices).
inline constexpr Eigen::Index kMaxKronEntries = 100'000'000;
inline constexpr int kDefaultMaxDimension = 30;

// Max entrywise |M - M^dagger|; zero for exactly Hermitian input.
template <typename Derived>
double hermiticity_deviation(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("hermiticity_deviation: matrix must be square");
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol = kStructuralTol) {
    return m.rows() == m.cols() && hermiticity_deviation(m) <= tol;
}

// Conjugate transpose, evaluated.
template <typename Derived>
typename Derived::PlainObject dagger(const Eigen::MatrixBase<Derived>& m) {
    return m.adjoint();
}

// Tensor product with the particle-1 factor first: block (i,j) of the result
// equals a(i,j) * b. Refuses products beyond kMaxKronEntries entries.
template <typename DerivedA, typename DerivedB>
ComplexMatrix kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    const Eigen::Index rows = a.rows() * b.rows();
    const Eigen::Index cols = a.cols() * b.cols();
    if (cols > 0 && rows > kMaxKronEntries / cols) {
        throw std::length_error("kron: result of " + std::to_string(rows) + "x" +
                                std::to_string(cols) + " entries exceeds the configured cap");
    }
    return Eigen::kroneckerProduct(a.template cast<Complex>(), b.template cast<Complex>());
}

// sqrt of the sum of squared entry moduli of a - b.
template <typename DerivedA, typename DerivedB>
double frobenius_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("frobenius_distance: shape mismatch");
    }
    return (a - b).norm();
}

// tr(a*b) without forming the product; O(dim^2).
template <typename DerivedA, typename DerivedB>
Complex trace_product(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    if (a.cols() != b.rows() || a.rows() != b.cols()) {
        throw std::invalid_argument("trace_product: shape mismatch");
    }
    return a.transpose().cwiseProduct(b).sum();
}

struct EigenDecomposition {
    RealVector eigenvalues;      // ascending
    ComplexMatrix eigenvectors;  // orthonormal columns, matching order
};

// Hermitian eigendecomposition. The input must be Hermitian within tol;
// reconstruction satisfies |m - V diag(lambda) V^dagger|_F <= 1e-8 * dim.
inline EigenDecomposition eig_hermitian(const ComplexMatrix& m, double tol = kStructuralTol) {
    if (!is_hermitian(m, tol)) {
        throw std::domain_error("eig_hermitian: input is not Hermitian within tolerance");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eig_hermitian: iteration did not converge; input is ill-conditioned");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

inline double min_eigenvalue(const ComplexMatrix& m, double tol = kStructuralTol) {
    if (!is_hermitian(m, tol)) {
        throw std::domain_error("min_eigenvalue: input is not Hermitian within tolerance");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("min_eigenvalue: iteration did not converge");
    }
    return solver.eigenvalues().minCoeff();
}

// True iff the (Hermitian) matrix has min eigenvalue >= -tol.
inline bool is_psd(const ComplexMatrix& m, double tol) {
    return min_eigenvalue(m) >= -tol;
}

// Sum of dyads |k><k| over an orthonormal ket family. The family's Gram
// matrix must be within 1e-8 of the identity.
inline ComplexMatrix projector_matrix_from_kets(std::span<const Ket> kets) {
    if (kets.empty()) {
        throw std::invalid_argument("projector_from_kets: empty ket family");
    }
    const Eigen::Index dim = kets.front().size();
    ComplexMatrix basis(dim, static_cast<Eigen::Index>(kets.size()));
    for (std::size_t k = 0; k < kets.size(); ++k) {
        if (kets[k].size() != dim) {
            throw std::invalid_argument("projector_from_kets: kets of mixed dimension");
        }
        basis.col(static_cast<Eigen::Index>(k)) = kets[k];
    }
    ComplexMatrix gram = basis.adjoint() * basis;
    gram -= ComplexMatrix::Identity(gram.rows(), gram.cols());
    if (gram.cwiseAbs().maxCoeff() > kGramTol) {
        throw std::invalid_argument("projector_from_kets: ket family is not orthonormal");
    }
    return basis * basis.adjoint();
}

// Hermitian operator with validated construction.
class Observable {
  public:
    explicit Observable(ComplexMatrix m) : matrix_(std::move(m)) {
        if (matrix_.rows() != matrix_.cols()) {
            throw std::invalid_argument("Observable: matrix must be square");
        }
        if (hermiticity_deviation(matrix_) > kStructuralTol) {
            throw std::domain_error("Observable: matrix is not Hermitian within tolerance");
        }
    }

    const ComplexMatrix& matrix() const { return matrix_; }
    Eigen::Index dim() const { return matrix_.rows(); }

  private:
    ComplexMatrix matrix_;
};

inline Observable projector_from_kets(std::span<const Ket> kets) {
    return Observable(projector_matrix_from_kets(kets));
}

// Unit-trace Hermitian PSD matrix describing a (possibly mixed) state.
// All three invariants are enforced at construction.
class DensityMatrix {
  public:
    explicit DensityMatrix(ComplexMatrix m) : matrix_(std::move(m)) {
        if (matrix_.rows() != matrix_.cols()) {
            throw std::invalid_argument("DensityMatrix: matrix must be square");
        }
        if (hermiticity_deviation(matrix_) > kStructuralTol) {
            throw std::domain_error("DensityMatrix: matrix is not Hermitian within tolerance");
        }
        const Complex tr = matrix_.trace();
        if (std::abs(tr - Complex(1.0, 0.0)) > kStructuralTol) {
            throw std::domain_error("DensityMatrix: trace deviates from 1");
        }
        if (min_eigenvalue(matrix_) < -kStructuralTol) {
            throw std::domain_error("DensityMatrix: negative eigenvalue beyond tolerance");
        }
    }

    const ComplexMatrix& matrix() const { return matrix_; }
    Eigen::Index dim() const { return matrix_.rows(); }

  private:
    ComplexMatrix matrix_;
};

// Re(tr(rho * obs)). A residual imaginary part beyond 1e-9 signals corrupted
// Hermiticity somewhere upstream and is treated as an error.
inline double expectation(const DensityMatrix& rho, const Observable& obs) {
    if (rho.dim() != obs.dim()) {
        throw std::invalid_argument("expectation: dimension mismatch");
    }
    const Complex value = trace_product(rho.matrix(), obs.matrix());
    if (std::abs(value.imag()) > kStructuralTol) {
        throw std::domain_error("expectation: non-negligible imaginary part");
    }
    return value.real();
}

}  // namespace nonlocality
