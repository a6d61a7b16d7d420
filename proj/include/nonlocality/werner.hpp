// werner.hpp
// Basis kets, two-particle singlets, the Werner matrix in local dimension d,
// and the flip (swap) operator. Joint-space indexing is particle-1 major:
// |i>_1 |j>_2 maps to index (i-1)*d + (j-1). Basis labels are 1-based at the
// interface, matching the usual ket notation |1>..|d>.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "nonlocality/core.hpp"

namespace nonlocality {

struct WernerState {
    int d;              // local Hilbert-space dimension
    DensityMatrix rho;  // joint d^2 x d^2 state
};

inline void check_local_dimension(int d, int max_d = kDefaultMaxDimension) {
    if (d < 2) {
        throw std::invalid_argument("local dimension must be >= 2, got " + std::to_string(d));
    }
    if (d > max_d) {
        throw std::length_error("local dimension " + std::to_string(d) +
                                " exceeds the configured cap " + std::to_string(max_d));
    }
}

// Standard basis ket |i> in dimension d, 1 <= i <= d.
inline Ket basis_ket(int d, int i) {
    if (d < 1 || i < 1 || i > d) {
        throw std::out_of_range("basis_ket: index " + std::to_string(i) +
                                " out of range for dimension " + std::to_string(d));
    }
    Ket v = Ket::Zero(d);
    v(i - 1) = Complex(1.0, 0.0);
    return v;
}

// Singlet |S_ij> = (|i>_1 |j>_2 - |j>_1 |i>_2) / sqrt(2), a unit ket of
// dimension d^2. Requires 1 <= i < j <= d.
inline Ket singlet(int d, int i, int j) {
    if (i >= j) {
        throw std::invalid_argument("singlet: requires i < j");
    }
    if (i < 1 || j > d) {
        throw std::out_of_range("singlet: indices out of range");
    }
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Ket v = Ket::Zero(static_cast<Eigen::Index>(d) * d);
    v((i - 1) * d + (j - 1)) = Complex(inv_sqrt2, 0.0);
    v((j - 1) * d + (i - 1)) = Complex(-inv_sqrt2, 0.0);
    return v;
}

// Projector onto the antisymmetric subspace: sum over i<j of |S_ij><S_ij|.
inline ComplexMatrix antisymmetric_projector(int d) {
    const Eigen::Index joint = static_cast<Eigen::Index>(d) * d;
    ComplexMatrix sum = ComplexMatrix::Zero(joint, joint);
    for (int i = 1; i <= d; ++i) {
        for (int j = i + 1; j <= d; ++j) {
            const Ket s = singlet(d, i, j);
            sum.noalias() += s * s.adjoint();
        }
    }
    return sum;
}

// Werner matrix W = (1/d^2) [ (1/d) I_{d^2} + 2 sum_{i<j} |S_ij><S_ij| ],
// without the DensityMatrix validation pass.
inline ComplexMatrix werner_matrix(int d, int max_d = kDefaultMaxDimension) {
    check_local_dimension(d, max_d);
    const Eigen::Index joint = static_cast<Eigen::Index>(d) * d;
    const double d2 = static_cast<double>(d) * d;
    ComplexMatrix w = antisymmetric_projector(d) * (2.0 / d2);
    w += ComplexMatrix::Identity(joint, joint) / (d2 * d);
    return w;
}

inline WernerState werner(int d, int max_d = kDefaultMaxDimension) {
    return {d, DensityMatrix(werner_matrix(d, max_d))};
}

// Flip operator V |i>_1 |j>_2 = |j>_1 |i>_2, the joint-space swap. Satisfies
// V = I - 2 sum_{i<j} |S_ij><S_ij| and V*V = I.
inline Observable flip_operator(int d, int max_d = kDefaultMaxDimension) {
    check_local_dimension(d, max_d);
    const Eigen::Index joint = static_cast<Eigen::Index>(d) * d;
    ComplexMatrix v = ComplexMatrix::Zero(joint, joint);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            v(static_cast<Eigen::Index>(j) * d + i, static_cast<Eigen::Index>(i) * d + j) =
                Complex(1.0, 0.0);
        }
    }
    return Observable(std::move(v));
}

}  // namespace nonlocality
