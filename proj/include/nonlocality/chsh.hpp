// chsh.hpp
// CHSH observables with spectrum {+1, -1, 0}, CHSH correlation values, the
// closed-form conditional state of the filtered {1,1} subensemble, and the
// dimension sweep contrasting the closed form with numerical conditioning.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nonlocality/core.hpp"
#include "nonlocality/measurement.hpp"
#include "nonlocality/werner.hpp"

namespace nonlocality {

// Spectral split of a three-valued observable into its +1, -1 and 0
// eigenprojectors. Eigenvalues must sit within tol of {+1, -1, 0}, with the
// +-1 levels simple.
struct ThreeValuedSpectrum {
    ComplexMatrix plus;   // rank-1 projector, eigenvalue +1
    ComplexMatrix minus;  // rank-1 projector, eigenvalue -1
    ComplexMatrix zero;   // projector onto the degenerate 0 eigenspace
};

inline ThreeValuedSpectrum three_valued_spectrum(const Observable& obs, double tol = 1e-8) {
    const EigenDecomposition eig = eig_hermitian(obs.matrix());
    const Eigen::Index dim = obs.dim();
    ThreeValuedSpectrum s{ComplexMatrix::Zero(dim, dim), ComplexMatrix::Zero(dim, dim),
                          ComplexMatrix::Zero(dim, dim)};
    int n_plus = 0;
    int n_minus = 0;
    for (Eigen::Index k = 0; k < dim; ++k) {
        const double lambda = eig.eigenvalues(k);
        const Ket v = eig.eigenvectors.col(k);
        if (std::abs(lambda - 1.0) <= tol) {
            s.plus.noalias() += v * v.adjoint();
            ++n_plus;
        } else if (std::abs(lambda + 1.0) <= tol) {
            s.minus.noalias() += v * v.adjoint();
            ++n_minus;
        } else if (std::abs(lambda) <= tol) {
            s.zero.noalias() += v * v.adjoint();
        } else {
            throw std::domain_error("three_valued_spectrum: eigenvalue outside {+1, -1, 0}");
        }
    }
    if (n_plus != 1 || n_minus != 1) {
        throw std::domain_error("three_valued_spectrum: eigenvalues +-1 must be simple");
    }
    return s;
}

// The four local observables A, A', B, B' of one CHSH round. Each acts on a
// single particle's d-dimensional space with spectrum {+1, -1, 0}; the +-1
// eigenvectors of both observables on a side span the same 2-dimensional
// filter subspace, so that measuring the filter first commits the particle
// to a +-1 answer.
class ChshSettings {
  public:
    ChshSettings(Observable a, Observable a_prime, Observable b, Observable b_prime)
        : a_(std::move(a)), a_prime_(std::move(a_prime)), b_(std::move(b)),
          b_prime_(std::move(b_prime)) {
        const Eigen::Index d = a_.dim();
        if (a_prime_.dim() != d || b_.dim() != d || b_prime_.dim() != d) {
            throw std::invalid_argument("ChshSettings: observables of mixed dimension");
        }
        const ComplexMatrix filter = filter_projectors(static_cast<int>(d)).p.matrix();
        for (const Observable* obs : {&a_, &a_prime_, &b_, &b_prime_}) {
            const ThreeValuedSpectrum s = three_valued_spectrum(*obs);
            if (frobenius_distance(s.plus + s.minus, filter) > kStructuralTol) {
                throw std::domain_error(
                    "ChshSettings: +-1 eigenvectors do not span the filter subspace");
            }
        }
    }

    const Observable& a() const { return a_; }
    const Observable& a_prime() const { return a_prime_; }
    const Observable& b() const { return b_; }
    const Observable& b_prime() const { return b_prime_; }
    int local_dim() const { return static_cast<int>(a_.dim()); }

    // Side observables indexed by setting bit: 0 -> A (resp. B), 1 -> A' (B').
    const Observable& alice(int setting) const { return setting == 0 ? a_ : a_prime_; }
    const Observable& bob(int setting) const { return setting == 0 ? b_ : b_prime_; }

  private:
    Observable a_, a_prime_, b_, b_prime_;
};

// Canonical maximal-violation configuration on the filter block, zero on the
// rest of the space: A = sz, A' = sx, B = -(sz+sx)/sqrt(2), B' = (-sz+sx)/sqrt(2).
// The sign convention makes <S_12| AB + AB' + A'B - A'B' |S_12> = +2 sqrt(2).
inline ChshSettings canonical_settings(int d) {
    check_local_dimension(d);
    Eigen::Matrix2cd sz;
    sz << 1.0, 0.0, 0.0, -1.0;
    Eigen::Matrix2cd sx;
    sx << 0.0, 1.0, 1.0, 0.0;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    auto embed = [d](const Eigen::Matrix2cd& block) {
        ComplexMatrix m = ComplexMatrix::Zero(d, d);
        m.topLeftCorner<2, 2>() = block;
        return Observable(m);
    };
    return ChshSettings(embed(sz), embed(sx), embed(-(sz + sx) * inv_sqrt2),
                        embed((-sz + sx) * inv_sqrt2));
}

// Joint-space CHSH combination A(x)B + A(x)B' + A'(x)B - A'(x)B'.
inline Observable chsh_operator(const ChshSettings& s) {
    ComplexMatrix op = kron(s.a().matrix(), s.b().matrix());
    op += kron(s.a().matrix(), s.b_prime().matrix());
    op += kron(s.a_prime().matrix(), s.b().matrix());
    op -= kron(s.a_prime().matrix(), s.b_prime().matrix());
    return Observable(std::move(op));
}

inline double chsh_value(const DensityMatrix& rho, const ChshSettings& s) {
    return expectation(rho, chsh_operator(s));
}

// Conditional state of the {1,1} subensemble in closed form:
//   (2d/(2d+4)) [ (1/(2d)) I_sub + |S_12><S_12| ],
// with I_sub the identity on span{|1>,|2>} (x) span{|1>,|2>} and zero on the
// rest of the joint space.
inline DensityMatrix conditional_state_closed_form(int d) {
    check_local_dimension(d);
    const double scale = 2.0 * d / (2.0 * d + 4.0);
    const Ket s12 = singlet(d, 1, 2);
    ComplexMatrix w = joint_filter(d).matrix() * (scale / (2.0 * d));
    w.noalias() += scale * (s12 * s12.adjoint());
    return DensityMatrix(std::move(w));
}

// CHSH value of the filtered subensemble: (2d/(2d+4)) * 2 sqrt(2), which
// exceeds 2 exactly when d >= 5.
inline double violation_value(int d) {
    if (d < 2) {
        throw std::invalid_argument("violation_value: requires d >= 2");
    }
    return (2.0 * d / (2.0 * d + 4.0)) * 2.0 * std::sqrt(2.0);
}

struct ViolationRow {
    int d;
    double closed_form;  // violation_value(d)
    double numeric;      // chsh_value on the numerically conditioned Werner state
    bool violates;       // closed_form > 2 (strict)
};

// Per-dimension comparison of the closed form against full numerical
// conditioning of the Werner state. The two columns agree within 1e-9.
inline std::vector<ViolationRow> violation_sweep(int d_min, int d_max,
                                                 int max_d = kDefaultMaxDimension) {
    if (d_min < 2 || d_min > d_max) {
        throw std::invalid_argument("violation_sweep: invalid dimension range");
    }
    check_local_dimension(d_max, max_d);
    std::vector<ViolationRow> rows;
    rows.reserve(static_cast<std::size_t>(d_max - d_min + 1));
    for (int d = d_min; d <= d_max; ++d) {
        const Conditioned cond = condition(werner(d, max_d).rho, joint_filter(d));
        const double closed = violation_value(d);
        const double numeric = chsh_value(cond.state, canonical_settings(d));
        rows.push_back({d, closed, numeric, closed > 2.0});
    }
    return rows;
}

}  // namespace nonlocality
