// measurement.hpp
// Ideal projective measurement: Born-rule outcome probabilities, the
// projection state update, and the first-stage rank-2 filter projectors used
// by the sequential protocol.

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nonlocality/core.hpp"
#include "nonlocality/werner.hpp"

namespace nonlocality {

inline bool is_projector(const ComplexMatrix& m, double tol = kStructuralTol) {
    return is_hermitian(m, tol) && frobenius_distance(m * m, m) <= tol * static_cast<double>(m.rows());
}

// A set of labeled, mutually orthogonal projectors summing to the identity.
class ProjectiveMeasurement {
  public:
    struct Branch {
        std::string label;
        Observable projector;
    };

    explicit ProjectiveMeasurement(std::vector<Branch> branches) : branches_(std::move(branches)) {
        if (branches_.empty()) {
            throw std::invalid_argument("ProjectiveMeasurement: no projectors");
        }
        const Eigen::Index dim = branches_.front().projector.dim();
        ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
        for (const Branch& b : branches_) {
            const ComplexMatrix& p = b.projector.matrix();
            if (p.rows() != dim) {
                throw std::invalid_argument("ProjectiveMeasurement: mixed dimensions");
            }
            if (!is_projector(p)) {
                throw std::domain_error("ProjectiveMeasurement: '" + b.label +
                                        "' is not idempotent within tolerance");
            }
            sum += p;
        }
        for (std::size_t a = 0; a < branches_.size(); ++a) {
            for (std::size_t b = a + 1; b < branches_.size(); ++b) {
                const double cross = (branches_[a].projector.matrix() *
                                      branches_[b].projector.matrix()).cwiseAbs().maxCoeff();
                if (cross > kStructuralTol) {
                    throw std::domain_error("ProjectiveMeasurement: projectors '" +
                                            branches_[a].label + "' and '" + branches_[b].label +
                                            "' are not orthogonal");
                }
            }
        }
        if (frobenius_distance(sum, ComplexMatrix::Identity(dim, dim)) >
            kStructuralTol * static_cast<double>(dim)) {
            throw std::domain_error("ProjectiveMeasurement: projectors do not sum to the identity");
        }
    }

    Eigen::Index dim() const { return branches_.front().projector.dim(); }
    const std::vector<Branch>& branches() const { return branches_; }

  private:
    std::vector<Branch> branches_;
};

struct OutcomeBranch {
    std::string label;
    double probability = 0.0;
    // Absent when the probability falls below the pruning threshold; a
    // projection onto (numerically) nothing has no meaningful state.
    std::optional<DensityMatrix> post_state;
};

// Born rule plus projection update: branch k carries probability
// tr(Pi_k rho) and post-state Pi_k rho Pi_k / tr(Pi_k rho).
inline std::vector<OutcomeBranch> measure(const DensityMatrix& rho, const ProjectiveMeasurement& m) {
    if (rho.dim() != m.dim()) {
        throw std::invalid_argument("measure: dimension mismatch");
    }
    std::vector<OutcomeBranch> out;
    out.reserve(m.branches().size());
    double total = 0.0;
    for (const auto& branch : m.branches()) {
        const ComplexMatrix& pi = branch.projector.matrix();
        const double p = trace_product(pi, rho.matrix()).real();
        total += p;
        OutcomeBranch result{branch.label, p, std::nullopt};
        if (p >= kBranchPruneTol) {
            ComplexMatrix conditioned = pi * rho.matrix() * pi / p;
            // Symmetrize away the last bits of rounding before validation.
            conditioned = (conditioned + conditioned.adjoint().eval()) / 2.0;
            result.post_state = DensityMatrix(std::move(conditioned));
        }
        out.push_back(std::move(result));
    }
    if (std::abs(total - 1.0) > kStructuralTol) {
        throw std::domain_error("measure: branch probabilities sum to " + std::to_string(total));
    }
    bool any = false;
    for (const auto& b : out) any = any || b.post_state.has_value();
    if (!any) {
        throw std::domain_error("measure: every branch fell below the pruning threshold");
    }
    return out;
}

struct Conditioned {
    double probability = 0.0;
    DensityMatrix state;
};

// Project-and-renormalize onto a single projector. Conditioning on an event
// of probability below 1e-12 is an error (null event).
inline Conditioned condition(const DensityMatrix& rho, const Observable& projector) {
    if (rho.dim() != projector.dim()) {
        throw std::invalid_argument("condition: dimension mismatch");
    }
    const ComplexMatrix& pi = projector.matrix();
    if (!is_projector(pi)) {
        throw std::domain_error("condition: operator is not a projector within tolerance");
    }
    const double p = trace_product(pi, rho.matrix()).real();
    if (p < kBranchPruneTol) {
        throw std::domain_error("condition: probability " + std::to_string(p) + " is a null event");
    }
    ComplexMatrix conditioned = pi * rho.matrix() * pi / p;
    conditioned = (conditioned + conditioned.adjoint().eval()) / 2.0;
    return {p, DensityMatrix(std::move(conditioned))};
}

// The protocol's first-stage local projectors: P = |1><1| + |2><2| on each
// side. Rank 2 for d > 2; the full identity for d = 2.
struct FilterProjectors {
    Observable p;  // particle 1, local d x d
    Observable q;  // particle 2, local d x d
};

inline FilterProjectors filter_projectors(int d) {
    check_local_dimension(d);
    ComplexMatrix p = ComplexMatrix::Zero(d, d);
    p(0, 0) = Complex(1.0, 0.0);
    p(1, 1) = Complex(1.0, 0.0);
    return {Observable(p), Observable(p)};
}

// Embeddings onto the joint space, particle-1 factor first.
inline ComplexMatrix embed_first(const ComplexMatrix& a, int d) {
    return kron(a, ComplexMatrix::Identity(d, d));
}

inline ComplexMatrix embed_second(const ComplexMatrix& b, int d) {
    return kron(ComplexMatrix::Identity(d, d), b);
}

// Joint projector P (x) Q selecting the {1,1} subensemble.
inline Observable joint_filter(int d) {
    const FilterProjectors f = filter_projectors(d);
    return Observable(kron(f.p.matrix(), f.q.matrix()));
}

// The four-outcome first-stage measurement {(I-P)(I-Q), (I-P)Q, P(I-Q), PQ},
// labeled "00", "01", "10", "11" by the (P,Q) results in that fixed order.
inline ProjectiveMeasurement first_stage_measurement(int d) {
    const FilterProjectors f = filter_projectors(d);
    const ComplexMatrix& p = f.p.matrix();
    const ComplexMatrix& q = f.q.matrix();
    const ComplexMatrix ip = ComplexMatrix::Identity(d, d) - p;
    const ComplexMatrix iq = ComplexMatrix::Identity(d, d) - q;
    std::vector<ProjectiveMeasurement::Branch> branches;
    branches.push_back({"00", Observable(kron(ip, iq))});
    branches.push_back({"01", Observable(kron(ip, q))});
    branches.push_back({"10", Observable(kron(p, iq))});
    branches.push_back({"11", Observable(kron(p, q))});
    return ProjectiveMeasurement(std::move(branches));
}

}  // namespace nonlocality
