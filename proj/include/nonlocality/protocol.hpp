// protocol.hpp
// The two-stage sequential measurement protocol. Stage one measures the
// rank-2 filter projectors P and Q on the two sides, splitting the ensemble
// into four subensembles by the (P,Q) results. Each observer then picks a
// setting at random and measures a three-valued observable on the branch
// state. Exact Born-rule statistics and seeded Monte Carlo sampling of
// measurement records are both provided.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nonlocality/chsh.hpp"
#include "nonlocality/core.hpp"
#include "nonlocality/measurement.hpp"
#include "nonlocality/rng.hpp"

namespace nonlocality {

// One simulated run of the protocol. Settings are encoded 0/1 (0 -> A or B,
// 1 -> A' or B'); results are the measured eigenvalues. A first-stage result
// of 1 commits the side to a +-1 second-stage result, a result of 0 forces 0.
struct ProtocolRecord {
    int p_outcome;  // 0 or 1
    int q_outcome;  // 0 or 1
    int a_setting;  // 0 or 1
    int b_setting;  // 0 or 1
    int a_result;   // -1, 0 or +1
    int b_result;   // -1, 0 or +1
};

// Joint distribution over the second-stage results (a, b), both running over
// {-1, 0, +1} in that fixed order.
struct OutcomeTable {
    Eigen::Matrix3d joint = Eigen::Matrix3d::Zero();

    static int index_of(int result) { return result + 1; }
    double probability(int a_result, int b_result) const {
        return joint(index_of(a_result), index_of(b_result));
    }
    double alice_marginal(int a_result) const { return joint.row(index_of(a_result)).sum(); }
    double bob_marginal(int b_result) const { return joint.col(index_of(b_result)).sum(); }

    // E(ab) with zeros contributing zero.
    double correlator() const {
        double e = 0.0;
        for (int a = -1; a <= 1; ++a) {
            for (int b = -1; b <= 1; ++b) {
                e += a * b * probability(a, b);
            }
        }
        return e;
    }
};

struct BranchStatistics {
    int p_outcome;
    int q_outcome;
    double probability = 0.0;
    std::optional<DensityMatrix> state;  // absent for pruned branches
    // Indexed by (a_setting << 1) | b_setting; meaningful only when a state
    // is present.
    std::array<OutcomeTable, 4> tables{};

    const OutcomeTable& table(int a_setting, int b_setting) const {
        return tables[static_cast<std::size_t>((a_setting << 1) | b_setting)];
    }
};

struct ProtocolStatistics {
    int d;
    // Branch order is fixed: (P,Q) = 00, 01, 10, 11.
    std::array<BranchStatistics, 4> branches;

    const BranchStatistics& branch(int p_outcome, int q_outcome) const {
        return branches[static_cast<std::size_t>((p_outcome << 1) | q_outcome)];
    }

    // CHSH correlator assembled from a branch's four setting-pair tables.
    double branch_chsh(int p_outcome, int q_outcome) const {
        const BranchStatistics& b = branch(p_outcome, q_outcome);
        return b.table(0, 0).correlator() + b.table(0, 1).correlator() +
               b.table(1, 0).correlator() - b.table(1, 1).correlator();
    }

    // The protocol's headline number: CHSH on the {1,1} subensemble.
    double filtered_chsh() const { return branch_chsh(1, 1); }
};

// Exact Born-rule statistics of the full protocol: branch probabilities and,
// per branch and setting pair, the joint distribution of the two results.
inline ProtocolStatistics run_protocol_exact(int d, const ChshSettings& settings,
                                             int max_d = kDefaultMaxDimension) {
    check_local_dimension(d, max_d);
    if (settings.local_dim() != d) {
        throw std::invalid_argument("run_protocol_exact: settings dimension mismatch");
    }

    // Spectral projectors of the four local observables, embedded pairwise
    // on the joint space lazily below.
    std::array<ThreeValuedSpectrum, 2> alice;
    std::array<ThreeValuedSpectrum, 2> bob;
    for (int s = 0; s < 2; ++s) {
        alice[static_cast<std::size_t>(s)] = three_valued_spectrum(settings.alice(s));
        bob[static_cast<std::size_t>(s)] = three_valued_spectrum(settings.bob(s));
    }
    auto local_projector = [](const ThreeValuedSpectrum& s, int result) -> const ComplexMatrix& {
        return result == 1 ? s.plus : (result == -1 ? s.minus : s.zero);
    };

    const std::vector<OutcomeBranch> first = measure(werner(d, max_d).rho,
                                                     first_stage_measurement(d));
    ProtocolStatistics stats{d, {}};
    for (std::size_t k = 0; k < first.size(); ++k) {
        BranchStatistics& branch = stats.branches[k];
        branch.p_outcome = static_cast<int>(k >> 1);
        branch.q_outcome = static_cast<int>(k & 1);
        branch.probability = first[k].probability;
        if (!first[k].post_state.has_value()) {
            continue;
        }
        branch.state = first[k].post_state;
        const ComplexMatrix& rho = branch.state->matrix();
        for (int sa = 0; sa < 2; ++sa) {
            for (int sb = 0; sb < 2; ++sb) {
                OutcomeTable& table = branch.tables[static_cast<std::size_t>((sa << 1) | sb)];
                for (int a = -1; a <= 1; ++a) {
                    for (int b = -1; b <= 1; ++b) {
                        const ComplexMatrix joint =
                            kron(local_projector(alice[static_cast<std::size_t>(sa)], a),
                                 local_projector(bob[static_cast<std::size_t>(sb)], b));
                        table.joint(OutcomeTable::index_of(a), OutcomeTable::index_of(b)) =
                            trace_product(joint, rho).real();
                    }
                }
            }
        }
    }
    return stats;
}

// Inverse-CDF draw over the branch order 00, 01, 10, 11. Pruned branches
// carry no samplable state and are skipped; their total mass is below 4e-12.
inline std::size_t draw_branch(const ProtocolStatistics& stats, double u) {
    double cumulative = 0.0;
    std::size_t last_live = 0;
    for (std::size_t k = 0; k < stats.branches.size(); ++k) {
        if (!stats.branches[k].state.has_value()) {
            continue;
        }
        last_live = k;
        cumulative += stats.branches[k].probability;
        if (u < cumulative) {
            return k;
        }
    }
    return last_live;
}

// Draw a joint (a, b) result pair from a table, scanning a-major in the
// fixed order (-1,-1), (-1,0), ..., (+1,+1).
inline std::pair<int, int> draw_results(const OutcomeTable& table, double u) {
    double cumulative = 0.0;
    for (int a = -1; a <= 1; ++a) {
        for (int b = -1; b <= 1; ++b) {
            cumulative += table.probability(a, b);
            if (u < cumulative) {
                return {a, b};
            }
        }
    }
    return {1, 1};
}

// Seeded i.i.d. sampling of protocol records. Trial t draws its randomness
// from the (seed, t) stream only: first-stage branch by inverse CDF, each
// setting uniformly per side, then the joint second-stage results from the
// branch's exact table. Bit-identical sequences for equal seeds.
inline std::vector<ProtocolRecord> sample_protocol(std::uint64_t seed, int d,
                                                   const ChshSettings& settings,
                                                   std::int64_t trials,
                                                   int max_d = kDefaultMaxDimension) {
    if (trials < 1) {
        throw std::invalid_argument("sample_protocol: trials must be >= 1");
    }
    const ProtocolStatistics stats = run_protocol_exact(d, settings, max_d);
    std::vector<ProtocolRecord> records;
    records.reserve(static_cast<std::size_t>(trials));
    for (std::int64_t t = 0; t < trials; ++t) {
        TrialRng rng(seed, static_cast<std::uint64_t>(t));
        const std::size_t k = draw_branch(stats, rng.next_double());
        const BranchStatistics& branch = stats.branches[k];
        const int a_setting = rng.next_double() < 0.5 ? 0 : 1;
        const int b_setting = rng.next_double() < 0.5 ? 0 : 1;
        const auto [a, b] = draw_results(branch.table(a_setting, b_setting), rng.next_double());
        records.push_back({branch.p_outcome, branch.q_outcome, a_setting, b_setting, a, b});
    }
    return records;
}

// Empirical summary of a record set against the exact statistics: branch
// frequencies and the CHSH estimate on the {1,1} subensemble with its
// standard error.
struct EmpiricalSummary {
    std::int64_t trials = 0;
    std::array<std::int64_t, 4> branch_counts{};   // order 00, 01, 10, 11
    std::array<double, 4> branch_frequency{};
    std::array<double, 4> correlators{};           // {1,1} subensemble, by (sa<<1)|sb
    std::array<std::int64_t, 4> correlator_counts{};
    double chsh = 0.0;            // correlators combined with CHSH signs
    double chsh_std_error = 0.0;
};

inline EmpiricalSummary summarize_records(const std::vector<ProtocolRecord>& records) {
    EmpiricalSummary s;
    s.trials = static_cast<std::int64_t>(records.size());
    std::array<double, 4> product_sum{};
    for (const ProtocolRecord& r : records) {
        s.branch_counts[static_cast<std::size_t>((r.p_outcome << 1) | r.q_outcome)]++;
        if (r.p_outcome == 1 && r.q_outcome == 1) {
            const std::size_t pair = static_cast<std::size_t>((r.a_setting << 1) | r.b_setting);
            product_sum[pair] += r.a_result * r.b_result;
            s.correlator_counts[pair]++;
        }
    }
    for (std::size_t k = 0; k < 4; ++k) {
        s.branch_frequency[k] =
            s.trials > 0 ? static_cast<double>(s.branch_counts[k]) / s.trials : 0.0;
    }
    double variance = 0.0;
    for (std::size_t pair = 0; pair < 4; ++pair) {
        if (s.correlator_counts[pair] == 0) {
            throw std::domain_error("summarize_records: empty {1,1} setting pair");
        }
        s.correlators[pair] = product_sum[pair] / s.correlator_counts[pair];
        variance += (1.0 - s.correlators[pair] * s.correlators[pair]) /
                    static_cast<double>(s.correlator_counts[pair]);
    }
    s.chsh = s.correlators[0] + s.correlators[1] + s.correlators[2] - s.correlators[3];
    s.chsh_std_error = std::sqrt(variance);
    return s;
}

}  // namespace nonlocality
