// lhv.hpp
// Brute-force local-hidden-variables engine. A hidden variable is a pair of
// deterministic per-side response tables mapping the local setting to an
// outcome in {-1, 0, +1}; a model is a finite weighted mixture of such
// pairs. Exhaustive enumeration of the dichotomic strategies establishes the
// classical CHSH bound of 2, and two concrete witness models exhibit the
// post-selection loophole and the marginal-consistency gap that make room
// for a local model of the unfiltered correlations.

#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nonlocality::lhv {

inline constexpr double kWeightTol = 1e-12;

// Deterministic response table for one side: setting index {0,1} -> outcome.
struct LocalStrategy {
    std::array<int, 2> responses{};  // each -1, 0 or +1

    int response(int setting) const { return responses[static_cast<std::size_t>(setting)]; }
    bool dichotomic() const { return responses[0] != 0 && responses[1] != 0; }
};

inline void validate_strategy(const LocalStrategy& s) {
    for (int r : s.responses) {
        if (r < -1 || r > 1) {
            throw std::invalid_argument("LocalStrategy: outcomes must lie in {-1, 0, +1}");
        }
    }
}

struct Component {
    double weight = 0.0;
    LocalStrategy alice;
    LocalStrategy bob;
};

// Weighted finite mixture of deterministic strategy pairs; weights are
// positive and sum to 1 within 1e-12.
class LhvModel {
  public:
    explicit LhvModel(std::vector<Component> components) : components_(std::move(components)) {
        if (components_.empty()) {
            throw std::invalid_argument("LhvModel: no components");
        }
        double total = 0.0;
        for (const Component& c : components_) {
            if (!(c.weight > 0.0)) {
                throw std::invalid_argument("LhvModel: weights must be positive");
            }
            validate_strategy(c.alice);
            validate_strategy(c.bob);
            total += c.weight;
        }
        if (std::abs(total - 1.0) > kWeightTol) {
            throw std::invalid_argument("LhvModel: weights sum to " + std::to_string(total));
        }
    }

    const std::vector<Component>& components() const { return components_; }

    bool dichotomic() const {
        for (const Component& c : components_) {
            if (!c.alice.dichotomic() || !c.bob.dichotomic()) {
                return false;
            }
        }
        return true;
    }

  private:
    std::vector<Component> components_;
};

// CHSH signs: +, +, + on setting pairs (0,0), (0,1), (1,0) and - on (1,1).
inline double chsh_sign(int a_setting, int b_setting) {
    return (a_setting == 1 && b_setting == 1) ? -1.0 : 1.0;
}

// Standard dichotomic CHSH of a model with no zero outcomes anywhere:
// sum over lambda of w * [a0 b0 + a0 b1 + a1 b0 - a1 b1].
inline double chsh_of_model(const LhvModel& m) {
    if (!m.dichotomic()) {
        throw std::domain_error(
            "chsh_of_model: zero outcomes present; use the post-selected evaluator");
    }
    double sum = 0.0;
    for (const Component& c : m.components()) {
        for (int sa = 0; sa < 2; ++sa) {
            for (int sb = 0; sb < 2; ++sb) {
                sum += chsh_sign(sa, sb) * c.weight * c.alice.response(sa) * c.bob.response(sb);
            }
        }
    }
    return sum;
}

// Full-ensemble CHSH with zero outcomes scored as 0 in the correlators.
inline double chsh_scoring_zeros(const LhvModel& m) {
    double sum = 0.0;
    for (const Component& c : m.components()) {
        for (int sa = 0; sa < 2; ++sa) {
            for (int sb = 0; sb < 2; ++sb) {
                sum += chsh_sign(sa, sb) * c.weight * c.alice.response(sa) * c.bob.response(sb);
            }
        }
    }
    return sum;
}

// All 4 deterministic dichotomic response tables for one side, enumerated in
// a fixed lexicographic order over (response to 0, response to 1).
inline std::array<LocalStrategy, 4> dichotomic_strategies() {
    std::array<LocalStrategy, 4> out{};
    std::size_t k = 0;
    for (int r0 : {-1, 1}) {
        for (int r1 : {-1, 1}) {
            out[k++] = LocalStrategy{{r0, r1}};
        }
    }
    return out;
}

struct DeterministicEnumeration {
    double maximum = 0.0;       // largest signed CHSH
    double minimum = 0.0;       // smallest signed CHSH
    double max_abs = 0.0;       // classical bound
    int pair_count = 0;         // strategy pairs enumerated
    int attaining_max_abs = 0;  // pairs with |CHSH| equal to the bound
};

// Exhaustive sweep over all dichotomic strategy pairs (4 per side, 16 pairs,
// one CHSH per pair assembled from its 4 setting-pair products).
inline DeterministicEnumeration enumerate_deterministic_chsh() {
    DeterministicEnumeration e;
    bool first = true;
    for (const LocalStrategy& alice : dichotomic_strategies()) {
        for (const LocalStrategy& bob : dichotomic_strategies()) {
            const double value = chsh_of_model(LhvModel({{1.0, alice, bob}}));
            if (first || value > e.maximum) e.maximum = value;
            if (first || value < e.minimum) e.minimum = value;
            first = false;
            ++e.pair_count;
        }
    }
    e.max_abs = std::max(std::abs(e.maximum), std::abs(e.minimum));
    for (const LocalStrategy& alice : dichotomic_strategies()) {
        for (const LocalStrategy& bob : dichotomic_strategies()) {
            const double value = chsh_of_model(LhvModel({{1.0, alice, bob}}));
            if (std::abs(std::abs(value) - e.max_abs) == 0.0) {
                ++e.attaining_max_abs;
            }
        }
    }
    return e;
}

// The deterministic (hence classical) CHSH bound: exactly 2.
inline double max_deterministic_chsh() {
    return enumerate_deterministic_chsh().max_abs;
}

// Per-setting-pair selection data for post-selected evaluation, indexed by
// (a_setting << 1) | b_setting.
struct SelectionStats {
    std::array<double, 4> selected_weight{};  // mass with both outcomes nonzero
    std::array<double, 4> correlator{};       // E(ab) on the selected mass
    double postselected_chsh = 0.0;
};

inline SelectionStats postselected_statistics(const LhvModel& m) {
    SelectionStats s;
    for (int sa = 0; sa < 2; ++sa) {
        for (int sb = 0; sb < 2; ++sb) {
            const std::size_t pair = static_cast<std::size_t>((sa << 1) | sb);
            double selected = 0.0;
            double weighted_product = 0.0;
            for (const Component& c : m.components()) {
                const int a = c.alice.response(sa);
                const int b = c.bob.response(sb);
                if (a != 0 && b != 0) {
                    selected += c.weight;
                    weighted_product += c.weight * a * b;
                }
            }
            if (selected <= kWeightTol) {
                throw std::domain_error("postselected_chsh: empty selection for setting pair (" +
                                        std::to_string(sa) + "," + std::to_string(sb) + ")");
            }
            s.selected_weight[pair] = selected;
            s.correlator[pair] = weighted_product / selected;
            s.postselected_chsh += chsh_sign(sa, sb) * s.correlator[pair];
        }
    }
    return s;
}

// CHSH evaluated only on the subensemble where both sides answered +-1.
// The selected subensemble depends on the settings, so the classical bound
// of 2 no longer constrains this quantity.
inline double postselected_chsh(const LhvModel& m) {
    return postselected_statistics(m).postselected_chsh;
}

// Witness model for the post-selection loophole: four equal-weight hidden
// variables, each answering +-1 only for one setting pair (0 otherwise),
// with signs matching the CHSH combination. Every selected correlator is
// then +-1 with the CHSH sign, so the post-selected CHSH reaches 4 while
// the full-ensemble value, zeros scored as 0, is only 1.
inline LhvModel loophole_demo_model() {
    auto only = [](int setting, int outcome) {
        LocalStrategy s{{0, 0}};
        s.responses[static_cast<std::size_t>(setting)] = outcome;
        return s;
    };
    std::vector<Component> components;
    components.push_back({0.25, only(0, 1), only(0, 1)});   // selected by pair (0,0), product +1
    components.push_back({0.25, only(0, 1), only(1, 1)});   // selected by pair (0,1), product +1
    components.push_back({0.25, only(1, 1), only(0, 1)});   // selected by pair (1,0), product +1
    components.push_back({0.25, only(1, 1), only(1, -1)});  // selected by pair (1,1), product -1
    return LhvModel(std::move(components));
}

// Marginal-consistency demonstration: the ensemble-averaged chance of the
// outcome 0 is identical for the two settings, yet no single hidden variable
// reproduces that equality pointwise.
struct MarginalReport {
    // Probability mass of outcome 0 on side 1, averaged over the mixture,
    // for settings 0 and 1.
    std::array<double, 2> averaged_zero_mass{};
    // Complementary +-1 outcome mass, averaged.
    std::array<double, 2> averaged_pm_mass{};
    // Per-component masses, [component][setting].
    std::vector<std::array<double, 2>> component_zero_mass;
    std::vector<std::array<double, 2>> component_pm_mass;
    double max_component_zero_gap = 0.0;  // max over components of |P(0|s=0) - P(0|s=1)|
    double max_component_pm_gap = 0.0;
};

struct MarginalDemo {
    LhvModel model;
    MarginalReport report;
};

inline MarginalReport marginal_report(const LhvModel& m) {
    MarginalReport r;
    for (const Component& c : m.components()) {
        std::array<double, 2> zero_mass{};
        std::array<double, 2> pm_mass{};
        for (int s = 0; s < 2; ++s) {
            const std::size_t si = static_cast<std::size_t>(s);
            zero_mass[si] = c.alice.response(s) == 0 ? 1.0 : 0.0;
            pm_mass[si] = 1.0 - zero_mass[si];
            r.averaged_zero_mass[si] += c.weight * zero_mass[si];
            r.averaged_pm_mass[si] += c.weight * pm_mass[si];
        }
        r.max_component_zero_gap =
            std::max(r.max_component_zero_gap, std::abs(zero_mass[0] - zero_mass[1]));
        r.max_component_pm_gap =
            std::max(r.max_component_pm_gap, std::abs(pm_mass[0] - pm_mass[1]));
        r.component_zero_mass.push_back(zero_mass);
        r.component_pm_mass.push_back(pm_mass);
    }
    return r;
}

// Two equal-weight hidden variables: the first answers 0 under setting 0 and
// +1 under setting 1, the second the reverse. Averaged over the ensemble the
// 0-outcome mass is 1/2 for both settings, but each component's masses for
// the two settings differ by 1.
inline MarginalDemo marginal_consistency_demo() {
    const LocalStrategy bob{{1, 1}};
    std::vector<Component> components;
    components.push_back({0.5, LocalStrategy{{0, 1}}, bob});
    components.push_back({0.5, LocalStrategy{{1, 0}}, bob});
    LhvModel model(std::move(components));
    MarginalReport report = marginal_report(model);
    return {std::move(model), std::move(report)};
}

}  // namespace nonlocality::lhv
