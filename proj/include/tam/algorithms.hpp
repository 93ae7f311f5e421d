#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tam/advice.hpp"
#include "tam/disttest.hpp"
#include "tam/matching.hpp"
#include "tam/rng.hpp"

namespace tam {

struct AblationFlags {
    bool use_remap = true;
    bool use_bucket = true;
    bool use_patch = true;
};

// Knobs of the gate. beta is the baseline's competitive ratio; epsilon
// defaults to n_hat/n - beta (so tau = n_hat/n - beta). c_scale and kappa
// were pinned on the n = 2000 benchmark: c_scale scales the estimator's
// sample formula, kappa limits the testing phase to kappa * n arrivals when
// picking the grouped-domain size. gamma is the hard guard: budgets whose
// cap exceeds gamma * n skip testing entirely and run the baseline.
struct BudgetParams {
    double beta = 0.696;
    double delta = 0.005;
    double c_scale = 0.5;
    double gamma = 0.5;
    double kappa = 0.13;
    std::optional<double> epsilon;
    std::optional<std::size_t> bucket_target;
};

enum class GateOutcome {
    Pass,
    FailEstimate,
    FailOverflow,
    FailExhausted,
    SkippedLowAdvice,
    SkippedBudget,
    NotTested,  // advice-free baselines
    Error
};

std::string_view gate_outcome_name(GateOutcome g);
std::optional<GateOutcome> gate_outcome_from_name(std::string_view name);

struct RunOutcome {
    std::int64_t matches = 0;
    std::int64_t n_star = 0;
    double ratio = 0.0;
    GateOutcome verdict = GateOutcome::NotTested;
    std::optional<double> l1_hat;
    std::int64_t k_consumed = 0;      // arrivals consumed by the testing phase
    std::int64_t j_test_matches = 0;  // matches made during the testing phase
    std::int64_t n_hat = 0;           // matching size of preprocessed advice
    std::size_t r_eff = 0;            // testing-domain size actually used
    std::int64_t cap = 0;             // testing-phase arrival budget
    double wall_ms = 0.0;
};

// Matches each arrival to its lowest-index free neighbor.
Matching greedy_matching(const ImpliedGraph& g,
                         std::span<const std::uint32_t> order);

// Karp-Vazirani-Vazirani Ranking: one uniform permutation of the offline
// side per run; each arrival takes its best-ranked free neighbor.
Matching ranking_matching(const ImpliedGraph& g,
                          std::span<const std::uint32_t> order, Rng& rng);

// Plain advice mimicry over the whole arrival sequence (no testing, no
// extensions). Guarantees size >= n_hat - L1(c_star, c_hat)/2.
Matching mimic_matching(const ImpliedGraph& g,
                        std::span<const std::uint32_t> order,
                        const AdviceBundle& advice);

// The meta-algorithm: preprocess advice per flags, bail to the baseline on
// weak advice or infeasible budgets, otherwise mimic while buffering the
// first cap arrivals, gate on the estimated L1 distance, and either keep
// mimicking or hand the remaining arrivals to Ranking.
RunOutcome test_and_match(const ImpliedGraph& truth,
                          std::span<const std::uint32_t> order,
                          const AdviceBundle& advice, const AblationFlags& flags,
                          const BudgetParams& params, Rng& rng,
                          std::int64_t n_star);

// Ratio achieved on gadget `true_which` by the policy committed to the
// perfect matching of gadget `advised_which` (canonical arrival order).
double gadget_policy_ratio(std::uint32_t n, int true_which, int advised_which);

// {ratio with correct advice, ratio with wrong advice} for the gadget pair.
std::pair<double, double> hardness_demo(std::uint32_t n);

}  // namespace tam
