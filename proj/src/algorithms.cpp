#include "tam/algorithms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "tam/instances.hpp"

namespace tam {

std::string_view gate_outcome_name(GateOutcome g) {
    switch (g) {
        case GateOutcome::Pass: return "pass";
        case GateOutcome::FailEstimate: return "fail_estimate";
        case GateOutcome::FailOverflow: return "fail_overflow";
        case GateOutcome::FailExhausted: return "fail_exhausted";
        case GateOutcome::SkippedLowAdvice: return "skip_low_advice";
        case GateOutcome::SkippedBudget: return "skip_budget";
        case GateOutcome::NotTested: return "none";
        case GateOutcome::Error: return "error";
    }
    return "none";
}

std::optional<GateOutcome> gate_outcome_from_name(std::string_view name) {
    for (GateOutcome g :
         {GateOutcome::Pass, GateOutcome::FailEstimate, GateOutcome::FailOverflow,
          GateOutcome::FailExhausted, GateOutcome::SkippedLowAdvice,
          GateOutcome::SkippedBudget, GateOutcome::NotTested, GateOutcome::Error})
        if (gate_outcome_name(g) == name) return g;
    return std::nullopt;
}

Matching greedy_matching(const ImpliedGraph& g,
                         std::span<const std::uint32_t> order) {
    std::vector<std::int32_t> pairs(g.online_types.size(), -1);
    std::vector<bool> taken(g.n, false);
    for (std::uint32_t v : order) {
        for (std::uint32_t u : g.online_types[v].neighbors()) {
            if (!taken[u]) {
                taken[u] = true;
                pairs[v] = static_cast<std::int32_t>(u);
                break;
            }
        }
    }
    return Matching(std::move(pairs));
}

namespace {

std::vector<std::uint32_t> draw_ranks(std::uint32_t n, Rng& rng) {
    std::vector<std::uint32_t> perm = random_order(n, rng);
    std::vector<std::uint32_t> rank_of(n);
    for (std::uint32_t i = 0; i < n; ++i) rank_of[perm[i]] = i;
    return rank_of;
}

// One Ranking step: best-ranked free neighbor, or -1.
std::int32_t ranking_pick(const VertexType& type,
                          const std::vector<std::uint32_t>& rank_of,
                          const std::vector<bool>& taken) {
    std::int32_t best = -1;
    std::uint32_t best_rank = 0;
    for (std::uint32_t u : type.neighbors()) {
        if (taken[u]) continue;
        if (best < 0 || rank_of[u] < best_rank) {
            best = static_cast<std::int32_t>(u);
            best_rank = rank_of[u];
        }
    }
    return best;
}

}  // namespace

Matching ranking_matching(const ImpliedGraph& g,
                          std::span<const std::uint32_t> order, Rng& rng) {
    std::vector<std::uint32_t> rank_of = draw_ranks(g.n, rng);
    std::vector<std::int32_t> pairs(g.online_types.size(), -1);
    std::vector<bool> taken(g.n, false);
    for (std::uint32_t v : order) {
        std::int32_t u = ranking_pick(g.online_types[v], rank_of, taken);
        if (u >= 0) {
            taken[static_cast<std::uint32_t>(u)] = true;
            pairs[v] = u;
        }
    }
    return Matching(std::move(pairs));
}

namespace {

// Mutable per-run advice state: remaining count and unused matched partners
// per advice label. Slot vectors keep unmatched copies (-1) at the front so
// popping from the back consumes matched partners first.
class MimicState {
public:
    MimicState(const AdviceBundle& advice, const PatchRecord& patch,
               const AblationFlags& flags)
        : use_remap_(flags.use_remap), use_patch_(flags.use_patch) {
        const auto& entries = advice.hist.entries();
        labels_.reserve(entries.size());
        for (const auto& [type, count] : entries) {
            index_.emplace(type, labels_.size());
            labels_.push_back(type);
        }
        slots_.resize(labels_.size());
        remaining_.resize(labels_.size());
        const std::vector<VertexType> expanded = advice.hist.expand();
        for (std::size_t v = 0; v < expanded.size(); ++v) {
            std::size_t li = index_.at(expanded[v]);
            slots_[li].push_back(advice.m_hat.offline_for(v));
        }
        for (std::size_t li = 0; li < slots_.size(); ++li) {
            std::stable_partition(slots_[li].begin(), slots_[li].end(),
                                  [](std::int32_t p) { return p < 0; });
            remaining_[li] = static_cast<std::int64_t>(slots_[li].size());
        }
        if (patch.applied) {
            auto it = index_.find(patch.new_label);
            if (it != index_.end()) patch_label_ = it->second;
        }
    }

    // Decision for one arrival. Returns the offline vertex to match or
    // nullopt (arrival stays unmatched). `taken` is the run's offline state.
    std::optional<std::uint32_t> step(const VertexType& arrival,
                                      const std::vector<bool>& taken) {
        std::optional<std::size_t> li = pick_label(arrival);
        if (li) {
            std::int32_t partner = slots_[*li].back();
            slots_[*li].pop_back();
            --remaining_[*li];
            if (partner < 0) return std::nullopt;  // copy unmatched in m_hat
            auto u = static_cast<std::uint32_t>(partner);
            if (!arrival.contains(u) || taken[u])
                throw std::logic_error("Mimic proposed an unusable match");
            return u;
        }
        if (use_patch_ && patch_label_) return patch_rescue(arrival, taken);
        return std::nullopt;
    }

private:
    std::optional<std::size_t> pick_label(const VertexType& arrival) const {
        auto it = index_.find(arrival);
        if (it != index_.end() && remaining_[it->second] > 0)
            return it->second;  // exact hit is always the largest subset
        if (!use_remap_) return std::nullopt;
        return remap_online(arrival, labels_, remaining_);
    }

    // Lemma-C.1 style rescue: match an unrecognized arrival to a free true
    // neighbor inside A_U by consuming one of the dummy label's slots.
    std::optional<std::uint32_t> patch_rescue(const VertexType& arrival,
                                              const std::vector<bool>& taken) {
        auto& pool = slots_[*patch_label_];
        for (std::size_t i = pool.size(); i-- > 0;) {
            if (pool[i] < 0) continue;
            auto u = static_cast<std::uint32_t>(pool[i]);
            if (taken[u] || !arrival.contains(u)) continue;
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
            --remaining_[*patch_label_];
            return u;
        }
        return std::nullopt;
    }

    std::vector<VertexType> labels_;
    std::vector<std::int64_t> remaining_;
    std::vector<std::vector<std::int32_t>> slots_;
    std::unordered_map<VertexType, std::size_t, VertexTypeHash> index_;
    std::optional<std::size_t> patch_label_;
    bool use_remap_;
    bool use_patch_;
};

}  // namespace

Matching mimic_matching(const ImpliedGraph& g,
                        std::span<const std::uint32_t> order,
                        const AdviceBundle& advice) {
    MimicState mimic(advice, PatchRecord{}, AblationFlags{false, false, false});
    std::vector<std::int32_t> pairs(g.online_types.size(), -1);
    std::vector<bool> taken(g.n, false);
    for (std::uint32_t v : order) {
        auto u = mimic.step(g.online_types[v], taken);
        if (u) {
            taken[*u] = true;
            pairs[v] = static_cast<std::int32_t>(*u);
        }
    }
    return Matching(std::move(pairs));
}

namespace {

// Grouped-domain size whose testing budget fits within kappa * n arrivals,
// preferring the cheapest cap (the budget is sunk whenever the gate fails)
// and breaking ties toward the finer domain. Zero if nothing fits.
std::size_t pick_bucket_target(std::uint32_t n, double epsilon,
                               const BudgetParams& params) {
    std::size_t best = 0;
    std::int64_t best_cap = 0;
    const double limit = params.kappa * static_cast<double>(n);
    for (std::size_t r = 2; r <= 512; ++r) {
        TestBudget b =
            TestBudget::make(r, epsilon, 1.0, params.delta, params.c_scale);
        if (static_cast<double>(b.cap) > limit) continue;
        if (best == 0 || b.cap <= best_cap) {
            best = r;
            best_cap = b.cap;
        }
    }
    return best;
}

}  // namespace

RunOutcome test_and_match(const ImpliedGraph& truth,
                          std::span<const std::uint32_t> order,
                          const AdviceBundle& advice, const AblationFlags& flags,
                          const BudgetParams& params, Rng& rng,
                          std::int64_t n_star) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint32_t n = truth.n;
    if (order.size() != truth.online_types.size())
        throw std::invalid_argument("test_and_match: order size mismatch");

    RunOutcome out;
    out.n_star = n_star;

    auto finish = [&](std::int64_t matches) {
        out.matches = matches;
        out.ratio = competitive_ratio(matches, n_star);
        out.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        return out;
    };
    auto baseline_all = [&](GateOutcome why) {
        out.verdict = why;
        return finish(static_cast<std::int64_t>(
            ranking_matching(truth, order, rng).size()));
    };

    AdviceBundle working = advice;
    PatchRecord patch;
    if (flags.use_patch) {
        auto [patched, record] = patch_advice(advice);
        working = std::move(patched);
        patch = std::move(record);
    }
    out.n_hat = working.n_hat;
    const double nh_ratio =
        static_cast<double>(working.n_hat) / static_cast<double>(n);

    if (nh_ratio <= params.beta)
        return baseline_all(GateOutcome::SkippedLowAdvice);

    const double epsilon = params.epsilon.value_or(nh_ratio - params.beta);
    if (epsilon <= 0.0)
        throw std::invalid_argument("test_and_match: epsilon must be positive");
    const double tau = 2.0 * (nh_ratio - params.beta) - epsilon;
    if (tau <= 0.0) return baseline_all(GateOutcome::SkippedLowAdvice);

    ReducedDomain domain = ReducedDomain::from_support(working.hist);
    if (flags.use_bucket) {
        std::size_t target = params.bucket_target.value_or(0);
        if (target == 0) target = pick_bucket_target(n, epsilon, params);
        if (target == 0) return baseline_all(GateOutcome::SkippedBudget);
        if (target < domain.num_real_labels())
            domain = ReducedDomain::grouped(working.hist, target);
    }
    out.r_eff = domain.num_real_labels();

    const TestBudget budget = TestBudget::make(out.r_eff, epsilon, tau,
                                               params.delta, params.c_scale);
    out.cap = budget.cap;
    if (static_cast<double>(budget.cap) >
        params.gamma * static_cast<double>(n))
        return baseline_all(GateOutcome::SkippedBudget);

    const std::vector<double> q = frequency_vector(working.hist, domain);
    MimicState mimic(working, patch, flags);
    std::vector<bool> taken(n, false);
    std::int64_t matches = 0;

    ArrivalBuffer buffer;
    buffer.n = n;
    const auto k_phase =
        static_cast<std::size_t>(std::min<std::int64_t>(
            budget.cap, static_cast<std::int64_t>(order.size())));
    buffer.seen.reserve(k_phase);
    for (std::size_t i = 0; i < k_phase; ++i) {
        const VertexType& type = truth.online_types[order[i]];
        buffer.seen.push_back(type);
        auto u = mimic.step(type, taken);
        if (u) {
            taken[*u] = true;
            ++matches;
        }
    }
    out.k_consumed = static_cast<std::int64_t>(k_phase);
    out.j_test_matches = matches;

    const TestResult tr = minimax_test(budget, q, domain, buffer, rng);
    out.l1_hat = tr.l1_hat;
    switch (tr.verdict) {
        case TestVerdict::Pass: out.verdict = GateOutcome::Pass; break;
        case TestVerdict::FailEstimate:
            out.verdict = GateOutcome::FailEstimate;
            break;
        case TestVerdict::FailOverflow:
            out.verdict = GateOutcome::FailOverflow;
            break;
        case TestVerdict::FailExhausted:
            out.verdict = GateOutcome::FailExhausted;
            break;
    }

    if (out.verdict == GateOutcome::Pass) {
        for (std::size_t i = k_phase; i < order.size(); ++i) {
            const VertexType& type = truth.online_types[order[i]];
            auto u = mimic.step(type, taken);
            if (u) {
                taken[*u] = true;
                ++matches;
            }
        }
    } else {
        // Resume with the baseline: fresh ranks, drawn over the offline side;
        // already-matched vertices simply stay unavailable.
        std::vector<std::uint32_t> rank_of = draw_ranks(n, rng);
        for (std::size_t i = k_phase; i < order.size(); ++i) {
            std::int32_t u =
                ranking_pick(truth.online_types[order[i]], rank_of, taken);
            if (u >= 0) {
                taken[static_cast<std::uint32_t>(u)] = true;
                ++matches;
            }
        }
    }
    return finish(matches);
}

double gadget_policy_ratio(std::uint32_t n, int true_which, int advised_which) {
    if (advised_which != 1 && advised_which != 2)
        throw std::invalid_argument("gadget_policy_ratio: bad advised_which");
    const ImpliedGraph g = gen_gadget(n, true_which);
    const std::uint32_t half = n / 2;
    std::vector<bool> taken(n, false);
    std::int64_t matches = 0;
    // First half: commit to the advised gadget's unique perfect matching.
    for (std::uint32_t j = 0; j < half; ++j) {
        std::uint32_t u = advised_which == 1 ? j + half : j;
        taken[u] = true;
        ++matches;
    }
    // Second half: each arrival has a single neighbor; match if still free.
    for (std::uint32_t j = half; j < n; ++j) {
        std::uint32_t u = g.online_types[j].neighbors().front();
        if (!taken[u]) {
            taken[u] = true;
            ++matches;
        }
    }
    return competitive_ratio(matches, static_cast<std::int64_t>(n));
}

std::pair<double, double> hardness_demo(std::uint32_t n) {
    return {gadget_policy_ratio(n, 1, 1), gadget_policy_ratio(n, 1, 2)};
}

}  // namespace tam
