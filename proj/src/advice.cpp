#include "tam/advice.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <unordered_map>

namespace tam {

AdviceBundle AdviceBundle::from(TypeHistogram hist) {
    ImpliedGraph g = ImpliedGraph::from_histogram(hist);
    Matching m = max_matching(g);
    std::int64_t n_hat = static_cast<std::int64_t>(m.size());
    return AdviceBundle{std::move(hist), std::move(m), n_hat};
}

std::pair<AdviceBundle, PatchRecord> patch_advice(const AdviceBundle& advice) {
    const std::uint32_t n = advice.hist.n();
    const std::int64_t k = static_cast<std::int64_t>(n) - advice.n_hat;
    PatchRecord record;
    if (k == 0) return {advice, record};

    const std::vector<VertexType> expanded = advice.hist.expand();
    std::vector<bool> offline_used(n, false);
    for (std::size_t v = 0; v < expanded.size(); ++v) {
        std::int32_t u = advice.m_hat.offline_for(v);
        if (u >= 0)
            offline_used[static_cast<std::size_t>(u)] = true;
        else
            record.unmatched_online.push_back(static_cast<std::uint32_t>(v));
    }
    for (std::uint32_t u = 0; u < n; ++u)
        if (!offline_used[u]) record.unmatched_offline.push_back(u);

    std::map<VertexType, std::int64_t> counts;
    for (const auto& [type, count] : advice.hist.entries())
        counts.emplace(type, count);
    for (std::uint32_t v : record.unmatched_online) {
        auto it = counts.find(expanded[v]);
        if (--it->second == 0) counts.erase(it);
    }
    record.new_label = VertexType(record.unmatched_offline);
    counts[record.new_label] += k;

    std::vector<std::pair<VertexType, std::int64_t>> entries(counts.begin(),
                                                             counts.end());
    record.applied = true;
    record.k = k;
    return {AdviceBundle::from(TypeHistogram(n, std::move(entries))),
            std::move(record)};
}

namespace {

struct Bucket {
    VertexType label;
    std::int64_t count = 0;
};

// Partner losing the fewest offline vertices: maximize |label ∩ partner|,
// then prefer the heavier partner (consolidates buckets), then the
// lexicographically smaller label. Returns npos if no intersection is
// nonempty.
std::size_t best_partner(const std::vector<Bucket>& buckets, std::size_t a) {
    std::size_t best = std::string::npos;
    std::size_t best_overlap = 0;
    for (std::size_t b = 0; b < buckets.size(); ++b) {
        if (b == a) continue;
        VertexType inter = buckets[a].label.intersect(buckets[b].label);
        if (inter.empty()) continue;
        std::size_t overlap = inter.size();
        if (best == std::string::npos || overlap > best_overlap ||
            (overlap == best_overlap &&
             (buckets[b].count > buckets[best].count ||
              (buckets[b].count == buckets[best].count &&
               buckets[b].label < buckets[best].label)))) {
            best = b;
            best_overlap = overlap;
        }
    }
    return best;
}

// Ascending count, ties by label, restricted to unfrozen buckets.
std::size_t pick_smallest(const std::vector<Bucket>& buckets,
                          const std::vector<bool>& frozen) {
    std::size_t pick = std::string::npos;
    for (std::size_t i = 0; i < buckets.size(); ++i) {
        if (frozen[i]) continue;
        if (pick == std::string::npos ||
            buckets[i].count < buckets[pick].count ||
            (buckets[i].count == buckets[pick].count &&
             buckets[i].label < buckets[pick].label))
            pick = i;
    }
    return pick;
}

CoarsenResult coarsen_impl(const AdviceBundle& advice, std::size_t target_r,
                           std::int64_t min_count) {
    std::vector<Bucket> buckets;
    for (const auto& [type, count] : advice.hist.entries())
        buckets.push_back({type, count});
    std::vector<bool> frozen(buckets.size(), false);
    std::size_t merges = 0;

    // Loop guard: unfrozen work remains. The reached-target flag is stricter
    // (frozen below-threshold buckets mean the target was not met).
    auto work_remains = [&]() {
        if (target_r > 0) return buckets.size() > target_r;
        for (std::size_t i = 0; i < buckets.size(); ++i)
            if (!frozen[i] && buckets[i].count < min_count) return true;
        return false;
    };
    auto target_met = [&]() {
        if (target_r > 0) return buckets.size() <= target_r;
        for (const auto& bucket : buckets)
            if (bucket.count < min_count) return false;
        return true;
    };

    while (work_remains()) {
        std::size_t a = pick_smallest(buckets, frozen);
        std::size_t b = a == std::string::npos ? std::string::npos
                                               : best_partner(buckets, a);
        while (a != std::string::npos && b == std::string::npos) {
            frozen[a] = true;  // no legal merge for this bucket
            a = pick_smallest(buckets, frozen);
            if (a != std::string::npos) b = best_partner(buckets, a);
        }
        if (a == std::string::npos) break;  // no legal merge anywhere

        buckets[b].label = buckets[a].label.intersect(buckets[b].label);
        buckets[b].count += buckets[a].count;
        buckets.erase(buckets.begin() + static_cast<std::ptrdiff_t>(a));
        frozen.assign(buckets.size(), false);
        ++merges;
    }

    bool reached = target_met();
    if (merges == 0)
        return {advice, reached, 0};

    // Merging can make two bucket labels coincide; aggregate before rebuild.
    std::map<VertexType, std::int64_t> agg;
    for (const auto& bucket : buckets) agg[bucket.label] += bucket.count;
    std::vector<std::pair<VertexType, std::int64_t>> entries(agg.begin(),
                                                             agg.end());
    return {AdviceBundle::from(TypeHistogram(advice.hist.n(), std::move(entries))),
            reached, merges};
}

}  // namespace

CoarsenResult bucket_coarsen(const AdviceBundle& advice, std::size_t target_r) {
    if (target_r < 1)
        throw std::invalid_argument("bucket_coarsen: target_r must be >= 1");
    return coarsen_impl(advice, target_r, 0);
}

CoarsenResult bucket_coarsen_threshold(const AdviceBundle& advice,
                                       std::int64_t min_count) {
    if (min_count < 1)
        throw std::invalid_argument("bucket_coarsen_threshold: min_count >= 1");
    return coarsen_impl(advice, 0, min_count);
}

namespace {

// Plain Edmonds-Karp; capacities are bounded by n and the network is small
// (r + s + 2 nodes), so repeated BFS augmentation is exact and fast enough.
class MaxFlow {
public:
    explicit MaxFlow(std::size_t num_nodes) : adj_(num_nodes) {}

    void add_edge(std::size_t from, std::size_t to, std::int64_t cap) {
        adj_[from].push_back({to, cap, adj_[to].size()});
        adj_[to].push_back({from, 0, adj_[from].size() - 1});
    }

    std::int64_t run(std::size_t source, std::size_t sink) {
        std::int64_t total = 0;
        while (true) {
            std::vector<std::pair<std::size_t, std::size_t>> parent(
                adj_.size(), {std::string::npos, 0});
            std::queue<std::size_t> q;
            q.push(source);
            parent[source] = {source, 0};
            while (!q.empty() && parent[sink].first == std::string::npos) {
                std::size_t v = q.front();
                q.pop();
                for (std::size_t e = 0; e < adj_[v].size(); ++e) {
                    const Edge& edge = adj_[v][e];
                    if (edge.cap > 0 &&
                        parent[edge.to].first == std::string::npos) {
                        parent[edge.to] = {v, e};
                        q.push(edge.to);
                    }
                }
            }
            if (parent[sink].first == std::string::npos) break;
            std::int64_t bottleneck = std::numeric_limits<std::int64_t>::max();
            for (std::size_t v = sink; v != source;) {
                auto [pv, pe] = parent[v];
                bottleneck = std::min(bottleneck, adj_[pv][pe].cap);
                v = pv;
            }
            for (std::size_t v = sink; v != source;) {
                auto [pv, pe] = parent[v];
                Edge& fwd = adj_[pv][pe];
                fwd.cap -= bottleneck;
                adj_[fwd.to][fwd.rev].cap += bottleneck;
                v = pv;
            }
            total += bottleneck;
        }
        return total;
    }

    // Flow pushed along a forward edge = reverse residual capacity.
    std::int64_t flow_on(std::size_t from, std::size_t edge_index) const {
        const Edge& e = adj_[from][edge_index];
        return adj_[e.to][e.rev].cap;
    }

private:
    struct Edge {
        std::size_t to;
        std::int64_t cap;
        std::size_t rev;
    };
    std::vector<std::vector<Edge>> adj_;
};

}  // namespace

Remapping remap_offline(const TypeHistogram& c_star,
                        const TypeHistogram& advice) {
    if (c_star.n() != advice.n())
        throw std::invalid_argument("remap_offline: histograms differ in n");
    const auto& true_entries = c_star.entries();
    const auto& advice_entries = advice.entries();
    const std::size_t r = true_entries.size();
    const std::size_t s = advice_entries.size();
    const std::size_t source = 0;
    const std::size_t sink = r + s + 1;

    MaxFlow flow(r + s + 2);
    // Remember per-true-type middle edges so flows can be read back.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> mid(r);
    for (std::size_t i = 0; i < r; ++i)
        flow.add_edge(source, 1 + i, true_entries[i].second);
    for (std::size_t j = 0; j < s; ++j)
        flow.add_edge(1 + r + j, sink, advice_entries[j].second);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < s; ++j) {
            if (!advice_entries[j].first.subset_of(true_entries[i].first))
                continue;
            // Index of the forward edge inside adj_[1+i]: slot 0 holds the
            // reverse of the source edge, mid edges follow in order.
            std::size_t edge_index = mid[i].size() + 1;
            flow.add_edge(1 + i, 1 + r + j, true_entries[i].second);
            mid[i].emplace_back(j, edge_index);
        }
    }

    Remapping result;
    result.overlap = flow.run(source, sink);
    result.assignment.resize(r);
    for (std::size_t i = 0; i < r; ++i) {
        for (auto [j, edge_index] : mid[i]) {
            std::int64_t f = flow.flow_on(1 + i, edge_index);
            if (f > 0) result.assignment[i].emplace_back(j, f);
        }
    }
    return result;
}

std::optional<std::size_t> remap_online(
    const VertexType& arrival, std::span<const VertexType> labels,
    std::span<const std::int64_t> remaining) {
    if (labels.size() != remaining.size())
        throw std::invalid_argument("remap_online: size mismatch");
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (remaining[i] <= 0) continue;
        if (!labels[i].subset_of(arrival)) continue;
        if (!best) {
            best = i;
            continue;
        }
        const auto& cand = labels[i];
        const auto& cur = labels[*best];
        if (cand.size() > cur.size() ||
            (cand.size() == cur.size() && remaining[i] > remaining[*best]))
            best = i;
    }
    return best;
}

}  // namespace tam
