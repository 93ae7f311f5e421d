#include "tam/matching.hpp"

#include <limits>
#include <queue>
#include <stdexcept>

namespace tam {

namespace {

constexpr std::int32_t kFree = -1;
constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();

// Hopcroft-Karp over an adjacency view. `adj` maps each online vertex to its
// offline neighbors; `active` masks out consumed online vertices.
class HopcroftKarp {
public:
    HopcroftKarp(std::size_t num_online, std::uint32_t num_offline,
                 std::span<const VertexType> adj,
                 const std::vector<bool>* offline_blocked = nullptr,
                 const std::vector<bool>* online_blocked = nullptr)
        : adj_(adj),
          offline_blocked_(offline_blocked),
          online_blocked_(online_blocked),
          match_online_(num_online, kFree),
          match_offline_(num_offline, kFree),
          dist_(num_online, kInf) {}

    std::vector<std::int32_t> solve() {
        while (bfs()) {
            for (std::size_t v = 0; v < adj_.size(); ++v)
                if (match_online_[v] == kFree && usable_online(v)) dfs(v);
        }
        return std::move(match_online_);
    }

private:
    bool usable_online(std::size_t v) const {
        return !online_blocked_ || !(*online_blocked_)[v];
    }
    bool usable_offline(std::uint32_t u) const {
        return !offline_blocked_ || !(*offline_blocked_)[u];
    }

    bool bfs() {
        std::queue<std::uint32_t> q;
        for (std::size_t v = 0; v < adj_.size(); ++v) {
            if (!usable_online(v)) {
                dist_[v] = kInf;
                continue;
            }
            if (match_online_[v] == kFree) {
                dist_[v] = 0;
                q.push(static_cast<std::uint32_t>(v));
            } else {
                dist_[v] = kInf;
            }
        }
        bool found_free = false;
        while (!q.empty()) {
            std::uint32_t v = q.front();
            q.pop();
            for (std::uint32_t u : adj_[v].neighbors()) {
                if (!usable_offline(u)) continue;
                std::int32_t w = match_offline_[u];
                if (w == kFree) {
                    found_free = true;
                } else if (dist_[w] == kInf) {
                    dist_[w] = dist_[v] + 1;
                    q.push(static_cast<std::uint32_t>(w));
                }
            }
        }
        return found_free;
    }

    bool dfs(std::size_t v) {
        for (std::uint32_t u : adj_[v].neighbors()) {
            if (!usable_offline(u)) continue;
            std::int32_t w = match_offline_[u];
            if (w == kFree || (dist_[w] == dist_[v] + 1 && dfs(w))) {
                match_online_[v] = static_cast<std::int32_t>(u);
                match_offline_[u] = static_cast<std::int32_t>(v);
                return true;
            }
        }
        dist_[v] = kInf;
        return false;
    }

    std::span<const VertexType> adj_;
    const std::vector<bool>* offline_blocked_;
    const std::vector<bool>* online_blocked_;
    std::vector<std::int32_t> match_online_;
    std::vector<std::int32_t> match_offline_;
    std::vector<std::uint32_t> dist_;
};

}  // namespace

Matching max_matching(const ImpliedGraph& g) {
    for (const auto& t : g.online_types)
        if (!t.valid_for(g.n))
            throw std::invalid_argument("max_matching: type out of range");
    HopcroftKarp hk(g.online_types.size(), g.n, g.online_types);
    return Matching(hk.solve());
}

double competitive_ratio(std::int64_t m, std::int64_t n_star) {
    if (n_star < 1)
        throw std::invalid_argument("competitive_ratio: n_star must be >= 1");
    if (m < 0 || m > n_star)
        throw std::invalid_argument("competitive_ratio: need 0 <= m <= n_star");
    return static_cast<double>(m) / static_cast<double>(n_star);
}

std::int64_t postfix_optimum(const ImpliedGraph& g,
                             std::span<const std::uint32_t> consumed_online,
                             std::span<const std::uint32_t> consumed_offline) {
    std::vector<bool> online_blocked(g.online_types.size(), false);
    std::vector<bool> offline_blocked(g.n, false);
    for (std::uint32_t v : consumed_online) online_blocked.at(v) = true;
    for (std::uint32_t u : consumed_offline) offline_blocked.at(u) = true;
    HopcroftKarp hk(g.online_types.size(), g.n, g.online_types,
                    &offline_blocked, &online_blocked);
    return static_cast<std::int64_t>(Matching(hk.solve()).size());
}

bool matching_valid_for(const Matching& m, const ImpliedGraph& g) {
    if (m.num_online() != g.online_types.size()) return false;
    for (std::size_t v = 0; v < m.num_online(); ++v) {
        std::int32_t u = m.offline_for(v);
        if (u < 0) continue;
        if (static_cast<std::uint32_t>(u) >= g.n) return false;
        if (!g.online_types[v].contains(static_cast<std::uint32_t>(u)))
            return false;
    }
    return true;  // injectivity is enforced by the Matching constructor
}

}  // namespace tam
