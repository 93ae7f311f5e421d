#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tam/types.hpp"

namespace tam {

// Bipartite instance implied by a histogram: n offline vertices and one
// online vertex per expanded type, in the histogram's deterministic order.
struct ImpliedGraph {
    std::uint32_t n = 0;
    std::vector<VertexType> online_types;

    static ImpliedGraph from_histogram(const TypeHistogram& hist) {
        return ImpliedGraph{hist.n(), hist.expand()};
    }
};

// Maximum-cardinality matching via Hopcroft-Karp, O(E sqrt(V)).
// Deterministic for a fixed input order.
Matching max_matching(const ImpliedGraph& g);

// m / n_star. Requires 0 <= m <= n_star and n_star >= 1.
double competitive_ratio(std::int64_t m, std::int64_t n_star);

// Maximum matching size among online vertices not in `consumed_online`,
// restricted to offline vertices not in `consumed_offline`.
std::int64_t postfix_optimum(const ImpliedGraph& g,
                             std::span<const std::uint32_t> consumed_online,
                             std::span<const std::uint32_t> consumed_offline);

bool matching_valid_for(const Matching& m, const ImpliedGraph& g);

}  // namespace tam
