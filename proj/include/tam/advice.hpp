#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tam/matching.hpp"
#include "tam/types.hpp"

namespace tam {

// Advice histogram together with a fixed maximum matching of its implied
// graph. n_hat is that matching's size.
struct AdviceBundle {
    TypeHistogram hist;
    Matching m_hat;
    std::int64_t n_hat = 0;

    static AdviceBundle from(TypeHistogram hist);
    std::size_t support_size() const { return hist.support_size(); }
};

// Record of the perfect-matching patch. The dummy label's neighbor set is
// the unmatched offline set A_U; its count is k = n - n_hat.
struct PatchRecord {
    bool applied = false;
    std::int64_t k = 0;
    VertexType new_label;
    std::vector<std::uint32_t> unmatched_offline;  // A_U
    std::vector<std::uint32_t> unmatched_online;   // A_V (expanded positions)
};

// Augments advice so its implied graph has a perfect matching: removes the
// counts of the k online slots left unmatched by m_hat and adds a count-k
// dummy type adjacent to exactly the k unmatched offline vertices.
// Guarantees n_hat' = n, L1(c_hat, c_hat') = 2k and
// L1(c_star, c_hat') <= L1(c_star, c_hat) + 2k.
std::pair<AdviceBundle, PatchRecord> patch_advice(const AdviceBundle& advice);

struct CoarsenResult {
    AdviceBundle advice;
    bool reached_target = false;
    std::size_t merges = 0;
};

// Greedy support coarsening with intersection labels: repeatedly merges the
// lowest-count bucket into the partner losing the fewest offline vertices,
// skipping merges whose intersection would be empty. Stops at target_r or
// when no legal merge remains (reached_target = false, advice returned as
// far as it got).
CoarsenResult bucket_coarsen(const AdviceBundle& advice, std::size_t target_r);

// Variant that merges until every bucket count is >= min_count (or no legal
// merge remains).
CoarsenResult bucket_coarsen_threshold(const AdviceBundle& advice,
                                       std::int64_t min_count);

// Offline-optimal remapping of true types onto advice types via max flow:
// source -> L*_i (capacity c*_i), L*_i -> L^_j iff L^_j is a subset of L*_i
// (capacity c*_i), L^_j -> sink (capacity c^_j). The flow value is the
// maximum attainable overlap.
struct Remapping {
    std::int64_t overlap = 0;
    // Parallel to c_star.entries(): for each true type, (advice-entry index,
    // remapped count) pairs.
    std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> assignment;
};

Remapping remap_offline(const TypeHistogram& c_star,
                        const TypeHistogram& advice);

// Online remapping heuristic: among advice labels that are subsets of the
// arrival type and still have remaining count, picks one of maximum
// cardinality; ties broken by higher remaining count, then lexicographically
// smaller label. Labels must be sorted ascending. Returns the label index.
std::optional<std::size_t> remap_online(
    const VertexType& arrival, std::span<const VertexType> labels,
    std::span<const std::int64_t> remaining);

}  // namespace tam
