#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace tam {

// Neighborhood of an online vertex: a sorted set of offline-vertex indices.
// Canonical (sorted, deduplicated) so it can serve as a histogram key.
class VertexType {
public:
    VertexType() = default;
    explicit VertexType(std::vector<std::uint32_t> neighbors);
    VertexType(std::initializer_list<std::uint32_t> neighbors)
        : VertexType(std::vector<std::uint32_t>(neighbors)) {}

    const std::vector<std::uint32_t>& neighbors() const { return neighbors_; }
    std::size_t size() const { return neighbors_.size(); }
    bool empty() const { return neighbors_.empty(); }

    bool contains(std::uint32_t u) const;
    bool subset_of(const VertexType& other) const;
    bool valid_for(std::uint32_t n) const;

    VertexType intersect(const VertexType& other) const;
    VertexType unite(const VertexType& other) const;

    bool operator==(const VertexType& other) const = default;
    std::strong_ordering operator<=>(const VertexType& other) const {
        return neighbors_ <=> other.neighbors_;
    }

    std::string to_string() const;

private:
    std::vector<std::uint32_t> neighbors_;
};

struct VertexTypeHash {
    std::size_t operator()(const VertexType& t) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (std::uint32_t u : t.neighbors()) {
            h ^= u + 0x9e3779b9ULL + (h << 6) + (h >> 2);
            h *= 0x100000001b3ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

// Sparse histogram of type counts. Counts are strictly positive and sum to n.
// Immutable after construction; entries are kept sorted by type for
// deterministic iteration, with a hash index for O(1) count lookups.
class TypeHistogram {
public:
    TypeHistogram(std::uint32_t n,
                  std::vector<std::pair<VertexType, std::int64_t>> entries);

    // Aggregates an expanded list of per-vertex types (the list length is n).
    static TypeHistogram from_types(std::uint32_t n,
                                    std::span<const VertexType> expanded);

    std::uint32_t n() const { return n_; }
    std::int64_t count(const VertexType& t) const;
    std::size_t support_size() const { return entries_.size(); }
    const std::vector<std::pair<VertexType, std::int64_t>>& entries() const {
        return entries_;
    }

    // One VertexType per online vertex, in sorted-type-then-multiplicity
    // order. This fixed order is what makes derived matchings reproducible.
    std::vector<VertexType> expand() const;

private:
    std::uint32_t n_ = 0;
    std::vector<std::pair<VertexType, std::int64_t>> entries_;
    std::unordered_map<VertexType, std::size_t, VertexTypeHash> index_;
};

// L1 distance on the count scale: sum of |a(t) - b(t)| over the union of
// supports. Requires a.n == b.n. Always an integer.
std::int64_t l1_distance(const TypeHistogram& a, const TypeHistogram& b);

// L1 distance between the normalized distributions a/n and b/n, i.e.
// l1_distance / n. Kept as a separate call so count-scale and
// distribution-scale values cannot be mixed up.
double l1_normalized(const TypeHistogram& a, const TypeHistogram& b);

// An injective partial assignment online -> offline. -1 means unmatched.
class Matching {
public:
    explicit Matching(std::vector<std::int32_t> online_to_offline);

    std::int32_t offline_for(std::size_t online) const {
        return pairs_[online];
    }
    std::size_t num_online() const { return pairs_.size(); }
    std::size_t size() const { return matched_; }
    const std::vector<std::int32_t>& pairs() const { return pairs_; }

private:
    std::vector<std::int32_t> pairs_;
    std::size_t matched_ = 0;
};

// Testing domain: the advice support (or a grouping of it) plus an implicit
// dummy label that absorbs every type outside the support. The index may
// contain alias entries so that several concrete types reduce onto one label.
class ReducedDomain {
public:
    // Plain domain: one label per support type of `advice`.
    static ReducedDomain from_support(const TypeHistogram& advice);

    // Grouped domain used to shrink the testing budget: the support types of
    // `advice` are packed into at most `num_groups` groups (heaviest counts
    // first onto the currently lightest group). Each member type reduces onto
    // its group's label.
    static ReducedDomain grouped(const TypeHistogram& advice,
                                 std::size_t num_groups);

    std::size_t num_real_labels() const { return labels_.size(); }
    std::size_t size() const { return labels_.size() + 1; }   // includes t0
    std::size_t t0_index() const { return labels_.size(); }

    // Label position for t, or t0_index() if t reduces to the dummy label.
    std::size_t reduce(const VertexType& t) const;

    const VertexType& label(std::size_t i) const { return labels_[i]; }

private:
    std::vector<VertexType> labels_;
    std::unordered_map<VertexType, std::size_t, VertexTypeHash> index_;
};

// Frequency vector of `hist` over `domain` (size domain.size(), sums to 1).
// Mass of support types outside the domain accumulates at t0.
std::vector<double> frequency_vector(const TypeHistogram& hist,
                                     const ReducedDomain& domain);

// Reduced-domain L1: sum_{real labels} |p(t) - q(t)| + p(t0). Preconditions:
// equal lengths, both sum to 1 within 1e-9, q puts no mass on t0.
double l1_reduced(std::span<const double> p, std::span<const double> q);

}  // namespace tam
