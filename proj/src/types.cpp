#include "tam/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace tam {

VertexType::VertexType(std::vector<std::uint32_t> neighbors)
    : neighbors_(std::move(neighbors)) {
    std::sort(neighbors_.begin(), neighbors_.end());
    neighbors_.erase(std::unique(neighbors_.begin(), neighbors_.end()),
                     neighbors_.end());
}

bool VertexType::contains(std::uint32_t u) const {
    return std::binary_search(neighbors_.begin(), neighbors_.end(), u);
}

bool VertexType::subset_of(const VertexType& other) const {
    if (neighbors_.size() > other.neighbors_.size()) return false;
    return std::includes(other.neighbors_.begin(), other.neighbors_.end(),
                         neighbors_.begin(), neighbors_.end());
}

bool VertexType::valid_for(std::uint32_t n) const {
    return neighbors_.empty() || neighbors_.back() < n;
}

VertexType VertexType::intersect(const VertexType& other) const {
    std::vector<std::uint32_t> out;
    std::set_intersection(neighbors_.begin(), neighbors_.end(),
                          other.neighbors_.begin(), other.neighbors_.end(),
                          std::back_inserter(out));
    return VertexType(std::move(out));
}

VertexType VertexType::unite(const VertexType& other) const {
    std::vector<std::uint32_t> out;
    std::set_union(neighbors_.begin(), neighbors_.end(),
                   other.neighbors_.begin(), other.neighbors_.end(),
                   std::back_inserter(out));
    return VertexType(std::move(out));
}

std::string VertexType::to_string() const {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < neighbors_.size(); ++i) {
        if (i) os << ',';
        os << neighbors_[i];
    }
    os << '}';
    return os.str();
}

TypeHistogram::TypeHistogram(
    std::uint32_t n, std::vector<std::pair<VertexType, std::int64_t>> entries)
    : n_(n), entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::int64_t total = 0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& [type, count] = entries_[i];
        if (count <= 0)
            throw std::invalid_argument("TypeHistogram: nonpositive count");
        if (!type.valid_for(n_))
            throw std::invalid_argument("TypeHistogram: neighbor index >= n");
        if (i > 0 && entries_[i - 1].first == type)
            throw std::invalid_argument("TypeHistogram: duplicate type key");
        total += count;
        index_.emplace(type, i);
    }
    if (total != static_cast<std::int64_t>(n_))
        throw std::invalid_argument("TypeHistogram: counts must sum to n");
    if (entries_.size() > n_)
        throw std::invalid_argument("TypeHistogram: more keys than vertices");
}

TypeHistogram TypeHistogram::from_types(std::uint32_t n,
                                        std::span<const VertexType> expanded) {
    std::unordered_map<VertexType, std::int64_t, VertexTypeHash> agg;
    for (const auto& t : expanded) ++agg[t];
    std::vector<std::pair<VertexType, std::int64_t>> entries(agg.begin(),
                                                             agg.end());
    return TypeHistogram(n, std::move(entries));
}

std::int64_t TypeHistogram::count(const VertexType& t) const {
    auto it = index_.find(t);
    return it == index_.end() ? 0 : entries_[it->second].second;
}

std::vector<VertexType> TypeHistogram::expand() const {
    std::vector<VertexType> out;
    out.reserve(n_);
    for (const auto& [type, count] : entries_)
        for (std::int64_t i = 0; i < count; ++i) out.push_back(type);
    return out;
}

std::int64_t l1_distance(const TypeHistogram& a, const TypeHistogram& b) {
    if (a.n() != b.n())
        throw std::invalid_argument("l1_distance: histograms with different n");
    std::int64_t total = 0;
    for (const auto& [type, count] : a.entries())
        total += std::abs(count - b.count(type));
    for (const auto& [type, count] : b.entries())
        if (a.count(type) == 0) total += count;
    return total;
}

double l1_normalized(const TypeHistogram& a, const TypeHistogram& b) {
    return static_cast<double>(l1_distance(a, b)) / static_cast<double>(a.n());
}

Matching::Matching(std::vector<std::int32_t> online_to_offline)
    : pairs_(std::move(online_to_offline)) {
    std::vector<std::int32_t> used;
    for (std::int32_t u : pairs_) {
        if (u < 0) continue;
        used.push_back(u);
        ++matched_;
    }
    std::sort(used.begin(), used.end());
    if (std::adjacent_find(used.begin(), used.end()) != used.end())
        throw std::invalid_argument("Matching: offline vertex used twice");
}

ReducedDomain ReducedDomain::from_support(const TypeHistogram& advice) {
    ReducedDomain d;
    d.labels_.reserve(advice.support_size());
    for (const auto& [type, count] : advice.entries()) {
        d.index_.emplace(type, d.labels_.size());
        d.labels_.push_back(type);
    }
    return d;
}

ReducedDomain ReducedDomain::grouped(const TypeHistogram& advice,
                                     std::size_t num_groups) {
    if (num_groups == 0)
        throw std::invalid_argument("ReducedDomain::grouped: zero groups");
    if (advice.support_size() <= num_groups) return from_support(advice);

    // Lopsided packing: the num_groups - 1 lightest types become singleton
    // groups and everything else lands in one heavy group. Under a faithful
    // advice the plug-in estimate then fluctuates like a single binomial
    // instead of num_groups of them, while corrupted advice still shows up
    // as mass missing from the heavy group plus mass stranded at t0.
    std::vector<std::size_t> order(advice.support_size());
    std::iota(order.begin(), order.end(), 0);
    const auto& entries = advice.entries();
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return entries[a].second < entries[b].second;
                     });

    ReducedDomain d;
    const std::size_t singles = num_groups - 1;
    for (std::size_t k = 0; k < singles; ++k) {
        d.index_.emplace(entries[order[k]].first, d.labels_.size());
        d.labels_.push_back(entries[order[k]].first);
    }
    const std::size_t heavy = d.labels_.size();
    // Heavy group label: the heaviest member.
    d.labels_.push_back(entries[order.back()].first);
    for (std::size_t k = singles; k < order.size(); ++k)
        d.index_.emplace(entries[order[k]].first, heavy);
    return d;
}

std::size_t ReducedDomain::reduce(const VertexType& t) const {
    auto it = index_.find(t);
    return it == index_.end() ? t0_index() : it->second;
}

std::vector<double> frequency_vector(const TypeHistogram& hist,
                                     const ReducedDomain& domain) {
    std::vector<double> q(domain.size(), 0.0);
    const double n = static_cast<double>(hist.n());
    for (const auto& [type, count] : hist.entries())
        q[domain.reduce(type)] += static_cast<double>(count) / n;
    return q;
}

double l1_reduced(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size())
        throw std::invalid_argument("l1_reduced: mismatched vector lengths");
    if (p.empty()) throw std::invalid_argument("l1_reduced: empty vectors");
    auto check_sum = [](std::span<const double> v, const char* name) {
        double s = std::accumulate(v.begin(), v.end(), 0.0);
        if (std::abs(s - 1.0) > 1e-9)
            throw std::invalid_argument(std::string("l1_reduced: ") + name +
                                        " does not sum to 1");
    };
    check_sum(p, "p");
    check_sum(q, "q");
    const std::size_t t0 = p.size() - 1;
    if (q[t0] > 1e-12)
        throw std::invalid_argument("l1_reduced: q must put no mass on t0");
    double total = 0.0;
    for (std::size_t i = 0; i < t0; ++i) total += std::abs(p[i] - q[i]);
    return total + p[t0];
}

}  // namespace tam
