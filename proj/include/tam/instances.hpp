#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tam/matching.hpp"
#include "tam/rng.hpp"
#include "tam/types.hpp"

namespace tam {

// Hard known-IID benchmark family: m random size-2 types, m random size-3
// types and n-2m copies of the full type, with m = round(c25/2 * n).
struct HardInstanceParams {
    std::uint32_t n = 2000;
    double c25 = 0.81034;
    std::uint64_t seed = 0;
};

TypeHistogram gen_hard_instance(const HardInstanceParams& params);

// Two-graph hardness gadget. Both graphs present identical types for the
// first n/2 canonical arrivals and differ only afterwards.
//   graph 1: v_j ~ {u_j, u_{j+n/2}} for j < n/2,  v_j ~ {u_{j-n/2}} for j >= n/2
//   graph 2: v_j ~ {u_j, u_{j+n/2}} for j < n/2,  v_j ~ {u_j}       for j >= n/2
// (0-based). The canonical arrival order is v_0, v_1, ..., v_{n-1}.
ImpliedGraph gen_gadget(std::uint32_t n, int which);

enum class CorruptionKind { AddUnion, Replace };

std::string_view corruption_name(CorruptionKind kind);
std::optional<CorruptionKind> corruption_from_name(std::string_view name);

struct CorruptionSpec {
    double alpha = 0.0;
    CorruptionKind kind = CorruptionKind::Replace;
    std::uint64_t seed = 0;
    // Per-vertex inclusion probability of random replacement types;
    // defaults to ln(n) / (10 n).
    std::optional<double> edge_prob;
};

// Picks round(alpha * n) expanded online vertices without replacement and
// rewrites each selected type: AddUnion takes the union with a fresh random
// type, Replace substitutes the random type outright.
TypeHistogram corrupt_advice(const TypeHistogram& c_star,
                             const CorruptionSpec& spec);

// Uniform arrival permutation (Fisher-Yates).
std::vector<std::uint32_t> random_order(std::uint32_t n, Rng& rng);
std::vector<std::uint32_t> random_order(const ImpliedGraph& g,
                                        std::uint64_t seed);

// Line-oriented text format: "n=<int>" header, then "count<TAB>i1,i2,..."
// per distinct type in sorted order. Round-trips bit-exactly.
std::string histogram_to_text(const TypeHistogram& hist);
TypeHistogram histogram_from_text(std::string_view text);

void save_histogram(const std::string& path, const TypeHistogram& hist);
TypeHistogram load_histogram(const std::string& path);

}  // namespace tam
