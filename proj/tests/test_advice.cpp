#include <doctest.h>

#include <numeric>
#include <set>

#include "oracles.hpp"
#include "tam/advice.hpp"
#include "tam/instances.hpp"

using namespace tam;

TEST_CASE("patching a perfect-matching advice is a no-op") {
    TypeHistogram h(3, {{VertexType({0}), 1},
                        {VertexType({1}), 1},
                        {VertexType({2}), 1}});
    AdviceBundle advice = AdviceBundle::from(h);
    auto [patched, record] = patch_advice(advice);
    CHECK_FALSE(record.applied);
    CHECK(record.k == 0);
    CHECK(l1_distance(patched.hist, h) == 0);
}

TEST_CASE("patch identities hold on random advice pairs") {
    Rng rng(9001);
    std::uniform_int_distribution<std::uint32_t> size(2, 20);
    for (int trial = 0; trial < 1000; ++trial) {
        std::uint32_t n = size(rng);
        TypeHistogram c_star = oracles::random_histogram(n, 4, rng);
        TypeHistogram c_hat = oracles::random_histogram(n, 4, rng);
        AdviceBundle advice = AdviceBundle::from(c_hat);
        auto [patched, record] = patch_advice(advice);
        const std::int64_t k = static_cast<std::int64_t>(n) - advice.n_hat;

        CHECK(patched.n_hat == static_cast<std::int64_t>(n));
        CHECK(l1_distance(c_hat, patched.hist) == 2 * k);
        CHECK(l1_distance(c_star, patched.hist) <=
              l1_distance(c_star, c_hat) + 2 * k);
        if (k > 0) {
            CHECK(record.applied);
            CHECK(record.k == k);
            CHECK(record.unmatched_offline.size() ==
                  static_cast<std::size_t>(k));
            CHECK(record.unmatched_online.size() ==
                  static_cast<std::size_t>(k));
            // Support grows by exactly one unless removing the unmatched
            // slots drained some type entirely.
            std::set<VertexType> drained;
            auto expanded = c_hat.expand();
            std::map<VertexType, std::int64_t> removed;
            for (std::uint32_t v : record.unmatched_online)
                ++removed[expanded[v]];
            for (const auto& [type, cnt] : removed)
                if (cnt == c_hat.count(type)) drained.insert(type);
            CHECK(patched.support_size() ==
                  advice.support_size() + 1 - drained.size());
        }
    }
}

TEST_CASE("coarsening the two-block family reaches two buckets") {
    // Union of two complete bipartite halves plus one extra cross edge per
    // online vertex: support n collapses to the two blocks.
    const std::uint32_t n = 12;
    const std::uint32_t half = n / 2;
    std::vector<std::uint32_t> block1(half), block2(half);
    std::iota(block1.begin(), block1.end(), 0);
    std::iota(block2.begin(), block2.end(), half);

    std::vector<VertexType> types;
    for (std::uint32_t i = 0; i < n; ++i) {
        std::vector<std::uint32_t> nb =
            i < half ? block1 : block2;
        nb.push_back((i + half) % n);
        types.emplace_back(std::move(nb));
    }
    AdviceBundle advice =
        AdviceBundle::from(TypeHistogram::from_types(n, types));
    CHECK(advice.support_size() == n);
    CHECK(advice.n_hat == n);

    CoarsenResult coarse = bucket_coarsen(advice, 2);
    CHECK(coarse.reached_target);
    CHECK(coarse.advice.support_size() == 2);
    CHECK(coarse.advice.hist.count(VertexType(block1)) ==
          static_cast<std::int64_t>(half));
    CHECK(coarse.advice.hist.count(VertexType(block2)) ==
          static_cast<std::int64_t>(half));
    CHECK(coarse.advice.n_hat == n);  // still a perfect matching
}

TEST_CASE("coarsening a single-type advice returns it unchanged") {
    AdviceBundle advice =
        AdviceBundle::from(TypeHistogram(4, {{VertexType({0, 1}), 4}}));
    CoarsenResult coarse = bucket_coarsen(advice, 1);
    CHECK(coarse.reached_target);
    CHECK(coarse.merges == 0);
    CHECK(l1_distance(coarse.advice.hist, advice.hist) == 0);
}

TEST_CASE("coarsening stalls gracefully on a disjoint family") {
    // Pairwise-disjoint types: no intersection merge is legal.
    TypeHistogram h(6, {{VertexType({0, 1}), 2},
                        {VertexType({2, 3}), 2},
                        {VertexType({4, 5}), 2}});
    AdviceBundle advice = AdviceBundle::from(h);
    CoarsenResult coarse = bucket_coarsen(advice, 1);
    CHECK_FALSE(coarse.reached_target);
    CHECK(coarse.advice.support_size() == 3);
    CHECK(l1_distance(coarse.advice.hist, h) == 0);
}

TEST_CASE("coarsening never raises the matching size or breaks the sum") {
    Rng rng(9002);
    std::uniform_int_distribution<std::uint32_t> size(4, 16);
    for (int trial = 0; trial < 500; ++trial) {
        std::uint32_t n = size(rng);
        AdviceBundle advice =
            AdviceBundle::from(oracles::random_histogram(n, 5, rng));
        std::uniform_int_distribution<std::size_t> target_dist(
            1, std::max<std::size_t>(advice.support_size(), 1));
        CoarsenResult coarse = bucket_coarsen(advice, target_dist(rng));
        CHECK(coarse.advice.hist.n() == n);  // sum preserved by construction
        CHECK(coarse.advice.n_hat <= advice.n_hat);
        CHECK(coarse.advice.support_size() <= advice.support_size());
    }
}

TEST_CASE("threshold coarsening lifts every count or stalls") {
    Rng rng(9003);
    for (int trial = 0; trial < 100; ++trial) {
        AdviceBundle advice =
            AdviceBundle::from(oracles::random_histogram(12, 4, rng));
        CoarsenResult coarse = bucket_coarsen_threshold(advice, 3);
        if (coarse.reached_target)
            for (const auto& [type, count] : coarse.advice.hist.entries())
                CHECK(count >= 3);
    }
}

TEST_CASE("offline remapping recovers the worked example") {
    // True counts from the 4-vertex example; advice with disjoint support
    // {u1}:1, {u3}:1, {u4}:1, {u2,u4}:1. Maximum overlap is 4.
    TypeHistogram c_star(4, {{VertexType({0, 2}), 1},
                             {VertexType({1, 2}), 1},
                             {VertexType({0, 1, 3}), 2}});
    TypeHistogram advice(4, {{VertexType({0}), 1},
                             {VertexType({2}), 1},
                             {VertexType({3}), 1},
                             {VertexType({1, 3}), 1}});
    Remapping remap = remap_offline(c_star, advice);
    CHECK(remap.overlap == 4);

    // The flow decomposition must be subset-respecting and feasible.
    std::vector<std::int64_t> used(advice.entries().size(), 0);
    for (std::size_t i = 0; i < remap.assignment.size(); ++i) {
        std::int64_t total = 0;
        for (auto [j, f] : remap.assignment[i]) {
            CHECK(advice.entries()[j].first.subset_of(
                c_star.entries()[i].first));
            used[j] += f;
            total += f;
        }
        CHECK(total <= c_star.entries()[i].second);
    }
    for (std::size_t j = 0; j < used.size(); ++j)
        CHECK(used[j] <= advice.entries()[j].second);
}

TEST_CASE("remapping advice onto itself is the identity overlap") {
    Rng rng(9004);
    for (int trial = 0; trial < 50; ++trial) {
        TypeHistogram h = oracles::random_histogram(10, 4, rng);
        Remapping remap = remap_offline(h, h);
        CHECK(remap.overlap == 10);
    }
}

TEST_CASE("offline remapping equals the exhaustive optimum on small cases") {
    Rng rng(9005);
    std::uniform_int_distribution<std::uint32_t> size(2, 6);
    int done = 0;
    while (done < 200) {
        std::uint32_t n = size(rng);
        TypeHistogram c_star =
            oracles::random_histogram_few_types(n, 4, 4, rng);
        TypeHistogram advice =
            oracles::random_histogram_few_types(n, 4, 3, rng);
        if (c_star.support_size() > 4 || advice.support_size() > 4) continue;
        Remapping remap = remap_offline(c_star, advice);
        CHECK(remap.overlap == oracles::brute_force_remap(c_star, advice));
        ++done;
    }
}

TEST_CASE("offline remapping overlap is monotone in the advice support") {
    Rng rng(9006);
    for (int trial = 0; trial < 50; ++trial) {
        const std::uint32_t n = 10;
        TypeHistogram c_star = oracles::random_histogram(n, 4, rng);
        TypeHistogram advice = oracles::random_histogram(n, 3, rng);
        std::int64_t base = remap_offline(c_star, advice).overlap;

        // Move one unit of advice mass onto a fresh singleton subset of some
        // true type: overlap cannot decrease by more than the unit moved,
        // and adding the option keeps the previous routes available.
        auto entries = advice.entries();
        // Find a true type with a nonempty neighbor set to subset from.
        const VertexType* donor = nullptr;
        for (const auto& [type, count] : c_star.entries())
            if (!type.empty()) donor = &type;
        if (!donor) continue;
        VertexType fresh({donor->neighbors()[0]});
        bool exists = false;
        for (auto& [type, count] : entries)
            if (type == fresh) exists = true;
        if (exists) continue;

        // Take one unit from the largest entry.
        std::size_t big = 0;
        for (std::size_t i = 0; i < entries.size(); ++i)
            if (entries[i].second > entries[big].second) big = i;
        if (entries[big].second == 1) continue;
        entries[big].second -= 1;
        entries.emplace_back(fresh, 1);
        TypeHistogram richer(n, std::move(entries));
        std::int64_t with_fresh = remap_offline(c_star, richer).overlap;
        CHECK(with_fresh + 1 >= base);
    }
}

TEST_CASE("online remapping follows the largest-subset rule") {
    std::vector<VertexType> labels = {VertexType({1, 3}), VertexType({3})};
    std::vector<std::int64_t> remaining = {1, 1};
    // Arrival {u1,u2,u4} (0-based {0,1,3}) prefers {u2,u4} = {1,3}.
    auto pick = remap_online(VertexType({0, 1, 3}), labels, remaining);
    REQUIRE(pick.has_value());
    CHECK(labels[*pick] == VertexType({1, 3}));

    remaining = {0, 1};  // largest subset exhausted, falls back to {3}
    pick = remap_online(VertexType({0, 1, 3}), labels, remaining);
    REQUIRE(pick.has_value());
    CHECK(labels[*pick] == VertexType({3}));

    remaining = {0, 0};
    CHECK_FALSE(remap_online(VertexType({0, 1, 3}), labels, remaining)
                    .has_value());

    // No subset available at all.
    remaining = {1, 1};
    CHECK_FALSE(remap_online(VertexType({2}), labels, remaining).has_value());
}

TEST_CASE("online remapping returns an exact type when available") {
    std::vector<VertexType> labels = {VertexType({0}), VertexType({0, 2})};
    std::vector<std::int64_t> remaining = {5, 5};
    auto pick = remap_online(VertexType({0, 2}), labels, remaining);
    REQUIRE(pick.has_value());
    CHECK(labels[*pick] == VertexType({0, 2}));
}

TEST_CASE("online remapping breaks cardinality ties by remaining count") {
    std::vector<VertexType> labels = {VertexType({0}), VertexType({1})};
    std::vector<std::int64_t> remaining = {2, 7};
    auto pick = remap_online(VertexType({0, 1}), labels, remaining);
    REQUIRE(pick.has_value());
    CHECK(labels[*pick] == VertexType({1}));

    // Full tie: lexicographically smaller label wins.
    remaining = {3, 3};
    pick = remap_online(VertexType({0, 1}), labels, remaining);
    REQUIRE(pick.has_value());
    CHECK(labels[*pick] == VertexType({0}));
}
