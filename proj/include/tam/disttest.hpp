#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tam/rng.hpp"
#include "tam/types.hpp"

namespace tam {

// Sample-budget arithmetic for the distance test.
//
//   s   = max(formula, overflow floor), where
//         formula = ceil(c_scale * (r+1) * ln(2/delta) / (eps^2 * ln(r+2)))
//   cap = ceil(s * sqrt(ln(r+1))), clamped to >= s
//
// The overflow floor keeps the Poissonization failure rate delta_poi =
// 2 exp(-x^2 / (2(s+x))) at x = cap - s below delta/2, which the plain
// formula does not guarantee for small r. The remaining budget
// delta' = delta - delta_poi goes to the estimator.
struct TestBudget {
    std::size_t r_eff = 0;
    double epsilon = 0.0;
    double tau = 0.0;
    std::int64_t s = 0;
    std::int64_t cap = 0;
    double delta = 0.0;
    double delta_prime = 0.0;
    double delta_poi = 0.0;
    double c_scale = 1.0;

    static TestBudget make(std::size_t r_eff, double epsilon, double tau,
                           double delta, double c_scale);
};

// One Poisson(mean) variate. Requires mean > 0; valid for means up to 1e7.
std::int64_t poisson_sample(double mean, Rng& rng);

// Prefix of the arrival stream collected during the testing phase.
struct ArrivalBuffer {
    std::vector<VertexType> seen;
    std::uint32_t n = 0;  // total online population
};

class StreamExhausted : public std::runtime_error {
public:
    StreamExhausted() : std::runtime_error("arrival stream exhausted") {}
};

// Simulates `count` IID draws from p* = c*/n out of random-order arrivals:
// with probability i/n re-observe one of the first i buffered arrivals,
// otherwise consume the next fresh arrival. Consumes at most `count` fresh
// arrivals; throws StreamExhausted if the buffer runs out.
std::vector<VertexType> simulate_p(const ArrivalBuffer& buffer,
                                   std::size_t count, Rng& rng,
                                   std::size_t* fresh_used = nullptr);

// Plug-in estimate: reduce each sample onto the domain, form the empirical
// frequency vector and return its reduced-domain L1 distance to q.
double empirical_l1(std::span<const VertexType> samples,
                    std::span<const double> q, const ReducedDomain& domain);

enum class TestVerdict { Pass, FailEstimate, FailOverflow, FailExhausted };

struct TestResult {
    TestVerdict verdict = TestVerdict::FailExhausted;
    std::optional<double> l1_hat;
    std::int64_t samples_drawn = 0;
    std::size_t fresh_used = 0;
};

// The gate: draw s1, s2 ~ Poisson(s/2); fail outright if s1+s2 exceeds cap
// (without touching the buffer), otherwise estimate L1 from s1+s2 simulated
// IID samples and pass iff the estimate is below tau.
TestResult minimax_test(const TestBudget& budget, std::span<const double> q,
                        const ReducedDomain& domain,
                        const ArrivalBuffer& buffer, Rng& rng);

}  // namespace tam
