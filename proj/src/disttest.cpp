#include "tam/disttest.hpp"

#include <cmath>

namespace tam {

TestBudget TestBudget::make(std::size_t r_eff, double epsilon, double tau,
                            double delta, double c_scale) {
    if (r_eff == 0) throw std::invalid_argument("TestBudget: r_eff must be >= 1");
    if (epsilon <= 0.0) throw std::invalid_argument("TestBudget: epsilon <= 0");
    if (delta <= 0.0 || delta >= 1.0)
        throw std::invalid_argument("TestBudget: delta out of (0,1)");
    if (c_scale <= 0.0) throw std::invalid_argument("TestBudget: c_scale <= 0");

    const double r = static_cast<double>(r_eff);
    const double ln_r1 = std::log(r + 1.0);
    const double ln_r2 = std::log(r + 2.0);
    const double slack = std::sqrt(ln_r1);

    const double formula =
        c_scale * (r + 1.0) * std::log(2.0 / delta) / (epsilon * epsilon * ln_r2);
    double floor = 0.0;
    if (slack > 1.0) {
        // Smallest s with 2 exp(-s (slack-1)^2 / (2 slack)) <= delta / 2.
        floor = 2.0 * slack * std::log(4.0 / delta) / ((slack - 1.0) * (slack - 1.0));
    }

    TestBudget b;
    b.r_eff = r_eff;
    b.epsilon = epsilon;
    b.tau = tau;
    b.delta = delta;
    b.c_scale = c_scale;
    b.s = static_cast<std::int64_t>(std::ceil(std::max(formula, floor)));
    if (b.s < 1) b.s = 1;
    b.cap = std::max(
        b.s, static_cast<std::int64_t>(std::ceil(static_cast<double>(b.s) * slack)));
    const double x = static_cast<double>(b.cap - b.s);
    b.delta_poi =
        x > 0.0
            ? std::min(1.0, 2.0 * std::exp(-x * x /
                                           (2.0 * (static_cast<double>(b.s) + x))))
            : 1.0;
    b.delta_prime = std::max(delta - b.delta_poi, 1e-12);
    return b;
}

std::int64_t poisson_sample(double mean, Rng& rng) {
    if (!(mean > 0.0))
        throw std::invalid_argument("poisson_sample: mean must be positive");
    std::poisson_distribution<std::int64_t> dist(mean);
    return dist(rng);
}

std::vector<VertexType> simulate_p(const ArrivalBuffer& buffer,
                                   std::size_t count, Rng& rng,
                                   std::size_t* fresh_used) {
    std::vector<VertexType> samples;
    samples.reserve(count);
    std::size_t fresh = 0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double n = static_cast<double>(buffer.n);
    while (samples.size() < count) {
        const double reobserve_prob = static_cast<double>(fresh) / n;
        if (fresh > 0 && unit(rng) < reobserve_prob) {
            std::uniform_int_distribution<std::size_t> pick(0, fresh - 1);
            samples.push_back(buffer.seen[pick(rng)]);
        } else {
            if (fresh >= buffer.seen.size()) throw StreamExhausted();
            samples.push_back(buffer.seen[fresh]);
            ++fresh;
        }
    }
    if (fresh_used) *fresh_used = fresh;
    return samples;
}

double empirical_l1(std::span<const VertexType> samples,
                    std::span<const double> q, const ReducedDomain& domain) {
    if (samples.empty())
        throw std::invalid_argument("empirical_l1: no samples");
    std::vector<double> p_hat(domain.size(), 0.0);
    const double w = 1.0 / static_cast<double>(samples.size());
    for (const auto& t : samples) p_hat[domain.reduce(t)] += w;
    return l1_reduced(p_hat, q);
}

TestResult minimax_test(const TestBudget& budget, std::span<const double> q,
                        const ReducedDomain& domain,
                        const ArrivalBuffer& buffer, Rng& rng) {
    TestResult result;
    const double half = static_cast<double>(budget.s) / 2.0;
    const std::int64_t s1 = poisson_sample(half, rng);
    const std::int64_t s2 = poisson_sample(half, rng);
    result.samples_drawn = s1 + s2;
    if (s1 + s2 > budget.cap) {
        result.verdict = TestVerdict::FailOverflow;
        return result;
    }
    if (s1 + s2 == 0) {
        // Degenerate draw: nothing observed, nothing contradicted.
        result.verdict = TestVerdict::Pass;
        result.l1_hat = 0.0;
        return result;
    }
    std::vector<VertexType> samples;
    try {
        samples = simulate_p(buffer, static_cast<std::size_t>(s1 + s2), rng,
                             &result.fresh_used);
    } catch (const StreamExhausted&) {
        result.verdict = TestVerdict::FailExhausted;
        return result;
    }
    result.l1_hat = empirical_l1(samples, q, domain);
    result.verdict = *result.l1_hat < budget.tau ? TestVerdict::Pass
                                                 : TestVerdict::FailEstimate;
    return result;
}

}  // namespace tam
