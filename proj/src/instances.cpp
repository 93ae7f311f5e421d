#include "tam/instances.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace tam {

namespace {

// k distinct uniform indices from [0, n), sorted.
std::vector<std::uint32_t> sample_subset(std::uint32_t n, std::uint32_t k,
                                         Rng& rng) {
    std::vector<std::uint32_t> out;
    out.reserve(k);
    std::uniform_int_distribution<std::uint32_t> dist(0, n - 1);
    while (out.size() < k) {
        std::uint32_t u = dist(rng);
        if (std::find(out.begin(), out.end(), u) == out.end()) out.push_back(u);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Random type with each offline vertex included independently with
// probability p, using geometric gap skipping.
VertexType random_sparse_type(std::uint32_t n, double p, Rng& rng) {
    std::vector<std::uint32_t> members;
    if (p <= 0.0) return VertexType(std::move(members));
    std::geometric_distribution<std::int64_t> gap(p);
    std::int64_t pos = -1;
    while (true) {
        pos += 1 + gap(rng);
        if (pos >= static_cast<std::int64_t>(n)) break;
        members.push_back(static_cast<std::uint32_t>(pos));
    }
    return VertexType(std::move(members));
}

}  // namespace

TypeHistogram gen_hard_instance(const HardInstanceParams& params) {
    const std::uint32_t n = params.n;
    if (n < 4 || n % 2 != 0)
        throw std::invalid_argument("gen_hard_instance: n must be even, >= 4");
    const auto m = static_cast<std::uint32_t>(
        std::llround(params.c25 / 2.0 * static_cast<double>(n)));
    if (2 * m >= n)
        throw std::invalid_argument(
            "gen_hard_instance: n too small, full-type block would be empty");

    Rng rng = make_rng(params.seed, "hard-instance");
    std::vector<VertexType> types;
    types.reserve(n);
    for (std::uint32_t i = 0; i < m; ++i)
        types.emplace_back(sample_subset(n, 2, rng));
    for (std::uint32_t i = 0; i < m; ++i)
        types.emplace_back(sample_subset(n, 3, rng));
    std::vector<std::uint32_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    VertexType full(std::move(all));
    for (std::uint32_t i = 0; i < n - 2 * m; ++i) types.push_back(full);
    return TypeHistogram::from_types(n, types);
}

ImpliedGraph gen_gadget(std::uint32_t n, int which) {
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("gen_gadget: n must be even, >= 2");
    if (which != 1 && which != 2)
        throw std::invalid_argument("gen_gadget: which must be 1 or 2");
    const std::uint32_t half = n / 2;
    std::vector<VertexType> types;
    types.reserve(n);
    for (std::uint32_t j = 0; j < half; ++j)
        types.push_back(VertexType({j, j + half}));
    for (std::uint32_t j = half; j < n; ++j) {
        std::uint32_t u = which == 1 ? j - half : j;
        types.push_back(VertexType({u}));
    }
    return ImpliedGraph{n, std::move(types)};
}

std::string_view corruption_name(CorruptionKind kind) {
    return kind == CorruptionKind::AddUnion ? "AddUnion" : "Replace";
}

std::optional<CorruptionKind> corruption_from_name(std::string_view name) {
    if (name == "AddUnion") return CorruptionKind::AddUnion;
    if (name == "Replace") return CorruptionKind::Replace;
    return std::nullopt;
}

TypeHistogram corrupt_advice(const TypeHistogram& c_star,
                             const CorruptionSpec& spec) {
    if (spec.alpha < 0.0 || spec.alpha > 1.0)
        throw std::invalid_argument("corrupt_advice: alpha must be in [0,1]");
    const std::uint32_t n = c_star.n();
    const auto num_corrupt = static_cast<std::uint32_t>(
        std::llround(spec.alpha * static_cast<double>(n)));
    if (num_corrupt == 0) return c_star;

    const double p = spec.edge_prob.value_or(
        std::log(static_cast<double>(n)) / (10.0 * static_cast<double>(n)));
    if (p <= 0.0 || p >= 1.0)
        throw std::invalid_argument("corrupt_advice: edge_prob out of (0,1)");

    Rng rng = make_rng(spec.seed, "corruption");
    std::vector<VertexType> expanded = c_star.expand();

    // Partial Fisher-Yates to pick targets without replacement.
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::uint32_t i = 0; i < num_corrupt; ++i) {
        std::uniform_int_distribution<std::uint32_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }

    for (std::uint32_t i = 0; i < num_corrupt; ++i) {
        VertexType random_type = random_sparse_type(n, p, rng);
        VertexType& target = expanded[idx[i]];
        target = spec.kind == CorruptionKind::AddUnion
                     ? target.unite(random_type)
                     : std::move(random_type);
    }
    return TypeHistogram::from_types(n, expanded);
}

std::vector<std::uint32_t> random_order(std::uint32_t n, Rng& rng) {
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::uint32_t i = n; i > 1; --i) {
        std::uniform_int_distribution<std::uint32_t> pick(0, i - 1);
        std::swap(order[i - 1], order[pick(rng)]);
    }
    return order;
}

std::vector<std::uint32_t> random_order(const ImpliedGraph& g,
                                        std::uint64_t seed) {
    Rng rng = make_rng(seed, "arrival-order");
    return random_order(static_cast<std::uint32_t>(g.online_types.size()), rng);
}

std::string histogram_to_text(const TypeHistogram& hist) {
    std::ostringstream os;
    os << "n=" << hist.n() << '\n';
    for (const auto& [type, count] : hist.entries()) {
        os << count << '\t';
        const auto& nb = type.neighbors();
        for (std::size_t i = 0; i < nb.size(); ++i) {
            if (i) os << ',';
            os << nb[i];
        }
        os << '\n';
    }
    return os.str();
}

TypeHistogram histogram_from_text(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string line;
    if (!std::getline(is, line) || line.rfind("n=", 0) != 0)
        throw std::invalid_argument("histogram_from_text: missing n= header");
    std::uint32_t n = 0;
    try {
        n = static_cast<std::uint32_t>(std::stoul(line.substr(2)));
    } catch (const std::exception&) {
        throw std::invalid_argument("histogram_from_text: bad n= header");
    }

    std::vector<std::pair<VertexType, std::int64_t>> entries;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::invalid_argument("histogram_from_text: missing tab");
        std::int64_t count = 0;
        try {
            count = std::stoll(line.substr(0, tab));
        } catch (const std::exception&) {
            throw std::invalid_argument("histogram_from_text: bad count");
        }
        std::vector<std::uint32_t> members;
        std::string rest = line.substr(tab + 1);
        if (!rest.empty()) {
            std::istringstream ms(rest);
            std::string token;
            while (std::getline(ms, token, ',')) {
                try {
                    members.push_back(
                        static_cast<std::uint32_t>(std::stoul(token)));
                } catch (const std::exception&) {
                    throw std::invalid_argument(
                        "histogram_from_text: bad neighbor index");
                }
            }
        }
        entries.emplace_back(VertexType(std::move(members)), count);
    }
    return TypeHistogram(n, std::move(entries));
}

void save_histogram(const std::string& path, const TypeHistogram& hist) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << histogram_to_text(hist);
    if (!out) throw std::runtime_error("write failed: " + path);
}

TypeHistogram load_histogram(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return histogram_from_text(buf.str());
}

}  // namespace tam
