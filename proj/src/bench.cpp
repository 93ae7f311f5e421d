#include "tam/bench.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace tam {

namespace {

std::string format_double_shortest(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) throw std::runtime_error("to_chars failed");
    return std::string(buf, ptr);
}

std::string format_fixed(double x, int digits) {
    char buf[64];
    auto [ptr, ec] =
        std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, digits);
    if (ec != std::errc{}) throw std::runtime_error("to_chars failed");
    return std::string(buf, ptr);
}

double parse_double(std::string_view s, const char* what) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::invalid_argument(std::string("bad double field: ") + what);
    return value;
}

std::int64_t parse_int(std::string_view s, const char* what) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::invalid_argument(std::string("bad integer field: ") + what);
    return value;
}

std::uint64_t parse_uint(std::string_view s, const char* what) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::invalid_argument(std::string("bad integer field: ") + what);
    return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

}  // namespace

std::vector<VariantSpec> default_variants() {
    using Kind = VariantSpec::Kind;
    return {
        {"Ranking", Kind::Ranking, {}},
        {"Greedy", Kind::Greedy, {}},
        {"TaM-all", Kind::TestAndMatch, {true, true, true}},
        {"TaM-no-remap", Kind::TestAndMatch, {false, true, true}},
        {"TaM-no-bucket", Kind::TestAndMatch, {true, false, true}},
        {"TaM-no-patch", Kind::TestAndMatch, {true, true, false}},
    };
}

std::vector<VariantSpec> ablation_variants() {
    auto all = default_variants();
    std::vector<VariantSpec> out;
    for (auto& v : all)
        if (v.name != "Greedy") out.push_back(std::move(v));
    return out;
}

std::optional<VariantSpec> variant_by_name(std::string_view name) {
    for (auto& v : default_variants())
        if (v.name == name) return v;
    return std::nullopt;
}

SweepSpec SweepSpec::defaults() {
    SweepSpec spec;
    spec.seeds.resize(10);
    for (std::size_t i = 0; i < spec.seeds.size(); ++i) spec.seeds[i] = i + 1;
    for (int i = 0; i <= 10; ++i)
        spec.alphas.push_back(static_cast<double>(i) / 10.0);
    spec.kinds = {CorruptionKind::AddUnion, CorruptionKind::Replace};
    spec.variants = default_variants();
    return spec;
}

void SweepSpec::validate() const {
    if (seeds.empty()) throw std::invalid_argument("sweep: no seeds");
    if (alphas.empty()) throw std::invalid_argument("sweep: no alphas");
    if (kinds.empty()) throw std::invalid_argument("sweep: no corruption kinds");
    if (variants.empty()) throw std::invalid_argument("sweep: no variants");
    std::set<std::string> names;
    for (const auto& v : variants)
        if (!names.insert(v.name).second)
            throw std::invalid_argument("sweep: duplicate variant name " + v.name);
    for (double a : alphas)
        if (a < 0.0 || a > 1.0)
            throw std::invalid_argument("sweep: alpha out of [0,1]");
}

namespace {

struct Cell {
    CorruptionKind kind;
    double alpha;
    std::uint64_t seed;
};

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TAM_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::uint64_t hash_bytes(std::uint64_t h, std::string_view bytes) {
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

void run_cell(const SweepSpec& spec, const Cell& cell,
              std::span<ResultRow> out_rows) {
    const std::uint64_t alpha_bits = std::bit_cast<std::uint64_t>(cell.alpha);
    const TypeHistogram c_star =
        gen_hard_instance({spec.n, 0.81034, cell.seed});
    const ImpliedGraph truth = ImpliedGraph::from_histogram(c_star);
    const auto n_star =
        static_cast<std::int64_t>(max_matching(truth).size());
    const std::vector<std::uint32_t> order = random_order(truth, cell.seed);

    CorruptionSpec corruption;
    corruption.alpha = cell.alpha;
    corruption.kind = cell.kind;
    corruption.seed = derive_seed(cell.seed, "cell-corruption",
                                  static_cast<std::uint64_t>(cell.kind),
                                  alpha_bits);
    const AdviceBundle advice =
        AdviceBundle::from(corrupt_advice(c_star, corruption));

    std::uint64_t cell_hash = 0;
    if (spec.verbose) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        h = hash_bytes(h, histogram_to_text(c_star));
        h = hash_bytes(h, histogram_to_text(advice.hist));
        h = hash_bytes(h, std::string_view(
                              reinterpret_cast<const char*>(order.data()),
                              order.size() * sizeof(order[0])));
        cell_hash = mix64(h);
    }

    for (std::size_t vi = 0; vi < spec.variants.size(); ++vi) {
        const VariantSpec& variant = spec.variants[vi];
        ResultRow& row = out_rows[vi];
        row.variant = variant.name;
        row.kind = cell.kind;
        row.alpha = cell.alpha;
        row.seed = cell.seed;
        row.n_star = n_star;
        row.instance_hash = cell_hash;
        // Algorithm stream depends only on the seed: advice-free variants
        // then produce identical rows across the (kind, alpha) grid, and
        // paired comparisons stay paired.
        Rng rng = make_rng(cell.seed, "cell-algorithm");
        try {
            const auto t0 = std::chrono::steady_clock::now();
            switch (variant.kind) {
                case VariantSpec::Kind::Ranking: {
                    Matching m = ranking_matching(truth, order, rng);
                    row.m = static_cast<std::int64_t>(m.size());
                    row.verdict = GateOutcome::NotTested;
                    break;
                }
                case VariantSpec::Kind::Greedy: {
                    Matching m = greedy_matching(truth, order);
                    row.m = static_cast<std::int64_t>(m.size());
                    row.verdict = GateOutcome::NotTested;
                    break;
                }
                case VariantSpec::Kind::TestAndMatch: {
                    RunOutcome outcome =
                        test_and_match(truth, order, advice, variant.flags,
                                       spec.budget, rng, n_star);
                    row.m = outcome.matches;
                    row.verdict = outcome.verdict;
                    row.l1_hat = outcome.l1_hat;
                    row.k_consumed = outcome.k_consumed;
                    break;
                }
            }
            row.ratio = competitive_ratio(row.m, n_star);
            row.wall_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        } catch (const std::exception&) {
            row.m = 0;
            row.ratio = 0.0;
            row.verdict = GateOutcome::Error;
            row.l1_hat.reset();
            row.k_consumed = 0;
            row.wall_ms = 0.0;
        }
    }
}

}  // namespace

std::vector<ResultRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    std::vector<Cell> cells;
    for (CorruptionKind kind : spec.kinds)
        for (double alpha : spec.alphas)
            for (std::uint64_t seed : spec.seeds)
                cells.push_back({kind, alpha, seed});

    std::vector<ResultRow> rows(cells.size() * spec.variants.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) break;
            run_cell(spec, cells[i],
                     std::span<ResultRow>(rows).subspan(
                         i * spec.variants.size(), spec.variants.size()));
        }
    };

    const int workers =
        std::min<int>(resolve_workers(spec.workers),
                      static_cast<int>(cells.size()));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (spec.zero_timing)
        for (auto& row : rows) row.wall_ms = 0.0;
    return rows;
}

std::string rows_to_csv(std::span<const ResultRow> rows, bool verbose) {
    std::ostringstream os;
    os << (verbose ? kCsvHeaderVerbose : kCsvHeader) << '\n';
    for (const auto& row : rows) {
        os << row.variant << ',' << corruption_name(row.kind) << ','
           << format_double_shortest(row.alpha) << ',' << row.seed << ','
           << row.m << ',' << row.n_star << ',' << format_fixed(row.ratio, 6)
           << ',' << gate_outcome_name(row.verdict) << ','
           << (row.l1_hat ? format_double_shortest(*row.l1_hat) : "nan") << ','
           << row.k_consumed << ',' << format_fixed(row.wall_ms, 3);
        if (verbose) os << ',' << row.instance_hash;
        os << '\n';
    }
    return os.str();
}

std::vector<ResultRow> rows_from_csv(std::string_view csv) {
    std::vector<ResultRow> rows;
    std::size_t pos = 0;
    bool saw_header = false;
    bool verbose = false;
    while (pos < csv.size()) {
        std::size_t end = csv.find('\n', pos);
        if (end == std::string_view::npos) end = csv.size();
        std::string_view line = csv.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty()) continue;
        if (!saw_header) {
            if (line == kCsvHeader)
                verbose = false;
            else if (line == kCsvHeaderVerbose)
                verbose = true;
            else
                throw std::invalid_argument("rows_from_csv: unexpected header");
            saw_header = true;
            continue;
        }
        auto fields = split(line, ',');
        if (fields.size() != (verbose ? 12u : 11u))
            throw std::invalid_argument("rows_from_csv: wrong field count");
        ResultRow row;
        row.variant = std::string(fields[0]);
        auto kind = corruption_from_name(fields[1]);
        if (!kind) throw std::invalid_argument("rows_from_csv: bad kind");
        row.kind = *kind;
        row.alpha = parse_double(fields[2], "alpha");
        row.seed = static_cast<std::uint64_t>(parse_int(fields[3], "seed"));
        row.m = parse_int(fields[4], "m");
        row.n_star = parse_int(fields[5], "n_star");
        row.ratio = parse_double(fields[6], "ratio");
        auto verdict = gate_outcome_from_name(fields[7]);
        if (!verdict) throw std::invalid_argument("rows_from_csv: bad verdict");
        row.verdict = *verdict;
        double l1 = parse_double(fields[8], "l1_hat");
        if (!std::isnan(l1)) row.l1_hat = l1;
        row.k_consumed = parse_int(fields[9], "k_consumed");
        row.wall_ms = parse_double(fields[10], "wall_time_ms");
        if (verbose) row.instance_hash = parse_uint(fields[11], "instance_hash");
        rows.push_back(std::move(row));
    }
    if (!saw_header)
        throw std::invalid_argument("rows_from_csv: empty input");
    return rows;
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

struct SeriesPoint {
    double alpha;
    double mean;
    double stddev;
    std::size_t count;
};

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b",
                                    "#17becf", "#e377c2"};

}  // namespace

std::string plot_svg(std::span<const ResultRow> rows, CorruptionKind kind,
                     std::span<const std::string> expected_variants) {
    // Aggregate mean / sample stddev per (variant, alpha) across seeds.
    std::map<std::string, std::map<double, std::vector<double>>> grouped;
    for (const auto& row : rows) {
        if (row.kind != kind) continue;
        grouped[row.variant][row.alpha].push_back(row.ratio);
    }
    if (grouped.empty())
        throw std::invalid_argument("plot_svg: no rows for requested kind");

    std::vector<std::string> variants;
    std::vector<std::string> missing;
    for (const auto& name : expected_variants) {
        if (grouped.count(name))
            variants.push_back(name);
        else
            missing.push_back(name);
    }
    // Variants present in the data but not expected still get plotted.
    for (const auto& [name, _] : grouped)
        if (std::find(variants.begin(), variants.end(), name) == variants.end())
            variants.push_back(name);

    std::map<std::string, std::vector<SeriesPoint>> series;
    for (const auto& name : variants) {
        for (const auto& [alpha, ratios] : grouped[name]) {
            double mean = 0.0;
            for (double r : ratios) mean += r;
            mean /= static_cast<double>(ratios.size());
            double var = 0.0;
            if (ratios.size() > 1) {
                for (double r : ratios) var += (r - mean) * (r - mean);
                var /= static_cast<double>(ratios.size() - 1);
            }
            series[name].push_back(
                {alpha, mean, std::sqrt(var), ratios.size()});
        }
    }

    const double width = 860.0, height = 520.0;
    const double left = 70.0, right = width - 200.0;
    const double top = 40.0, bottom = height - 60.0;
    const double y_min = 0.4, y_max = 1.02;
    auto sx = [&](double alpha) {
        return left + alpha * (right - left);
    };
    auto sy = [&](double ratio) {
        double clamped = std::clamp(ratio, y_min, y_max);
        return bottom - (clamped - y_min) / (y_max - y_min) * (bottom - top);
    };
    auto fx = [](double v) { return format_fixed(v, 2); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
       << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
       << height << "\">\n";
    os << "<title>competitive ratio vs alpha, kind="
       << corruption_name(kind);
    for (const auto& name : missing)
        os << " [WARNING: no data for variant " << name << ']';
    os << "</title>\n";

    os << "<!-- series data: variant,kind,alpha,mean,stddev,count\n";
    for (const auto& name : variants)
        for (const auto& pt : series[name])
            os << name << ',' << corruption_name(kind) << ','
               << format_double_shortest(pt.alpha) << ','
               << format_double_shortest(pt.mean) << ','
               << format_double_shortest(pt.stddev) << ',' << pt.count << '\n';
    os << "-->\n";

    os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
       << "\" fill=\"white\"/>\n";
    // Axes.
    os << "<line x1=\"" << fx(left) << "\" y1=\"" << fx(bottom) << "\" x2=\""
       << fx(right) << "\" y2=\"" << fx(bottom)
       << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    os << "<line x1=\"" << fx(left) << "\" y1=\"" << fx(top) << "\" x2=\""
       << fx(left) << "\" y2=\"" << fx(bottom)
       << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (int i = 0; i <= 10; ++i) {
        double a = static_cast<double>(i) / 10.0;
        os << "<line x1=\"" << fx(sx(a)) << "\" y1=\"" << fx(bottom)
           << "\" x2=\"" << fx(sx(a)) << "\" y2=\"" << fx(bottom + 5)
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fx(sx(a)) << "\" y=\"" << fx(bottom + 20)
           << "\" font-size=\"12\" text-anchor=\"middle\">"
           << format_fixed(a, 1) << "</text>\n";
    }
    for (double r = 0.4; r <= 1.001; r += 0.1) {
        os << "<line x1=\"" << fx(left - 5) << "\" y1=\"" << fx(sy(r))
           << "\" x2=\"" << fx(left) << "\" y2=\"" << fx(sy(r))
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fx(left - 10) << "\" y=\"" << fx(sy(r) + 4)
           << "\" font-size=\"12\" text-anchor=\"end\">" << format_fixed(r, 1)
           << "</text>\n";
    }
    os << "<text x=\"" << fx((left + right) / 2) << "\" y=\""
       << fx(height - 15)
       << "\" font-size=\"14\" text-anchor=\"middle\">alpha</text>\n";
    os << "<text x=\"18\" y=\"" << fx((top + bottom) / 2)
       << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 "
          "18 "
       << fx((top + bottom) / 2) << ")\">competitive ratio</text>\n";
    os << "<text x=\"" << fx((left + right) / 2) << "\" y=\"22\" "
          "font-size=\"15\" text-anchor=\"middle\">corruption kind: "
       << corruption_name(kind) << "</text>\n";

    for (std::size_t si = 0; si < variants.size(); ++si) {
        const auto& name = variants[si];
        const char* color = kPalette[si % std::size(kPalette)];
        const auto& pts = series[name];
        os << "<polyline fill=\"none\" stroke=\"" << color
           << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& pt : pts)
            os << fx(sx(pt.alpha)) << ',' << fx(sy(pt.mean)) << ' ';
        os << "\"/>\n";
        for (const auto& pt : pts) {
            double lo = sy(pt.mean - pt.stddev), hi = sy(pt.mean + pt.stddev);
            os << "<line x1=\"" << fx(sx(pt.alpha)) << "\" y1=\"" << fx(lo)
               << "\" x2=\"" << fx(sx(pt.alpha)) << "\" y2=\"" << fx(hi)
               << "\" stroke=\"" << color << "\" stroke-width=\"1\"/>\n";
            os << "<line x1=\"" << fx(sx(pt.alpha) - 3) << "\" y1=\"" << fx(lo)
               << "\" x2=\"" << fx(sx(pt.alpha) + 3) << "\" y2=\"" << fx(lo)
               << "\" stroke=\"" << color << "\"/>\n";
            os << "<line x1=\"" << fx(sx(pt.alpha) - 3) << "\" y1=\"" << fx(hi)
               << "\" x2=\"" << fx(sx(pt.alpha) + 3) << "\" y2=\"" << fx(hi)
               << "\" stroke=\"" << color << "\"/>\n";
            os << "<circle cx=\"" << fx(sx(pt.alpha)) << "\" cy=\""
               << fx(sy(pt.mean)) << "\" r=\"2.5\" fill=\"" << color
               << "\"/>\n";
        }
        double ly = top + 10 + static_cast<double>(si) * 20.0;
        os << "<line x1=\"" << fx(right + 15) << "\" y1=\"" << fx(ly)
           << "\" x2=\"" << fx(right + 45) << "\" y2=\"" << fx(ly)
           << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << fx(right + 52) << "\" y=\"" << fx(ly + 4)
           << "\" font-size=\"12\">" << name << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace tam
