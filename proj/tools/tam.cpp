#include <bit>
#include <map>
#include <sstream>
#include <cmath>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tam/bench.hpp"

namespace {

using namespace tam;

struct RunConfig {
    std::uint32_t n = 2000;
    std::uint64_t seed = 1;
    double alpha = 0.0;
    std::string kind = "Replace";
    std::string variant = "TaM-all";
    std::string instance_path;
    std::string advice_path;
    BudgetParams budget;
};

CorruptionKind parse_kind(const std::string& name) {
    auto kind = corruption_from_name(name);
    if (!kind)
        throw CLI::ValidationError("kind", "must be AddUnion or Replace");
    return *kind;
}

// Sweep configuration with a flat key=value file format. Values given on the
// command line take precedence over the file; unknown keys are rejected.
struct SweepCli {
    std::string out = "results.csv";
    std::uint32_t n = 2000;
    std::size_t num_seeds = 10;
    std::uint64_t seed_base = 1;
    std::vector<double> alphas = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                  0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<std::string> kinds = {"AddUnion", "Replace"};
    std::vector<std::string> variants;  // empty: all defaults
    int workers = 0;
    bool zero_timing = false;
    bool verbose = false;
    double beta = BudgetParams{}.beta;
    double delta = BudgetParams{}.delta;
    double c_scale = BudgetParams{}.c_scale;
    double gamma = BudgetParams{}.gamma;
    double kappa = BudgetParams{}.kappa;

    std::map<std::string, CLI::Option*> opts;

    bool given_on_cli(const std::string& key) const {
        auto it = opts.find(key);
        return it != opts.end() && it->second->count() > 0;
    }

    void apply_config(const std::string& path) {
        std::istringstream in(read_text_file(path));
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
            while (!line.empty() && is_space(line.back())) line.pop_back();
            std::size_t start = 0;
            while (start < line.size() && is_space(line[start])) ++start;
            line.erase(0, start);
            if (line.empty()) continue;
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw CLI::ValidationError(
                    "config", path + ":" + std::to_string(lineno) +
                                  ": expected key=value");
            std::string key = line.substr(0, eq);
            std::string value = line.substr(eq + 1);
            while (!key.empty() && is_space(key.back())) key.pop_back();
            std::size_t vs = 0;
            while (vs < value.size() && is_space(value[vs])) ++vs;
            value.erase(0, vs);
            if (given_on_cli(key)) continue;  // command line wins
            if (!set_key(key, value))
                throw CLI::ValidationError(
                    "config", path + ":" + std::to_string(lineno) +
                                  ": unknown key '" + key + "'");
        }
    }

    std::string render_config() const {
        std::ostringstream os;
        os << "out=" << out << "\n";
        os << "n=" << n << "\n";
        os << "num-seeds=" << num_seeds << "\n";
        os << "seed-base=" << seed_base << "\n";
        os << "alphas=" << join_doubles(alphas) << "\n";
        os << "kinds=" << join_strings(kinds) << "\n";
        std::vector<std::string> effective = variants;
        if (effective.empty())
            for (const auto& v : default_variants()) effective.push_back(v.name);
        os << "variants=" << join_strings(effective) << "\n";
        os << "workers=" << workers << "\n";
        os << "zero-timing=" << (zero_timing ? "true" : "false") << "\n";
        os << "verbose=" << (verbose ? "true" : "false") << "\n";
        os << "beta=" << beta << "\n";
        os << "delta=" << delta << "\n";
        os << "c-scale=" << c_scale << "\n";
        os << "gamma=" << gamma << "\n";
        os << "kappa=" << kappa << "\n";
        return os.str();
    }

    SweepSpec to_spec() const {
        SweepSpec spec;
        spec.n = n;
        for (std::size_t i = 0; i < num_seeds; ++i)
            spec.seeds.push_back(seed_base + i);
        spec.alphas = alphas;
        for (const auto& name : kinds) spec.kinds.push_back(parse_kind(name));
        if (variants.empty()) {
            spec.variants = default_variants();
        } else {
            for (const auto& name : variants) {
                auto v = variant_by_name(name);
                if (!v)
                    throw CLI::ValidationError("variants",
                                               "unknown variant " + name);
                spec.variants.push_back(*v);
            }
        }
        spec.workers = workers;
        spec.zero_timing = zero_timing;
        spec.verbose = verbose;
        spec.budget.beta = beta;
        spec.budget.delta = delta;
        spec.budget.c_scale = c_scale;
        spec.budget.gamma = gamma;
        spec.budget.kappa = kappa;
        return spec;
    }

private:
    static std::string join_doubles(const std::vector<double>& xs) {
        std::ostringstream os;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) os << ' ';
            os << xs[i];
        }
        return os.str();
    }
    static std::string join_strings(const std::vector<std::string>& xs) {
        std::ostringstream os;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) os << ' ';
            os << xs[i];
        }
        return os.str();
    }
    static std::vector<std::string> split_list(const std::string& value) {
        std::vector<std::string> out;
        std::string token;
        std::istringstream is(value);
        while (is >> token) {
            if (!token.empty() && token.back() == ',') token.pop_back();
            if (!token.empty()) out.push_back(token);
        }
        return out;
    }

    bool set_key(const std::string& key, const std::string& value) {
        try {
            if (key == "out") out = value;
            else if (key == "n") n = static_cast<std::uint32_t>(std::stoul(value));
            else if (key == "num-seeds") num_seeds = std::stoul(value);
            else if (key == "seed-base") seed_base = std::stoull(value);
            else if (key == "alphas") {
                alphas.clear();
                for (const auto& t : split_list(value))
                    alphas.push_back(std::stod(t));
            } else if (key == "kinds") kinds = split_list(value);
            else if (key == "variants") variants = split_list(value);
            else if (key == "workers") workers = std::stoi(value);
            else if (key == "zero-timing")
                zero_timing = value == "true" || value == "1";
            else if (key == "verbose")
                verbose = value == "true" || value == "1";
            else if (key == "beta") beta = std::stod(value);
            else if (key == "delta") delta = std::stod(value);
            else if (key == "c-scale") c_scale = std::stod(value);
            else if (key == "gamma") gamma = std::stod(value);
            else if (key == "kappa") kappa = std::stod(value);
            else return false;
            return true;
        } catch (const std::exception&) {
            throw CLI::ValidationError("config",
                                       "bad value for key '" + key + "'");
        }
    }
};

int cmd_generate(const std::string& out_instance, const std::string& out_advice,
                 std::uint32_t n, std::uint64_t seed, double alpha,
                 const std::string& kind_name, std::size_t coarsen_r) {
    TypeHistogram c_star = gen_hard_instance({n, 0.81034, seed});
    save_histogram(out_instance, c_star);
    CorruptionSpec corruption;
    corruption.alpha = alpha;
    corruption.kind = parse_kind(kind_name);
    corruption.seed = derive_seed(seed, "cell-corruption",
                                  static_cast<std::uint64_t>(corruption.kind),
                                  std::bit_cast<std::uint64_t>(alpha));
    TypeHistogram advice = corrupt_advice(c_star, corruption);
    if (coarsen_r > 0) {
        CoarsenResult coarse =
            bucket_coarsen(AdviceBundle::from(std::move(advice)), coarsen_r);
        if (!coarse.reached_target)
            std::cerr << "warning: coarsening stalled at support "
                      << coarse.advice.support_size() << "\n";
        advice = coarse.advice.hist;
    }
    save_histogram(out_advice, advice);
    std::cout << "instance: " << out_instance << " (n=" << n
              << ", support=" << c_star.support_size() << ")\n"
              << "advice:   " << out_advice
              << " (support=" << advice.support_size() << ")\n";
    return 0;
}

int cmd_run(const RunConfig& cfg) {
    TypeHistogram c_star =
        cfg.instance_path.empty()
            ? gen_hard_instance({cfg.n, 0.81034, cfg.seed})
            : load_histogram(cfg.instance_path);
    const ImpliedGraph truth = ImpliedGraph::from_histogram(c_star);
    const auto n_star = static_cast<std::int64_t>(max_matching(truth).size());
    const auto order = random_order(truth, cfg.seed);

    CorruptionKind kind = parse_kind(cfg.kind);
    TypeHistogram advice_hist = c_star;
    if (!cfg.advice_path.empty()) {
        advice_hist = load_histogram(cfg.advice_path);
    } else if (cfg.alpha > 0.0) {
        CorruptionSpec corruption;
        corruption.alpha = cfg.alpha;
        corruption.kind = kind;
        corruption.seed = derive_seed(cfg.seed, "cell-corruption",
                                      static_cast<std::uint64_t>(kind),
                                      std::bit_cast<std::uint64_t>(cfg.alpha));
        advice_hist = corrupt_advice(c_star, corruption);
    }

    auto variant = variant_by_name(cfg.variant);
    if (!variant)
        throw CLI::ValidationError("variant", "unknown variant " + cfg.variant);
    Rng rng = make_rng(cfg.seed, "cell-algorithm");

    std::cout << "variant=" << variant->name << " n=" << truth.n
              << " seed=" << cfg.seed << " kind=" << corruption_name(kind)
              << " alpha=" << cfg.alpha << "\n";
    if (variant->kind == VariantSpec::Kind::Ranking) {
        auto m = static_cast<std::int64_t>(
            ranking_matching(truth, order, rng).size());
        std::cout << "m=" << m << " n_star=" << n_star
                  << " ratio=" << competitive_ratio(m, n_star) << "\n";
        return 0;
    }
    if (variant->kind == VariantSpec::Kind::Greedy) {
        auto m =
            static_cast<std::int64_t>(greedy_matching(truth, order).size());
        std::cout << "m=" << m << " n_star=" << n_star
                  << " ratio=" << competitive_ratio(m, n_star) << "\n";
        return 0;
    }
    AdviceBundle advice = AdviceBundle::from(std::move(advice_hist));
    RunOutcome outcome = test_and_match(truth, order, advice, variant->flags,
                                        cfg.budget, rng, n_star);
    std::cout << "m=" << outcome.matches << " n_star=" << outcome.n_star
              << " ratio=" << outcome.ratio << " verdict="
              << gate_outcome_name(outcome.verdict) << " l1_hat="
              << (outcome.l1_hat ? std::to_string(*outcome.l1_hat)
                                 : std::string("nan"))
              << " k=" << outcome.k_consumed << " j=" << outcome.j_test_matches
              << " n_hat=" << outcome.n_hat << " r_eff=" << outcome.r_eff
              << " cap=" << outcome.cap << "\n";
    return 0;
}

int cmd_plot(const std::string& csv_path, const std::string& out_prefix) {
    auto rows = rows_from_csv(read_text_file(csv_path));
    if (rows.empty()) {
        std::cerr << "no rows in " << csv_path << "\n";
        return 2;
    }
    std::vector<std::string> variants;
    for (const auto& row : rows)
        if (std::find(variants.begin(), variants.end(), row.variant) ==
            variants.end())
            variants.push_back(row.variant);
    int emitted = 0;
    for (CorruptionKind kind :
         {CorruptionKind::AddUnion, CorruptionKind::Replace}) {
        bool any = false;
        for (const auto& row : rows) any = any || row.kind == kind;
        if (!any) continue;
        std::string path =
            out_prefix + "_" + std::string(corruption_name(kind)) + ".svg";
        write_text_file(path, plot_svg(rows, kind, variants));
        std::cout << "wrote " << path << "\n";
        ++emitted;
    }
    return emitted > 0 ? 0 : 2;
}

int run_selftest();

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Benchmark harness for online bipartite matching with "
        "histogram-of-types advice"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand(
        "generate", "Write an instance file and a corrupted advice file");
    std::string gen_instance = "instance.txt", gen_advice = "advice.txt";
    std::uint32_t gen_n = 2000;
    std::uint64_t gen_seed = 1;
    double gen_alpha = 0.0;
    std::string gen_kind = "Replace";
    std::size_t gen_coarsen = 0;
    gen->add_option("--out-instance", gen_instance, "Instance output path");
    gen->add_option("--out-advice", gen_advice, "Advice output path");
    gen->add_option("--n", gen_n, "Number of offline/online vertices");
    gen->add_option("--seed", gen_seed, "Master seed");
    gen->add_option("--alpha", gen_alpha, "Corruption fraction in [0,1]");
    gen->add_option("--kind", gen_kind, "Corruption kind: AddUnion|Replace");
    gen->add_option("--coarsen-r", gen_coarsen,
                    "Coarsen advice to this support size (0 = off)");

    // run
    auto* run = app.add_subcommand("run", "Run one variant on one instance");
    RunConfig rc;
    run->add_option("--n", rc.n, "Instance size (ignored with --instance)");
    run->add_option("--seed", rc.seed, "Master seed");
    run->add_option("--alpha", rc.alpha, "Corruption fraction");
    run->add_option("--kind", rc.kind, "Corruption kind: AddUnion|Replace");
    run->add_option("--variant", rc.variant, "Algorithm variant name");
    run->add_option("--instance", rc.instance_path, "Instance file");
    run->add_option("--advice", rc.advice_path, "Advice file");
    run->add_option("--beta", rc.budget.beta, "Baseline competitive ratio");
    run->add_option("--delta", rc.budget.delta, "Test failure budget");
    run->add_option("--c-scale", rc.budget.c_scale, "Sample formula scale");
    run->add_option("--gamma", rc.budget.gamma, "Budget guard fraction");
    run->add_option("--kappa", rc.budget.kappa, "Testing-phase cap fraction");
    double run_epsilon = 0.0;
    auto* eps_opt =
        run->add_option("--epsilon", run_epsilon, "Override test accuracy");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Run the benchmark grid");
    SweepCli sc;
    std::string sweep_config_path;
    bool print_config = false;
    sweep->add_option("--config", sweep_config_path,
                      "Read options from a key=value config file");
    sc.opts["out"] = sweep->add_option("--out", sc.out, "Output CSV path");
    sc.opts["n"] = sweep->add_option("--n", sc.n, "Instance size");
    sc.opts["num-seeds"] =
        sweep->add_option("--num-seeds", sc.num_seeds, "Number of seeds");
    sc.opts["seed-base"] =
        sweep->add_option("--seed-base", sc.seed_base, "First seed value");
    sc.opts["alphas"] = sweep->add_option("--alphas", sc.alphas, "Alpha grid");
    sc.opts["kinds"] = sweep->add_option("--kinds", sc.kinds, "Corruption kinds");
    sc.opts["variants"] = sweep->add_option("--variants", sc.variants,
                                            "Variant names (default: all)");
    sc.opts["workers"] =
        sweep->add_option("--workers", sc.workers,
                          "Worker threads (0 = TAM_WORKERS env or all cores)");
    sc.opts["zero-timing"] =
        sweep->add_flag("--zero-timing", sc.zero_timing,
                        "Write zero wall times for byte-stable output");
    sc.opts["verbose"] = sweep->add_flag(
        "--verbose", sc.verbose, "Add the instance_hash column to the CSV");
    sweep->add_flag("--print-config", print_config,
                    "Print the effective configuration and exit");
    sc.opts["beta"] =
        sweep->add_option("--beta", sc.beta, "Baseline competitive ratio");
    sc.opts["delta"] = sweep->add_option("--delta", sc.delta, "Test failure budget");
    sc.opts["c-scale"] =
        sweep->add_option("--c-scale", sc.c_scale, "Sample formula scale");
    sc.opts["gamma"] =
        sweep->add_option("--gamma", sc.gamma, "Budget guard fraction");
    sc.opts["kappa"] =
        sweep->add_option("--kappa", sc.kappa, "Testing-phase cap fraction");

    // plot
    auto* plot = app.add_subcommand("plot", "Render per-kind SVG plots");
    std::string plot_csv;
    std::string plot_prefix = "plot";
    plot->add_option("csv", plot_csv, "Input CSV from sweep")->required();
    plot->add_option("--out-prefix", plot_prefix, "Output SVG path prefix");

    // demo-hardness
    auto* demo = app.add_subcommand(
        "demo-hardness", "Print gadget ratios with correct and wrong advice");
    std::uint32_t demo_n = 1000;
    demo->add_option("--n", demo_n, "Gadget size (even)");

    // selftest
    app.add_subcommand("selftest", "Run the built-in invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed())
            return cmd_generate(gen_instance, gen_advice, gen_n, gen_seed,
                                gen_alpha, gen_kind, gen_coarsen);
        if (run->parsed()) {
            if (eps_opt->count() > 0) rc.budget.epsilon = run_epsilon;
            return cmd_run(rc);
        }
        if (sweep->parsed()) {
            if (!sweep_config_path.empty()) sc.apply_config(sweep_config_path);
            SweepSpec spec = sc.to_spec();
            spec.validate();
            if (print_config) {
                std::cout << sc.render_config();
                return 0;
            }
            auto rows = run_sweep(spec);
            write_text_file(sc.out, rows_to_csv(rows, spec.verbose));
            std::cout << "wrote " << rows.size() << " rows to " << sc.out
                      << "\n";
            return 0;
        }
        if (plot->parsed()) return cmd_plot(plot_csv, plot_prefix);
        if (demo->parsed()) {
            auto [correct, wrong] = hardness_demo(demo_n);
            char buf[96];
            std::snprintf(buf, sizeof buf,
                          "correct advice: %.3f\nwrong advice:   %.3f\n",
                          correct, wrong);
            std::cout << buf;
            return 0;
        }
        if (app.get_subcommand("selftest")->parsed()) return run_selftest();
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

namespace {

int run_selftest() {
    int failures = 0;
    auto check = [&](bool ok, const std::string& what) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << what << "\n";
        if (!ok) ++failures;
    };

    // L1 metric sanity on random histogram triples.
    {
        Rng rng(20240601);
        bool ok = true;
        for (int trial = 0; trial < 50 && ok; ++trial) {
            const std::uint32_t n = 12;
            auto random_hist = [&]() {
                std::vector<VertexType> types;
                std::uniform_int_distribution<std::uint32_t> deg(0, 4);
                std::uniform_int_distribution<std::uint32_t> vert(0, n - 1);
                for (std::uint32_t i = 0; i < n; ++i) {
                    std::vector<std::uint32_t> nb;
                    for (std::uint32_t d = deg(rng); d > 0; --d)
                        nb.push_back(vert(rng));
                    types.emplace_back(std::move(nb));
                }
                return TypeHistogram::from_types(n, types);
            };
            TypeHistogram a = random_hist(), b = random_hist(),
                          c = random_hist();
            ok = ok && l1_distance(a, a) == 0;
            ok = ok && l1_distance(a, b) == l1_distance(b, a);
            ok = ok && l1_distance(a, c) <=
                           l1_distance(a, b) + l1_distance(b, c);
        }
        check(ok, "count-scale L1 is a metric on random triples");
    }

    // Gadget pair: identical prefixes, hardness ratios.
    {
        auto g1 = gen_gadget(100, 1), g2 = gen_gadget(100, 2);
        bool prefix_equal = true;
        for (std::uint32_t i = 0; i < 50; ++i)
            prefix_equal =
                prefix_equal && g1.online_types[i] == g2.online_types[i];
        auto [correct, wrong] = hardness_demo(1000);
        check(prefix_equal, "gadget pair agrees on the first n/2 arrivals");
        check(correct == 1.0 && wrong <= 0.502,
              "gadget policy ratios (1.0 correct, <= 0.502 wrong)");
    }

    // Patch identities on random advice.
    {
        Rng rng(7);
        bool ok = true;
        for (int trial = 0; trial < 50 && ok; ++trial) {
            const std::uint32_t n = 10;
            std::vector<VertexType> types;
            std::uniform_int_distribution<std::uint32_t> deg(0, 3);
            std::uniform_int_distribution<std::uint32_t> vert(0, n - 1);
            for (std::uint32_t i = 0; i < n; ++i) {
                std::vector<std::uint32_t> nb;
                for (std::uint32_t d = deg(rng); d > 0; --d)
                    nb.push_back(vert(rng));
                types.emplace_back(std::move(nb));
            }
            AdviceBundle advice =
                AdviceBundle::from(TypeHistogram::from_types(n, types));
            auto [patched, record] = patch_advice(advice);
            ok = ok && patched.n_hat == static_cast<std::int64_t>(n);
            ok = ok && l1_distance(advice.hist, patched.hist) ==
                           2 * (static_cast<std::int64_t>(n) - advice.n_hat);
        }
        check(ok, "patching reaches a perfect matching with L1 cost 2k");
    }

    // SimulateP uses at most `count` fresh arrivals and starts fresh.
    {
        Rng rng(99);
        TypeHistogram h = gen_hard_instance({100, 0.81034, 5});
        ArrivalBuffer buffer{h.expand(), 100};
        bool ok = true;
        for (int trial = 0; trial < 200 && ok; ++trial) {
            std::size_t fresh = 0;
            auto samples = simulate_p(buffer, 20, rng, &fresh);
            ok = ok && fresh <= 20 && samples.size() == 20 &&
                 samples.front() == buffer.seen.front();
        }
        check(ok, "SimulateP fresh-arrival bound");
    }

    // Poisson moments, quick version.
    {
        Rng rng(123);
        const int draws = 100000;
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < draws; ++i) {
            auto x = static_cast<double>(poisson_sample(50.0, rng));
            sum += x;
            sumsq += x * x;
        }
        double mean = sum / draws;
        double var = sumsq / draws - mean * mean;
        check(std::abs(mean - 50.0) < 0.5 && std::abs(var - 50.0) < 3.0,
              "Poisson(50) moments");
    }

    // Text round-trip.
    {
        TypeHistogram h = gen_hard_instance({200, 0.81034, 11});
        std::string text = histogram_to_text(h);
        check(histogram_to_text(histogram_from_text(text)) == text,
              "histogram text round-trip");
    }

    // Determinism of a full run.
    {
        TypeHistogram c_star = gen_hard_instance({400, 0.81034, 3});
        ImpliedGraph truth = ImpliedGraph::from_histogram(c_star);
        auto n_star = static_cast<std::int64_t>(max_matching(truth).size());
        auto order = random_order(truth, 3);
        AdviceBundle advice = AdviceBundle::from(c_star);
        auto run_once = [&]() {
            Rng rng = make_rng(3, "cell-algorithm", 0, 0);
            return test_and_match(truth, order, advice, AblationFlags{},
                                  BudgetParams{}, rng, n_star);
        };
        RunOutcome a = run_once(), b = run_once();
        check(a.matches == b.matches && a.verdict == b.verdict &&
                  a.l1_hat == b.l1_hat && a.k_consumed == b.k_consumed,
              "run determinism for a fixed seed triple");
    }

    std::cout << (failures == 0 ? "selftest: all checks passed\n"
                                : "selftest: FAILURES\n");
    return failures == 0 ? 0 : 2;
}

}  // namespace
