#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tam/algorithms.hpp"
#include "tam/instances.hpp"

namespace tam {

struct VariantSpec {
    enum class Kind { Ranking, Greedy, TestAndMatch };
    std::string name;
    Kind kind = Kind::TestAndMatch;
    AblationFlags flags;
};

// Ranking, Greedy, TaM-all, TaM-no-remap, TaM-no-bucket, TaM-no-patch.
std::vector<VariantSpec> default_variants();
// The four TestAndMatch variants plus Ranking (the paired-ablation grid).
std::vector<VariantSpec> ablation_variants();
std::optional<VariantSpec> variant_by_name(std::string_view name);

struct SweepSpec {
    std::uint32_t n = 2000;
    std::vector<std::uint64_t> seeds;
    std::vector<double> alphas;
    std::vector<CorruptionKind> kinds;
    std::vector<VariantSpec> variants;
    BudgetParams budget;
    int workers = 0;           // 0: TAM_WORKERS env or hardware concurrency
    bool zero_timing = false;  // write 0 wall times (byte-stable CSV output)
    bool verbose = false;      // add the instance_hash column to the CSV

    static SweepSpec defaults();
    void validate() const;
};

struct ResultRow {
    std::string variant;
    CorruptionKind kind = CorruptionKind::AddUnion;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    std::int64_t m = 0;
    std::int64_t n_star = 0;
    double ratio = 0.0;
    GateOutcome verdict = GateOutcome::NotTested;
    std::optional<double> l1_hat;
    std::int64_t k_consumed = 0;
    double wall_ms = 0.0;
    // Digest of (instance, advice, arrival order); identical for every
    // variant within a grid cell. Emitted only in verbose mode.
    std::uint64_t instance_hash = 0;
};

// Runs every variant on the same instance / advice / arrival order per
// (kind, alpha, seed) cell. Rows come back in grid order regardless of the
// worker pool's completion order. Per-cell failures become verdict=error
// rows instead of aborting the sweep.
std::vector<ResultRow> run_sweep(const SweepSpec& spec);

inline constexpr const char* kCsvHeader =
    "variant,kind,alpha,seed,m,n_star,ratio,test_verdict,l1_hat,k_consumed,"
    "wall_time_ms";

inline constexpr const char* kCsvHeaderVerbose =
    "variant,kind,alpha,seed,m,n_star,ratio,test_verdict,l1_hat,k_consumed,"
    "wall_time_ms,instance_hash";

std::string rows_to_csv(std::span<const ResultRow> rows, bool verbose = false);
std::vector<ResultRow> rows_from_csv(std::string_view csv);

void write_text_file(const std::string& path, std::string_view content);
std::string read_text_file(const std::string& path);

// Mean-ratio-vs-alpha plot for one corruption kind, one polyline per variant
// with +-1 sample-stddev error bars. Expected variants missing from the rows
// are listed in a warning inside the SVG title block. Deterministic bytes
// for fixed rows. Numeric series data is embedded in an XML comment so the
// plotted values can be audited against the CSV.
std::string plot_svg(std::span<const ResultRow> rows, CorruptionKind kind,
                     std::span<const std::string> expected_variants);

}  // namespace tam
