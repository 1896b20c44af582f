#pragma once

/**
 * Monte Carlo experiment harness.
 *
 * Replicates are independent tasks keyed by (size index, replicate index);
 * each derives its generator seed purely from the master seed via
 * child_seed(child_seed(master, size_index), replicate_index). Results land
 * in a preallocated buffer by index and are aggregated after the join, so
 * output is bitwise identical for any worker count.
 *
 * Replicates that blow the sampling budget are recorded and excluded; a run
 * aborts if more than 1% of them fail at any size.
 */

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "strahler/offspring.hpp"
#include "strahler/sampler.hpp"
#include "strahler/statistics.hpp"

namespace strahler {

enum class SamplerKind { conditional, unconditional, kesten };
enum class Normalization { log2n, log2log2n, none };

struct ExperimentConfig {
    OffspringDistribution dist = OffspringDistribution::builtin("catalan");
    StatSpec statistic;
    SamplerKind sampler = SamplerKind::conditional;
    std::vector<std::size_t> sizes;  // n for conditional, level for kesten,
                                     // row label for unconditional
    std::size_t replicates = 1000;
    std::uint64_t master_seed = 1;
    Normalization normalization = Normalization::log2n;
    std::string output;  // CSV destination; empty or "-" means stdout
    SampleBudget budget;

    /// Parses the JSON document described in the README.
    static ExperimentConfig from_json_text(const std::string& text);
    std::string to_json_text() const;

    void validate() const;  // throws ConfigError
};

struct SummaryStats {
    double mean = 0;
    double variance = 0;  // unbiased
    double stderr_mean = 0;
    double q05 = 0, q50 = 0, q95 = 0;
    double min = 0, max = 0;
    std::size_t count = 0;
};

/// Mean, unbiased variance, stderr and nearest-rank quantiles.
/// Throws EmptySample on an empty input.
SummaryStats summarize(const std::vector<double>& samples);

struct SizeResult {
    std::size_t n = 0;
    SummaryStats stats;
    double normalized_mean = 0;
    std::size_t replicates = 0;
    std::size_t failures = 0;
    std::uint64_t rejection_attempts = 0;  // conditional sampler only
};

struct ExperimentResult {
    std::vector<SizeResult> rows;
};

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads = 0);

/// CSV with the pinned header
/// n,stat,mean,stderr,q05,q50,q95,normalized_mean,replicates,failures
void write_experiment_csv(const ExperimentConfig& config, const ExperimentResult& result,
                          std::ostream& os);

/// JSON sidecar echoing the config, per-size extras and the code version.
std::string experiment_metadata_json(const ExperimentConfig& config,
                                     const ExperimentResult& result);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace strahler
