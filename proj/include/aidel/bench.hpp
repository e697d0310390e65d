#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aidel/core.hpp"
#include "aidel/lpa.hpp"

namespace aidel::bench {

struct BenchReport {
    std::string structure;
    std::string dataset;
    std::string config;

    std::optional<double> build_seconds;
    std::optional<std::uint64_t> ops;
    std::optional<double> ops_per_sec;
    std::optional<double> p50_ns;
    std::optional<double> p99_ns;
    std::optional<std::uint64_t> metadata_bytes;
    std::optional<std::uint64_t> models_total;
    std::optional<std::uint64_t> models_unsatisfied;
    // Suite-specific values, in emission order.
    std::vector<std::pair<std::string, double>> extra;

    std::optional<double> metric(std::string_view name) const;

    friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

// Model counts per configuration. AIDEL: one row per threshold. RMI: one row per
// (threshold, M) with unsatisfied = models whose error exceeds the threshold.
std::vector<BenchReport> bench_model_counts(std::span<const Key> keys, const std::string& dataset,
                                            std::span<const std::uint64_t> thresholds,
                                            std::span<const std::size_t> rmi_sizes,
                                            const LpaConfig& lpa = {});

// Metadata bytes: AIDEL directory + models, B+-tree inner nodes (bulk loaded),
// RMI models + fallback inner nodes.
std::vector<BenchReport> bench_memory(std::span<const Key> keys, const std::string& dataset,
                                      std::uint64_t threshold, std::span<const std::size_t> rmi_sizes,
                                      const LpaConfig& lpa = {});

enum class Structure : std::uint8_t { aidel, btree, rmi, binary_search };
enum class Workload : std::uint8_t { insert, lookup, range };

const char* to_string(Structure s) noexcept;
const char* to_string(Workload w) noexcept;

struct ThroughputOptions {
    double train_fraction = 0.1;
    // Inserted keys / trained keys.
    double load_factor = 1.0;
    std::size_t queries = 100'000;
    double existing_fraction = 0.5;
    // Range queries span roughly this many keys.
    std::size_t range_keys = 100;
    std::uint64_t seed = 1;
    std::size_t rmi_models = 10'000;
    std::uint64_t rmi_threshold = 64;
    LpaConfig lpa;
    // >1 runs lookups through the OpenMP readers path (AIDEL only); latency
    // percentiles are then omitted.
    int threads = 1;
};

// Train on a shuffled train_fraction of the keys, insert load_factor more, then
// time the workload. Lookup/range answers are checked against an oracle and a
// mismatch throws. Throws InvalidArgument for unsupported pairs and for a
// workload that would perform zero operations.
BenchReport bench_throughput(Structure structure, Workload workload, std::span<const Key> keys,
                             const std::string& dataset, const ThroughputOptions& options);

// Per-model error profile for single-model, RMI normalization, equal-count and
// LPA strategies, each with `models` models (LPA: the smallest threshold that
// needs no more than `models`).
std::vector<BenchReport> bench_strategies(std::span<const Key> keys, const std::string& dataset,
                                          std::size_t models = 10, const LpaConfig& lpa = {});

inline double throughput(std::uint64_t ops, double seconds) {
    return seconds > 0 ? static_cast<double>(ops) / seconds : 0.0;
}

// Long format: structure,dataset,config,metric,value.
void write_csv(std::ostream& out, std::span<const BenchReport> reports);
std::vector<BenchReport> read_csv(std::istream& in);

std::string format_table(std::span<const BenchReport> reports);

}  // namespace aidel::bench
