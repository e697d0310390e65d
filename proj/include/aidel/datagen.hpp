#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aidel/core.hpp"

namespace aidel {

struct DatasetSpec {
    enum class Kind : std::uint8_t { lognormal, sequential, two_slope, file };

    Kind kind = Kind::lognormal;
    std::uint64_t count = 1'000'000;
    std::uint64_t seed = 42;
    double mu = 0.0;
    double sigma = 2.0;
    // Lognormal samples are scaled so the largest drawn sample maps to this key.
    double scale = 1e9;
    // Lognormal only: keep drawing (below the first batch's maximum) until
    // `count` unique keys exist. Off by default, so flooring collisions shrink
    // the dataset.
    bool exact = false;
    std::filesystem::path path;

    // Parses "kind[:key=value,...]", e.g. "lognormal:count=10000,seed=7,exact=1",
    // "sequential:count=100", "two_slope:count=1000,seed=3", "file:path=keys.bin".
    static DatasetSpec parse(std::string_view text);
    std::string to_string() const;
    void validate() const;
};

// Sorted, strictly ascending keys; deterministic for a fixed spec.
std::vector<Key> generate(const DatasetSpec& spec);

// Raw little-endian u64 array without header. load_keys sorts and dedupes;
// read_key_file keeps file order. Empty or ragged files throw FileFormat.
std::vector<Key> load_keys(const std::filesystem::path& path);
std::vector<Key> read_key_file(const std::filesystem::path& path);
void save_keys(const std::filesystem::path& path, std::span<const Key> keys);

}  // namespace aidel
