#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include "aidel/core.hpp"
#include "aidel/index.hpp"
#include "aidel/rmi.hpp"

// OpenMP versions of the data-parallel loops. Every kernel keeps the serial
// loop behind Exec::serial; tests require both paths to agree exactly.
namespace aidel::parallel {

int max_threads() noexcept;

// Same contract as aidel::compute_errors, reduced across threads.
ErrorStats compute_errors(const LinearModel& model, std::span<const Record> records,
                          PositionWindow window, Exec exec = Exec::parallel);

// Concurrent readers over one index; `out` must be as long as `keys`.
void lookup_batch(const AidelIndex& index, std::span<const Key> keys, std::span<LookupResult> out,
                  Exec exec = Exec::parallel);
std::size_t count_found(const AidelIndex& index, std::span<const Key> keys, Exec exec = Exec::parallel);
std::size_t count_found(const RmiIndex& index, std::span<const Key> keys, Exec exec = Exec::parallel);

using KeyRange = std::pair<Key, Key>;
void range_counts(const AidelIndex& index, std::span<const KeyRange> ranges, std::span<std::size_t> out,
                  Exec exec = Exec::parallel);

// Number of trained keys whose true position falls outside their segment's
// predicted interval. Zero for every correctly built index.
std::size_t containment_violations(const AidelIndex& index, Exec exec = Exec::parallel);

}  // namespace aidel::parallel
