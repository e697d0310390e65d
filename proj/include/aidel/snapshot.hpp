#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "aidel/index.hpp"

namespace aidel {

// Binary layout, all little-endian:
//   "AIDL1"
//   u64 key_count, u64 segment_count
//   u64 threshold, u64 learning_step, f64 learning_rate, u8 shrink_mode,
//   u64 max_chain_nodes, f64 max_overflow_ratio
//   segment_count x { u64 first_key, f64 slope, f64 intercept, i64 min_err,
//                     i64 max_err, u64 start, u64 len }
//   key_count x u64 key
//   u64 chain_count, chain_count x { u64 anchor, u64 n, n x u64 key }
// Segment models are in relative frame. The head chain uses anchor 2^64 - 1.
inline constexpr char kSnapshotMagic[5] = {'A', 'I', 'D', 'L', '1'};

std::vector<std::uint8_t> serialize_snapshot(const AidelIndex& index);
AidelIndex deserialize_snapshot(std::span<const std::uint8_t> bytes);

void save_snapshot(const AidelIndex& index, const std::filesystem::path& path);
AidelIndex load_snapshot(const std::filesystem::path& path);

}  // namespace aidel
