#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aidel/core.hpp"

namespace aidel {

enum class ShrinkMode : std::uint8_t {
    // Remove floor(step * rate) records from the tail and refit until valid.
    literal = 0,
    // Binary-search the longest valid prefix between the last valid probe and the overshoot.
    bisect = 1,
};

struct LpaConfig {
    std::uint64_t threshold = 64;
    std::uint64_t learning_step = 1024;
    double learning_rate = 0.1;
    ShrinkMode mode = ShrinkMode::literal;

    // Throws InvalidConfig.
    void validate() const;
    std::uint64_t backward_step() const noexcept;

    friend bool operator==(const LpaConfig&, const LpaConfig&) = default;
};

// One independent linear model and the contiguous run of records it covers.
struct Segment {
    Key first_key = 0;
    LinearModel model;
    Position start = 0;
    std::uint64_t len = 0;

    Position end() const noexcept { return start + len; }

    friend bool operator==(const Segment&, const Segment&) = default;
};

// Greedy probe segmentation. Models predict positions as stored in the
// records; residuals are clamped to [0, n_positions - 1]. When n_positions is
// 0 it is taken as records.back().position + 1.
std::vector<Segment> lpa_train(std::span<const Record> records, const LpaConfig& config,
                               std::uint64_t n_positions = 0);

// Convenience for a dense array: record i has position i.
std::vector<Segment> lpa_train(std::span<const Key> keys, const LpaConfig& config);

// Errors of the segment's model with positions rebased so the segment starts at 0
// and predictions clamp to [0, len - 1]. Throws ExtentMismatch when the records
// are not exactly the ones the segment covers.
ErrorStats residual_error_relative(const Segment& segment, std::span<const Record> records);

// The segment expressed in its own frame: intercept shifted by -start and errors
// recomputed by residual_error_relative. `start` and `len` are kept.
Segment to_relative(const Segment& segment, std::span<const Record> records);

// Search interval for a key routed to a segment whose model is in relative frame.
inline PositionRange predict_in_segment(const Segment& seg, Key key) noexcept {
    const auto r = predict(seg.model, key, PositionWindow{0, seg.len - 1});
    return {seg.start + r.lo, seg.start + r.hi};
}

std::vector<Record> make_records(std::span<const Key> keys, Position first_position = 0);

}  // namespace aidel
