#include "aidel/lpa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace aidel {

void LpaConfig::validate() const {
    if (threshold < 1) throw Error(ErrorCode::InvalidConfig, "threshold must be >= 1");
    if (learning_step < 1) throw Error(ErrorCode::InvalidConfig, "learning_step must be >= 1");
    if (!(learning_rate > 0.0 && learning_rate < 1.0))
        throw Error(ErrorCode::InvalidConfig, "learning_rate must lie in (0, 1)");
    if (std::floor(static_cast<double>(learning_step) * learning_rate) < 1.0)
        throw Error(ErrorCode::InvalidConfig,
                    "learning_step * learning_rate must be >= 1 (backward step of "
                    "zero never terminates)");
}

std::uint64_t LpaConfig::backward_step() const noexcept {
    const auto step = static_cast<std::uint64_t>(
        std::floor(static_cast<double>(learning_step) * learning_rate));
    return std::max<std::uint64_t>(step, 1);
}

std::vector<Record> make_records(std::span<const Key> keys, Position first_position) {
    std::vector<Record> out;
    out.reserve(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) out.push_back({keys[i], first_position + i});
    return out;
}

namespace {

void check_ascending(std::span<const Record> records) {
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].key <= records[i - 1].key)
            throw Error(ErrorCode::UnsortedInput,
                        "keys must be strictly ascending (index " + std::to_string(i) + ")");
    }
}

struct Probe {
    LinearModel model;
    ErrorStats err;
};

Probe evaluate(const LinearModel& model, std::span<const Record> s, PositionWindow w) {
    return {model, compute_errors(model, s, w)};
}

Probe fit_fresh(std::span<const Record> s, PositionWindow w) {
    return evaluate(fit_least_squares(s), s, w);
}

}  // namespace

std::vector<Segment> lpa_train(std::span<const Record> records, const LpaConfig& config,
                               std::uint64_t n_positions) {
    config.validate();
    if (records.empty()) throw Error(ErrorCode::EmptyInput, "lpa_train on no records");
    check_ascending(records);

    const std::size_t n = records.size();
    if (n_positions == 0) n_positions = records.back().position + 1;
    const PositionWindow window = full_window(n_positions);
    const std::uint64_t threshold = config.threshold;
    const std::size_t step = config.learning_step;
    const std::size_t back = config.backward_step();

    std::vector<Segment> segments;
    OlsAccumulator acc;

    std::size_t i = 0;
    while (i < n) {
        auto span_of = [&](std::size_t end) { return records.subspan(i, end - i); };

        acc.clear();
        std::size_t j = std::min(i + step, n);
        acc.add(span_of(j));
        Probe probe = evaluate(acc.model(), span_of(j), window);

        // Walk forward while the model is still comfortably inside the bound.
        std::size_t last_below = 0;
        while (probe.err.error < threshold && j < n) {
            last_below = j;
            const std::size_t next = std::min(j + step, n);
            acc.add(records.subspan(j, next - j));
            j = next;
            probe = evaluate(acc.model(), span_of(j), window);
        }

        if (probe.err.error > threshold) {
            if (config.mode == ShrinkMode::literal) {
                while (probe.err.error > threshold) {
                    const std::size_t k = (j - i > back) ? j - back : i + 1;
                    acc.remove(records.subspan(k, j - k));
                    j = k;
                    // A lone record is fit exactly; avoid the drift left by removals.
                    probe = (j - i == 1) ? fit_fresh(span_of(j), window)
                                         : evaluate(acc.model(), span_of(j), window);
                }
            } else {
                // lo is valid (or a single record), hi is not.
                std::size_t lo = last_below != 0 ? last_below : i + 1;
                std::size_t hi = j;
                Probe best = fit_fresh(span_of(lo), window);
                while (hi - lo > 1) {
                    const std::size_t mid = lo + (hi - lo) / 2;
                    Probe p = fit_fresh(span_of(mid), window);
                    if (p.err.error <= threshold) {
                        lo = mid;
                        best = p;
                    } else {
                        hi = mid;
                    }
                }
                j = lo;
                probe = best;
            }
        }

        Segment seg;
        seg.first_key = records[i].key;
        seg.model = with_errors(probe.model, probe.err);
        seg.start = records[i].position;
        seg.len = j - i;
        segments.push_back(seg);
        i = j;
    }
    return segments;
}

std::vector<Segment> lpa_train(std::span<const Key> keys, const LpaConfig& config) {
    const auto records = make_records(keys);
    return lpa_train(records, config, keys.size());
}

namespace {

void check_extent(const Segment& segment, std::span<const Record> records) {
    if (records.size() != segment.len || records.empty())
        throw Error(ErrorCode::ExtentMismatch, "record count does not match segment length");
    if (records.front().key != segment.first_key)
        throw Error(ErrorCode::ExtentMismatch, "first record is not the segment's first key");
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].position != segment.start + i)
            throw Error(ErrorCode::ExtentMismatch, "records are not the segment's extent");
    }
}

}  // namespace

ErrorStats residual_error_relative(const Segment& segment, std::span<const Record> records) {
    check_extent(segment, records);
    LinearModel rel = segment.model;
    rel.intercept -= static_cast<double>(segment.start);
    const PositionWindow w{0, segment.len - 1};
    std::int64_t lo = std::numeric_limits<std::int64_t>::max();
    std::int64_t hi = std::numeric_limits<std::int64_t>::min();
    for (const auto& r : records) {
        const auto y = static_cast<std::int64_t>(r.position - segment.start);
        const std::int64_t residual = y - static_cast<std::int64_t>(predict_position(rel, r.key, w));
        lo = std::min(lo, residual);
        hi = std::max(hi, residual);
    }
    return make_error_stats(lo, hi);
}

Segment to_relative(const Segment& segment, std::span<const Record> records) {
    Segment out = segment;
    out.model.intercept -= static_cast<double>(segment.start);
    out.model = with_errors(out.model, residual_error_relative(segment, records));
    return out;
}

}  // namespace aidel
