#include "aidel/parallel.hpp"

#include <algorithm>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace aidel::parallel {

int max_threads() noexcept {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

ErrorStats compute_errors(const LinearModel& model, std::span<const Record> records,
                          PositionWindow window, Exec exec) {
    if (exec == Exec::serial) return aidel::compute_errors(model, records, window);
    if (records.empty()) throw Error(ErrorCode::EmptyInput, "compute_errors on no records");

    std::int64_t lo = std::numeric_limits<std::int64_t>::max();
    std::int64_t hi = std::numeric_limits<std::int64_t>::min();
    const auto n = static_cast<std::int64_t>(records.size());
    const Record* data = records.data();
#pragma omp parallel for reduction(min : lo) reduction(max : hi) schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto pred = static_cast<std::int64_t>(predict_position(model, data[i].key, window));
        const std::int64_t r = static_cast<std::int64_t>(data[i].position) - pred;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return make_error_stats(lo, hi);
}

void lookup_batch(const AidelIndex& index, std::span<const Key> keys, std::span<LookupResult> out, Exec exec) {
    if (out.size() != keys.size()) throw Error(ErrorCode::InvalidArgument, "lookup_batch: output size mismatch");
    const auto n = static_cast<std::int64_t>(keys.size());
    if (exec == Exec::serial) {
        for (std::int64_t i = 0; i < n; ++i) out[i] = index.lookup(keys[i]);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) out[i] = index.lookup(keys[i]);
}

std::size_t count_found(const AidelIndex& index, std::span<const Key> keys, Exec exec) {
    const auto n = static_cast<std::int64_t>(keys.size());
    std::size_t found = 0;
    if (exec == Exec::serial) {
        for (std::int64_t i = 0; i < n; ++i) found += index.contains(keys[i]) ? 1 : 0;
        return found;
    }
#pragma omp parallel for reduction(+ : found) schedule(static)
    for (std::int64_t i = 0; i < n; ++i) found += index.contains(keys[i]) ? 1 : 0;
    return found;
}

std::size_t count_found(const RmiIndex& index, std::span<const Key> keys, Exec exec) {
    const auto n = static_cast<std::int64_t>(keys.size());
    std::size_t found = 0;
    if (exec == Exec::serial) {
        for (std::int64_t i = 0; i < n; ++i) found += index.contains(keys[i]) ? 1 : 0;
        return found;
    }
#pragma omp parallel for reduction(+ : found) schedule(static)
    for (std::int64_t i = 0; i < n; ++i) found += index.contains(keys[i]) ? 1 : 0;
    return found;
}

void range_counts(const AidelIndex& index, std::span<const KeyRange> ranges, std::span<std::size_t> out,
                  Exec exec) {
    if (out.size() != ranges.size()) throw Error(ErrorCode::InvalidArgument, "range_counts: output size mismatch");
    for (const auto& [lo, hi] : ranges) {
        if (lo > hi) throw Error(ErrorCode::InvalidRange, "low > high");
    }
    const auto n = static_cast<std::int64_t>(ranges.size());
    if (exec == Exec::serial) {
        for (std::int64_t i = 0; i < n; ++i) out[i] = index.range_count(ranges[i].first, ranges[i].second);
        return;
    }
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < n; ++i) out[i] = index.range_count(ranges[i].first, ranges[i].second);
}

std::size_t containment_violations(const AidelIndex& index, Exec exec) {
    const auto& data = index.data();
    const auto& segs = index.segments();
    const auto n_seg = static_cast<std::int64_t>(segs.size());
    std::size_t bad = 0;
    auto check = [&](std::int64_t s) {
        std::size_t local = 0;
        const Segment& seg = segs[static_cast<std::size_t>(s)];
        for (Position p = seg.start; p < seg.end(); ++p) {
            const auto r = predict_in_segment(seg, data[p]);
            if (p < r.lo || p > r.hi) ++local;
        }
        return local;
    };
    if (exec == Exec::serial) {
        for (std::int64_t s = 0; s < n_seg; ++s) bad += check(s);
        return bad;
    }
#pragma omp parallel for reduction(+ : bad) schedule(dynamic, 4)
    for (std::int64_t s = 0; s < n_seg; ++s) bad += check(s);
    return bad;
}

}  // namespace aidel::parallel
