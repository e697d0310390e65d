#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "aidel/datagen.hpp"
#include "aidel/index.hpp"

namespace aidel::test {

// Relative-frame segment fitted over keys[start, start + len).
inline Segment fitted_segment(const std::vector<Key>& keys, Position start, std::uint64_t len) {
    const std::vector<Key> run(keys.begin() + start, keys.begin() + start + len);
    const auto records = make_records(run);
    const auto m = fit_least_squares(records);
    Segment s;
    s.first_key = run.front();
    s.model = with_errors(m, compute_errors(m, records, len));
    s.start = start;
    s.len = len;
    return s;
}

// Existing data 2, 8, 15, 17, 19 under one model, followed by a second model.
inline AidelIndex ten_key_index() {
    const std::vector<Key> keys{2, 8, 15, 17, 19, 30, 40, 50, 60, 70};
    std::vector<Segment> segs{fitted_segment(keys, 0, 5), fitted_segment(keys, 5, 5)};
    return AidelIndex::from_parts(keys, segs, IndexConfig{}, {});
}

inline std::vector<Key> lognormal_keys(std::size_t n, std::uint64_t seed) {
    DatasetSpec s;
    s.count = n;
    s.seed = seed;
    s.exact = true;
    return generate(s);
}

// Splits a key set into a build half and an insert half, shuffled.
struct SplitKeys {
    std::vector<Key> build;
    std::vector<Key> inserts;
    std::vector<Key> all;
};

inline SplitKeys split_keys(std::size_t build_n, std::size_t insert_n, std::uint64_t seed) {
    SplitKeys s;
    s.all = lognormal_keys(build_n + insert_n, seed);
    auto shuffled = s.all;
    std::mt19937_64 rng(seed);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    s.build.assign(shuffled.begin(), shuffled.begin() + build_n);
    std::sort(s.build.begin(), s.build.end());
    s.inserts.assign(shuffled.begin() + build_n, shuffled.end());
    return s;
}

// Keys not in `sorted`, spread over [0, max + n].
inline std::vector<Key> absent_keys(const std::vector<Key>& sorted, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Key> d(0, sorted.back() + n);
    std::vector<Key> out;
    while (out.size() < n) {
        const Key k = d(rng);
        if (!std::binary_search(sorted.begin(), sorted.end(), k)) out.push_back(k);
    }
    return out;
}

inline std::uint64_t checksum(const std::vector<Key>& v) {
    std::uint64_t h = 1469598103934665603ULL;
    for (Key k : v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (k >> (8 * b)) & 0xff;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

}  // namespace aidel::test
