#include <gtest/gtest.h>

#include "aidel/datagen.hpp"
#include "aidel/lpa.hpp"
#include "test_util.hpp"

namespace aidel {
namespace {

// Greedy probe written against exact rational fits.
std::vector<std::pair<std::size_t, std::size_t>> reference_lpa(const std::vector<Record>& records,
                                                               std::uint64_t thr, std::size_t step,
                                                               std::size_t back) {
    const std::size_t n = records.size();
    auto err_of = [&](std::size_t i, std::size_t j) {
        std::vector<Record> s(records.begin() + i, records.begin() + j);
        const auto f = test::exact_ols(s);
        const LinearModel m{test::to_double(f.slope), test::to_double(f.intercept), 0, 0};
        return test::scan_errors(m, s, 0, n - 1).error;
    };
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = std::min(i + step, n);
        auto e = err_of(i, j);
        while (e < thr && j < n) {
            j = std::min(j + step, n);
            e = err_of(i, j);
        }
        while (e > thr) {
            j = (j - i > back) ? j - back : i + 1;
            e = err_of(i, j);
        }
        out.emplace_back(i, j);
        i = j;
    }
    return out;
}

std::vector<Key> lognormal(std::size_t n, std::uint64_t seed) {
    DatasetSpec s;
    s.count = n;
    s.seed = seed;
    s.exact = true;
    return generate(s);
}

void expect_valid_tiling(const std::vector<Segment>& segs, const std::vector<Key>& keys, std::uint64_t thr) {
    const auto records = make_records(keys);
    Position next = 0;
    for (const auto& s : segs) {
        ASSERT_EQ(s.start, next);
        ASSERT_GE(s.len, 1u);
        ASSERT_EQ(s.first_key, keys[s.start]);
        std::vector<Record> slice(records.begin() + s.start, records.begin() + s.end());
        const auto e = test::scan_errors(s.model, slice, 0, keys.size() - 1);
        ASSERT_EQ(e, s.model.stats());
        ASSERT_LE(e.error, thr);
        next = s.end();
    }
    ASSERT_EQ(next, keys.size());
}

TEST(Lpa, MatchesRationalReference) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto keys = lognormal(3000, seed);
        const auto records = make_records(keys);
        for (std::uint64_t thr : {2u, 4u, 8u}) {
            LpaConfig cfg;
            cfg.threshold = thr;
            cfg.learning_step = 64;
            cfg.learning_rate = 0.25;
            const auto segs = lpa_train(keys, cfg);
            const auto want = reference_lpa(records, thr, 64, cfg.backward_step());
            ASSERT_EQ(segs.size(), want.size()) << "seed " << seed << " thr " << thr;
            for (std::size_t k = 0; k < segs.size(); ++k) {
                EXPECT_EQ(segs[k].start, want[k].first);
                EXPECT_EQ(segs[k].end(), want[k].second);
            }
        }
    }
}

TEST(Lpa, SegmentsTileAndRespectThreshold) {
    const auto keys = lognormal(100'000, 9);
    for (std::uint64_t thr : {1u, 16u, 64u, 256u}) {
        LpaConfig cfg;
        cfg.threshold = thr;
        expect_valid_tiling(lpa_train(keys, cfg), keys, thr);
    }
}

TEST(Lpa, BisectModeIsValid) {
    const auto keys = lognormal(100'000, 10);
    for (std::uint64_t thr : {4u, 64u}) {
        LpaConfig cfg;
        cfg.threshold = thr;
        cfg.mode = ShrinkMode::bisect;
        expect_valid_tiling(lpa_train(keys, cfg), keys, thr);
    }
}

TEST(Lpa, LinearKeysGiveOneExactSegment) {
    std::vector<Key> keys;
    for (Key k = 0; k < 10'000; ++k) keys.push_back(7 + 13 * k);
    for (std::uint64_t thr : {1u, 8u, 1000u}) {
        LpaConfig cfg;
        cfg.threshold = thr;
        cfg.learning_step = 64;
        const auto segs = lpa_train(keys, cfg);
        ASSERT_EQ(segs.size(), 1u);
        EXPECT_EQ(segs[0].model.error(), 0u);
        EXPECT_EQ(segs[0].len, keys.size());
    }
}

TEST(Lpa, CountsShrinkAsThresholdGrows) {
    const auto keys = lognormal(200'000, 5);
    std::size_t prev = SIZE_MAX;
    for (std::uint64_t thr : {32u, 64u, 128u, 256u}) {
        LpaConfig cfg;
        cfg.threshold = thr;
        const auto n = lpa_train(keys, cfg).size();
        EXPECT_LT(n, prev) << "threshold " << thr;
        prev = n;
    }
}

TEST(Lpa, Deterministic) {
    const auto keys = lognormal(50'000, 6);
    LpaConfig cfg;
    EXPECT_EQ(lpa_train(keys, cfg), lpa_train(keys, cfg));
}

TEST(Lpa, SingleKey) {
    const std::vector<Key> keys{99};
    const auto segs = lpa_train(keys, LpaConfig{});
    ASSERT_EQ(segs.size(), 1u);
    EXPECT_EQ(segs[0].len, 1u);
    EXPECT_EQ(segs[0].model.error(), 0u);
}

TEST(Lpa, RecordsWithOffsetPositions) {
    const auto keys = lognormal(20'000, 12);
    const auto records = make_records(keys, 5000);
    LpaConfig cfg;
    cfg.threshold = 16;
    const auto segs = lpa_train(records, cfg, 5000 + keys.size());
    EXPECT_EQ(segs.front().start, 5000u);
    EXPECT_EQ(segs.back().end(), 5000u + keys.size());
}

TEST(Lpa, RejectsBadConfig) {
    const std::vector<Key> keys{1, 2, 3};
    auto code_of = [&](LpaConfig c) {
        try {
            lpa_train(keys, c);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    LpaConfig c;
    c.threshold = 0;
    EXPECT_EQ(code_of(c), ErrorCode::InvalidConfig);
    c = {};
    c.learning_step = 0;
    EXPECT_EQ(code_of(c), ErrorCode::InvalidConfig);
    c = {};
    c.learning_rate = 0.0;
    EXPECT_EQ(code_of(c), ErrorCode::InvalidConfig);
    c = {};
    c.learning_rate = 1.0;
    EXPECT_EQ(code_of(c), ErrorCode::InvalidConfig);
    c = {};
    c.learning_step = 5;
    c.learning_rate = 0.1;
    EXPECT_EQ(code_of(c), ErrorCode::InvalidConfig);
}

TEST(Lpa, RejectsUnsortedAndEmpty) {
    const std::vector<Key> unsorted{1, 5, 3};
    const std::vector<Key> dup{1, 5, 5};
    try {
        lpa_train(unsorted, LpaConfig{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnsortedInput);
    }
    EXPECT_THROW(lpa_train(dup, LpaConfig{}), Error);
    try {
        lpa_train(std::span<const Key>{}, LpaConfig{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
    }
}

TEST(Lpa, BackwardStep) {
    LpaConfig c;
    c.learning_step = 1024;
    c.learning_rate = 0.1;
    EXPECT_EQ(c.backward_step(), 102u);
}

TEST(RelativeError, AgreesWithGlobalPerRecord) {
    const auto keys = lognormal(50'000, 13);
    const auto records = make_records(keys);
    LpaConfig cfg;
    cfg.threshold = 32;
    const auto window = full_window(keys.size());
    for (const auto& s : lpa_train(keys, cfg)) {
        const std::span<const Record> ext(records.data() + s.start, s.len);
        const auto rel = to_relative(s, ext);
        EXPECT_EQ(rel.start, s.start);
        EXPECT_EQ(rel.len, s.len);
        EXPECT_EQ(rel.model.stats(), residual_error_relative(s, ext));
        EXPECT_LE(rel.model.error(), cfg.threshold);
        for (const auto& r : ext) {
            const Position g = predict_position(s.model, r.key, window);
            const Position l = predict_position(rel.model, r.key, {0, s.len - 1});
            const auto gres = static_cast<std::int64_t>(r.position) - static_cast<std::int64_t>(g);
            const auto lres = static_cast<std::int64_t>(r.position - s.start) - static_cast<std::int64_t>(l);
            if (g >= s.start && g < s.end()) {
                ASSERT_EQ(lres, gres);
            } else {
                ASSERT_LE(std::llabs(lres), std::llabs(gres));
            }
        }
    }
}

TEST(RelativeError, RejectsWrongExtent) {
    const auto keys = lognormal(5000, 14);
    const auto records = make_records(keys);
    const auto segs = lpa_train(keys, LpaConfig{});
    const auto& s = segs.front();
    const std::span<const Record> all(records);
    try {
        residual_error_relative(s, all.subspan(1, s.len));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ExtentMismatch);
    }
    EXPECT_THROW(residual_error_relative(s, all.subspan(0, s.len - 1)), Error);
}

}  // namespace
}  // namespace aidel
