#include <gtest/gtest.h>

#include "aidel/index.hpp"
#include "index_fixtures.hpp"
#include "test_util.hpp"

namespace aidel {
namespace {

AidelIndex ten_keys_with_lists() {
    auto idx = test::ten_key_index();
    for (Key k : {22, 9, 10, 20, 21, 23}) EXPECT_EQ(idx.insert(k), InsertResult::inserted);
    return idx;
}

TEST(RetrainPartial, TenKeyIndexMergesElevenKeys) {
    auto idx = ten_keys_with_lists();
    const auto untouched = idx.segments()[1];
    const std::vector<Key> target{2};
    const auto report = idx.retrain_partial(target);
    EXPECT_EQ(report.merged_records, 11u);
    EXPECT_EQ(report.segments_retrained, 1u);
    EXPECT_EQ(idx.overflow_size(), 0u);
    EXPECT_EQ(idx.data(), (std::vector<Key>{2, 8, 9, 10, 15, 17, 19, 20, 21, 22, 23, 30, 40, 50, 60, 70}));
    const auto& last = idx.segments().back();
    EXPECT_EQ(last.model, untouched.model);
    EXPECT_EQ(last.len, untouched.len);
    EXPECT_EQ(last.start, 11u);
}

TEST(RetrainAll, TenKeyIndexInlinesLists) {
    auto idx = ten_keys_with_lists();
    const auto report = idx.retrain_all();
    EXPECT_EQ(report.merged_records, 16u);
    EXPECT_EQ(idx.overflow_size(), 0u);
    EXPECT_EQ(idx.data(), (std::vector<Key>{2, 8, 9, 10, 15, 17, 19, 20, 21, 22, 23, 30, 40, 50, 60, 70}));
    EXPECT_EQ(idx.inserts_since_train(), 0u);
}

TEST(RetrainAll, NoOverflowKeepsSegments) {
    const auto keys = test::lognormal_keys(50'000, 21);
    auto idx = AidelIndex::build(keys);
    const auto before = idx.segments();
    idx.retrain_all();
    EXPECT_EQ(idx.segments(), before);
}

TEST(RetrainPartial, NoOverflowKeepsBoundaries) {
    const auto keys = test::lognormal_keys(50'000, 22);
    IndexConfig cfg;
    cfg.lpa.threshold = 16;
    auto idx = AidelIndex::build(keys, cfg);
    const auto before = idx.segments();
    std::vector<Key> firsts;
    for (std::size_t s = 0; s < before.size(); s += 3) firsts.push_back(before[s].first_key);
    idx.retrain_partial(firsts);
    EXPECT_EQ(idx.segments(), before);
}

TEST(RetrainPartial, UnknownSegment) {
    auto idx = test::ten_key_index();
    const std::vector<Key> bad{8};
    try {
        idx.retrain_partial(bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownSegment);
    }
}

struct Answers {
    std::vector<LookupResult::Kind> found;
    std::vector<std::vector<Key>> ranges;
    bool operator==(const Answers&) const = default;
};

Answers answer(const AidelIndex& idx, const std::vector<Key>& probes,
               const std::vector<std::pair<Key, Key>>& ranges) {
    Answers a;
    for (Key k : probes) a.found.push_back(idx.contains(k) ? LookupResult::Kind::data : LookupResult::Kind::absent);
    for (const auto& [lo, hi] : ranges) a.ranges.push_back(idx.range_query(lo, hi));
    return a;
}

TEST(Retrain, AnswerSetsSurviveFullAndPartialRetrain) {
    const auto split = test::split_keys(100'000, 100'000, 23);
    auto idx = AidelIndex::build(split.build);
    for (Key k : split.inserts) idx.insert(k);
    // A few keys below the trained minimum exercise the head chain.
    for (Key k = 0; k < std::min<Key>(split.build.front(), 5); ++k) idx.insert(k);
    const auto everything = idx.all_keys();

    std::mt19937_64 rng(24);
    std::vector<Key> probes;
    for (int i = 0; i < 5000; ++i) probes.push_back(everything[rng() % everything.size()]);
    for (Key k : test::absent_keys(everything, 5000, 25)) probes.push_back(k);
    std::vector<std::pair<Key, Key>> ranges;
    for (int i = 0; i < 100; ++i) {
        const Key a = everything[rng() % everything.size()];
        ranges.emplace_back(a, a + (rng() % 1'000'000));
    }
    const auto expected = answer(idx, probes, ranges);

    auto full = idx;
    const auto before_data = full.trained_size(), before_over = full.overflow_size();
    const auto report = full.retrain_all();
    EXPECT_EQ(report.merged_records, before_data + before_over);
    EXPECT_EQ(full.overflow_size(), 0u);
    EXPECT_EQ(full.data(), everything);
    EXPECT_EQ(answer(full, probes, ranges), expected);

    for (std::uint64_t trial = 0; trial < 5; ++trial) {
        auto part = idx;
        std::vector<Key> firsts;
        std::vector<bool> chosen(part.segments().size());
        for (std::size_t s = 0; s < part.segments().size(); ++s) {
            chosen[s] = (rng() % 3 == 0) || (trial == 0 && s == 0);
            if (chosen[s]) firsts.push_back(part.segments()[s].first_key);
        }
        const auto old_segments = part.segments();
        part.retrain_partial(firsts);
        EXPECT_EQ(answer(part, probes, ranges), expected) << "trial " << trial;
        EXPECT_EQ(part.all_keys(), everything);
        // Untouched segments keep their models and lengths, in order.
        std::size_t cursor = 0;
        for (std::size_t s = 0; s < old_segments.size(); ++s) {
            if (chosen[s]) continue;
            while (cursor < part.segments().size() && part.segments()[cursor].first_key != old_segments[s].first_key)
                ++cursor;
            ASSERT_LT(cursor, part.segments().size());
            EXPECT_EQ(part.segments()[cursor].model, old_segments[s].model);
            EXPECT_EQ(part.segments()[cursor].len, old_segments[s].len);
        }
    }
}

}  // namespace
}  // namespace aidel
