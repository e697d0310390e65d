#include <gtest/gtest.h>

#include "aidel/parallel.hpp"
#include "aidel/rmi.hpp"
#include "index_fixtures.hpp"

namespace aidel {
namespace {

class ParallelKernels : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        split_ = new test::SplitKeys(test::split_keys(100'000, 50'000, 71));
        index_ = new AidelIndex(AidelIndex::build(split_->build));
        for (Key k : split_->inserts) index_->insert(k);
        probes_ = new std::vector<Key>(split_->all);
        const auto absent = test::absent_keys(split_->all, 50'000, 72);
        probes_->insert(probes_->end(), absent.begin(), absent.end());
    }
    static void TearDownTestSuite() {
        delete probes_;
        delete index_;
        delete split_;
    }
    static test::SplitKeys* split_;
    static AidelIndex* index_;
    static std::vector<Key>* probes_;
};

test::SplitKeys* ParallelKernels::split_ = nullptr;
AidelIndex* ParallelKernels::index_ = nullptr;
std::vector<Key>* ParallelKernels::probes_ = nullptr;

TEST_F(ParallelKernels, ComputeErrorsAgree) {
    const auto records = make_records(split_->build);
    const std::span<const Record> all(records);
    for (std::size_t lo : {0u, 1000u, 50'000u}) {
        const auto sub = all.subspan(lo, 20'000);
        const auto m = fit_least_squares(sub);
        for (auto w : {full_window(records.size()), PositionWindow{lo, lo + 19'999}}) {
            EXPECT_EQ(parallel::compute_errors(m, sub, w, Exec::serial), parallel::compute_errors(m, sub, w, Exec::parallel));
            EXPECT_EQ(parallel::compute_errors(m, sub, w, Exec::serial), compute_errors(m, sub, w));
        }
    }
    EXPECT_THROW(parallel::compute_errors(LinearModel{}, {}, {0, 0}, Exec::parallel), Error);
}

TEST_F(ParallelKernels, LookupBatchAgrees) {
    std::vector<LookupResult> s(probes_->size()), p(probes_->size());
    parallel::lookup_batch(*index_, *probes_, s, Exec::serial);
    parallel::lookup_batch(*index_, *probes_, p, Exec::parallel);
    EXPECT_EQ(s, p);
    for (std::size_t i = 0; i < probes_->size(); i += 97) EXPECT_EQ(s[i], index_->lookup((*probes_)[i]));
    EXPECT_EQ(parallel::count_found(*index_, *probes_, Exec::parallel), split_->all.size());
    EXPECT_EQ(parallel::count_found(*index_, *probes_, Exec::serial), split_->all.size());
    std::vector<LookupResult> short_out(3);
    EXPECT_THROW(parallel::lookup_batch(*index_, *probes_, short_out, Exec::parallel), Error);
}

TEST_F(ParallelKernels, RangeCountsAgree) {
    std::vector<parallel::KeyRange> ranges;
    std::mt19937_64 rng(73);
    for (int i = 0; i < 2000; ++i) {
        const Key a = split_->all[rng() % split_->all.size()];
        ranges.emplace_back(a, a + rng() % 10'000'000);
    }
    std::vector<std::size_t> s(ranges.size()), p(ranges.size());
    parallel::range_counts(*index_, ranges, s, Exec::serial);
    parallel::range_counts(*index_, ranges, p, Exec::parallel);
    EXPECT_EQ(s, p);
    for (std::size_t i = 0; i < ranges.size(); i += 50)
        EXPECT_EQ(s[i], index_->range_query(ranges[i].first, ranges[i].second).size());
    ranges.emplace_back(5, 4);
    s.push_back(0);
    EXPECT_THROW(parallel::range_counts(*index_, ranges, s, Exec::parallel), Error);
}

TEST_F(ParallelKernels, ContainmentAndRmiAgree) {
    EXPECT_EQ(parallel::containment_violations(*index_, Exec::serial), 0u);
    EXPECT_EQ(parallel::containment_violations(*index_, Exec::parallel), 0u);

    RmiConfig serial_cfg, parallel_cfg;
    serial_cfg.models = parallel_cfg.models = 2000;
    parallel_cfg.exec = Exec::parallel;
    const auto a = RmiIndex::build(split_->build, serial_cfg);
    const auto b = RmiIndex::build(split_->build, parallel_cfg);
    EXPECT_EQ(a.leaf_models(), b.leaf_models());
    EXPECT_EQ(a.valid(), b.valid());
    EXPECT_EQ(parallel::count_found(a, *probes_, Exec::serial), parallel::count_found(b, *probes_, Exec::parallel));
}

}  // namespace
}  // namespace aidel
