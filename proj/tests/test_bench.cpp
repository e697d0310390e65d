#include <gtest/gtest.h>

#include <sstream>

#include "aidel/bench.hpp"
#include "aidel/bplus_tree.hpp"
#include "aidel/csv.hpp"
#include "index_fixtures.hpp"

namespace aidel {
namespace {

using namespace bench;

const std::vector<Key>& keys50k() {
    static const auto k = test::lognormal_keys(50'000, 81);
    return k;
}

std::vector<BenchReport> without_timings(std::vector<BenchReport> r) {
    for (auto& x : r) x.build_seconds.reset();
    return r;
}

TEST(BenchModels, AidelNeverUnsatisfied) {
    const std::vector<std::uint64_t> thr{32, 64, 128, 256};
    const std::vector<std::size_t> sizes{100, 1000};
    const auto rows = bench_model_counts(keys50k(), "ln", thr, sizes);
    ASSERT_EQ(rows.size(), thr.size() * (1 + sizes.size()));
    std::uint64_t prev = UINT64_MAX;
    for (const auto& r : rows) {
        ASSERT_TRUE(r.models_total && r.models_unsatisfied);
        EXPECT_LE(*r.models_unsatisfied, *r.models_total);
        if (r.structure == "aidel") {
            EXPECT_EQ(*r.models_unsatisfied, 0u);
            EXPECT_LT(*r.models_total, prev);
            prev = *r.models_total;
        } else {
            EXPECT_TRUE(*r.models_total == 100u || *r.models_total == 1000u);
        }
    }
    EXPECT_EQ(without_timings(rows), without_timings(bench_model_counts(keys50k(), "ln", thr, sizes)));
}

TEST(BenchMemory, ExactAccounting) {
    const std::vector<std::size_t> sizes{1000};
    const auto rows = bench_memory(keys50k(), "ln", 128, sizes);
    ASSERT_EQ(rows.size(), 3u);
    IndexConfig cfg;
    cfg.lpa.threshold = 128;
    const auto idx = AidelIndex::build(keys50k(), cfg);
    EXPECT_EQ(rows[0].structure, "aidel");
    EXPECT_EQ(*rows[0].metadata_bytes, idx.segments().size() * AidelIndex::kSegmentEntryBytes);
    EXPECT_EQ(rows[1].structure, "btree");
    EXPECT_EQ(*rows[1].metadata_bytes, BPlusTree::bulk_load(keys50k()).inner_bytes());
    EXPECT_EQ(without_timings(rows), without_timings(bench_memory(keys50k(), "ln", 128, sizes)));
}

TEST(BenchThroughput, LookupChecksOracle) {
    ThroughputOptions o;
    o.queries = 5000;
    o.rmi_models = 200;
    for (auto s : {Structure::aidel, Structure::btree, Structure::rmi, Structure::binary_search}) {
        const auto r = bench_throughput(s, Workload::lookup, keys50k(), "ln", o);
        EXPECT_EQ(r.ops, 5000u);
        EXPECT_EQ(r.metric("found"), 2500.0) << to_string(s);
        ASSERT_TRUE(r.p50_ns && r.p99_ns);
        EXPECT_LE(*r.p50_ns, *r.p99_ns);
        EXPECT_GT(*r.ops_per_sec, 0.0);
    }
    o.threads = 2;
    const auto par = bench_throughput(Structure::aidel, Workload::lookup, keys50k(), "ln", o);
    EXPECT_EQ(par.metric("found"), 2500.0);
    EXPECT_FALSE(par.p50_ns.has_value());
}

TEST(BenchThroughput, InsertAndRange) {
    ThroughputOptions o;
    o.queries = 500;
    o.rmi_models = 200;
    for (auto s : {Structure::aidel, Structure::btree, Structure::rmi}) {
        const auto r = bench_throughput(s, Workload::insert, keys50k(), "ln", o);
        EXPECT_EQ(r.ops, 5000u);
    }
    for (auto s : {Structure::aidel, Structure::btree, Structure::binary_search}) {
        const auto r = bench_throughput(s, Workload::range, keys50k(), "ln", o);
        EXPECT_EQ(r.ops, 500u);
        EXPECT_GT(*r.metric("keys_returned"), 0.0);
    }
}

TEST(BenchThroughput, Errors) {
    auto code = [](Structure s, Workload w, ThroughputOptions o) {
        try {
            bench_throughput(s, w, keys50k(), "ln", o);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::EmptyInput;
    };
    ThroughputOptions zero;
    zero.load_factor = 0;
    EXPECT_EQ(code(Structure::aidel, Workload::insert, zero), ErrorCode::InvalidArgument);
    ThroughputOptions no_queries;
    no_queries.queries = 0;
    EXPECT_EQ(code(Structure::aidel, Workload::lookup, no_queries), ErrorCode::InvalidArgument);
    EXPECT_EQ(code(Structure::binary_search, Workload::insert, {}), ErrorCode::InvalidArgument);
    EXPECT_EQ(code(Structure::rmi, Workload::range, {}), ErrorCode::InvalidArgument);
}

TEST(BenchThroughput, Definition) {
    EXPECT_EQ(throughput(1000, 0.5), 2000.0);
    EXPECT_EQ(throughput(10, 0.0), 0.0);
}

TEST(BenchStrategies, ErrorProfile) {
    const auto k = test::lognormal_keys(10'000, 82);
    const auto rows = bench_strategies(k, "ln10k", 10);
    double single_err = -1, worst_multi = 0;
    std::size_t lpa_models = 0, equal_models = 0;
    for (const auto& r : rows) {
        const double e = *r.metric("error");
        if (r.structure == "single") single_err = e;
        else worst_multi = std::max(worst_multi, e);
        if (r.structure == "lpa") {
            ++lpa_models;
            EXPECT_LE(e, *r.metric("threshold"));
        }
        if (r.structure == "equal_count") {
            ++equal_models;
            EXPECT_EQ(*r.metric("count"), 1000.0);
        }
    }
    EXPECT_GE(single_err, worst_multi);
    EXPECT_EQ(equal_models, 10u);
    EXPECT_GE(lpa_models, 1u);
    EXPECT_LE(lpa_models, 10u);
    EXPECT_EQ(rows, bench_strategies(k, "ln10k", 10));
}

TEST(BenchCsv, RoundTrip) {
    auto rows = bench_strategies(keys50k(), "lognormal:count=50000,seed=81", 10);
    const std::vector<std::uint64_t> thr{64};
    const std::vector<std::size_t> sizes{100};
    for (auto& r : bench_model_counts(keys50k(), "x", thr, sizes)) rows.push_back(r);
    BenchReport odd;
    odd.structure = "a,b";
    odd.dataset = "say \"hi\"";
    odd.config = "line\nbreak";
    odd.ops = 3;
    odd.p50_ns = 0.1;
    odd.extra = {{"ops_per_sec_extra", -1.5e-300}};
    rows.push_back(odd);

    std::stringstream ss;
    write_csv(ss, rows);
    const auto back = read_csv(ss);
    EXPECT_EQ(back, rows);

    std::stringstream header_only("structure,dataset,config,metric,value\n");
    EXPECT_TRUE(read_csv(header_only).empty());
    std::stringstream bad("a,b\n");
    EXPECT_THROW(read_csv(bad), Error);
}

TEST(Csv, QuotingAndNumbers) {
    std::stringstream ss;
    const std::vector<std::string> row{"plain", "with,comma", "with\"quote"};
    csv::write_row(ss, row);
    EXPECT_EQ(ss.str(), "plain,\"with,comma\",\"with\"\"quote\"\n");
    EXPECT_EQ(csv::read_all(ss), std::vector<std::vector<std::string>>{row});
    for (double v : {0.0, 1.0, 100000.0, 0.1, 1e300, -2.5, 9007199254740993.0}) {
        EXPECT_EQ(csv::parse_double(csv::format_double(v)), v);
    }
    EXPECT_EQ(csv::format_double(100000.0), "100000");
    EXPECT_THROW(csv::parse_double("1x"), Error);
}

}  // namespace
}  // namespace aidel
