#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "aidel/datagen.hpp"

namespace aidel {
namespace {

namespace fs = std::filesystem;

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("aidel_datagen_test_" + std::to_string(::getpid()) + "_" + name);
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvalidArgument;
}

bool strictly_ascending(const std::vector<Key>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] <= v[i - 1]) return false;
    }
    return true;
}

TEST(DatasetSpec, ParseAndPrint) {
    const auto s = DatasetSpec::parse("lognormal:count=5000,seed=7,mu=0.125,sigma=1.5,exact=1");
    EXPECT_EQ(s.kind, DatasetSpec::Kind::lognormal);
    EXPECT_EQ(s.count, 5000u);
    EXPECT_EQ(s.seed, 7u);
    EXPECT_EQ(s.mu, 0.125);
    EXPECT_EQ(s.sigma, 1.5);
    EXPECT_TRUE(s.exact);
    const auto again = DatasetSpec::parse(s.to_string());
    EXPECT_EQ(generate(again), generate(s));

    EXPECT_EQ(DatasetSpec::parse("sequential:count=3").to_string(), "sequential:count=3");
    EXPECT_EQ(DatasetSpec::parse("lognormal").count, 1'000'000u);
}

TEST(DatasetSpec, RejectsBadText) {
    for (const char* bad : {"uniform", "lognormal:count", "lognormal:count=abc", "lognormal:count=0",
                            "lognormal:sigma=0", "lognormal:color=red", "file", "lognormal:exact=maybe"}) {
        EXPECT_EQ(code_of([&] { DatasetSpec::parse(bad); }), ErrorCode::InvalidSpec) << bad;
    }
}

TEST(Generate, Sequential) {
    const auto k = generate(DatasetSpec::parse("sequential:count=5"));
    EXPECT_EQ(k, (std::vector<Key>{1, 2, 3, 4, 5}));
}

TEST(Generate, TwoSlope) {
    const auto a = generate(DatasetSpec::parse("two_slope:count=10000,seed=3"));
    EXPECT_EQ(a.size(), 10000u);
    EXPECT_TRUE(strictly_ascending(a));
    EXPECT_EQ(a, generate(DatasetSpec::parse("two_slope:count=10000,seed=3")));
    std::size_t wide = 0;
    for (std::size_t i = 1; i < a.size(); ++i) wide += a[i] - a[i - 1] >= 500;
    EXPECT_GT(wide, 1000u);
}

TEST(Generate, LognormalShape) {
    const auto spec = DatasetSpec::parse("lognormal:count=100000,seed=9");
    const auto a = generate(spec);
    EXPECT_TRUE(strictly_ascending(a));
    EXPECT_EQ(a.back(), 1'000'000'000u);
    EXPECT_LE(a.size(), 100'000u);
    EXPECT_GT(a.size(), 50'000u);
    EXPECT_EQ(a, generate(spec));
    EXPECT_NE(a, generate(DatasetSpec::parse("lognormal:count=100000,seed=10")));
    // Heavy left skew: the median key sits far below the midpoint of the range.
    EXPECT_LT(a[a.size() / 2], 10'000'000u);
}

TEST(Generate, LognormalExactCount) {
    const auto a = generate(DatasetSpec::parse("lognormal:count=100000,seed=9,exact=1"));
    EXPECT_EQ(a.size(), 100'000u);
    EXPECT_TRUE(strictly_ascending(a));
    EXPECT_EQ(a.back(), 1'000'000'000u);
    EXPECT_EQ(code_of([] { generate(DatasetSpec::parse("lognormal:count=100,scale=10,exact=1")); }),
              ErrorCode::InvalidSpec);
}

TEST(KeyFile, RoundTripAndOrder) {
    const auto p = temp_file("keys.bin");
    const std::vector<Key> keys{5, 1, 0xFFFFFFFFFFFFFFFFULL, 1, 300};
    save_keys(p, keys);
    EXPECT_EQ(fs::file_size(p), 40u);
    EXPECT_EQ(read_key_file(p), keys);
    EXPECT_EQ(load_keys(p), (std::vector<Key>{1, 5, 300, 0xFFFFFFFFFFFFFFFFULL}));
    const auto spec = DatasetSpec::parse("file:path=" + p.string());
    EXPECT_EQ(generate(spec), load_keys(p));

    std::ifstream in(p, std::ios::binary);
    unsigned char first[8];
    in.read(reinterpret_cast<char*>(first), 8);
    EXPECT_EQ(first[0], 5);
    for (int b = 1; b < 8; ++b) EXPECT_EQ(first[b], 0);
    fs::remove(p);
}

TEST(KeyFile, BadFiles) {
    const auto empty = temp_file("empty.bin");
    { std::ofstream(empty, std::ios::binary); }
    EXPECT_EQ(code_of([&] { read_key_file(empty); }), ErrorCode::FileFormat);
    const auto ragged = temp_file("ragged.bin");
    {
        std::ofstream out(ragged, std::ios::binary);
        out.write("123456789", 9);
    }
    EXPECT_EQ(code_of([&] { read_key_file(ragged); }), ErrorCode::FileFormat);
    EXPECT_EQ(code_of([&] { read_key_file(temp_file("missing.bin")); }), ErrorCode::Io);
    fs::remove(empty);
    fs::remove(ragged);
}

}  // namespace
}  // namespace aidel
