#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "aidel/bplus_tree.hpp"
#include "aidel/core.hpp"
#include "aidel/index.hpp"
#include "aidel/lpa.hpp"

namespace aidel {

struct RmiConfig {
    std::size_t models = 10'000;
    std::uint64_t threshold = 64;
    // Delta buffer capacity as a fraction of the build size; overflowing it
    // rebuilds the whole structure.
    double delta_fraction = 0.05;
    Exec exec = Exec::serial;

    void validate() const;
};

// Two-stage recursive model index: a linear root picks one of M linear leaf
// models by floor(M * f1(x) / N). Leaf models whose error exceeds the
// threshold are backed by a B+-tree over their subdataset.
class RmiIndex {
public:
    static RmiIndex build(std::span<const Key> keys, const RmiConfig& config);

    // Leaf model chosen for a key.
    std::size_t select_model(Key key) const noexcept;

    bool contains(Key key) const;
    InsertResult insert(Key key);

    std::size_t model_count() const noexcept { return leaf_models_.size(); }
    std::size_t invalid_count() const noexcept;
    std::size_t count_exceeding(std::uint64_t threshold) const noexcept;
    std::size_t rebuilds() const noexcept { return rebuilds_; }

    const LinearModel& root_model() const noexcept { return root_; }
    const std::vector<LinearModel>& leaf_models() const noexcept { return leaf_models_; }
    const std::vector<bool>& valid() const noexcept { return valid_; }
    // Subdataset j is data()[bounds()[j], bounds()[j + 1]).
    const std::vector<Position>& bounds() const noexcept { return bounds_; }
    const std::vector<Key>& data() const noexcept { return data_; }
    const std::vector<Key>& delta() const noexcept { return delta_; }
    std::size_t delta_capacity() const noexcept { return delta_capacity_; }
    std::uint64_t size() const noexcept { return data_.size() + delta_.size(); }

    // Root + leaf parameters + validity flags + fallback-tree inner nodes.
    std::uint64_t metadata_bytes() const noexcept;

private:
    void train();

    RmiConfig config_;
    std::vector<Key> data_;
    LinearModel root_;
    std::vector<LinearModel> leaf_models_;
    std::vector<bool> valid_;
    std::vector<Position> bounds_;
    std::vector<std::unique_ptr<BPlusTree>> fallback_;
    std::vector<Key> delta_;
    std::size_t delta_capacity_ = 1;
    std::size_t rebuilds_ = 0;
};

// Leaf choice by normalization, exposed for oracles: floor(M * f1(x) / N) clamped to [0, M - 1].
std::size_t rmi_select(const LinearModel& root, Key key, std::size_t models, std::uint64_t n) noexcept;

// M contiguous subdatasets of (nearly) equal size, each least-squares fit with
// errors over the full array. Sizes differ by at most one record.
std::vector<Segment> equal_count_build(std::span<const Key> keys, std::size_t models,
                                       Exec exec = Exec::serial);

// Sorted array with plain binary search over the whole key set.
class BinarySearchIndex {
public:
    explicit BinarySearchIndex(std::vector<Key> keys);
    bool contains(Key key) const noexcept;
    std::size_t size() const noexcept { return keys_.size(); }

private:
    std::vector<Key> keys_;
};

}  // namespace aidel
