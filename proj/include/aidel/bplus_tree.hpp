#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aidel/core.hpp"

namespace aidel {

// In-memory B+-tree of fan-out 128 mapping keys to 64-bit values. Nodes are
// pooled per kind and addressed by 32-bit index.
class BPlusTree {
public:
    static constexpr std::size_t kFanout = 128;
    static constexpr std::size_t kLeafSlots = kFanout;
    static constexpr std::size_t kInnerKeys = kFanout - 1;
    using Value = std::uint64_t;

    BPlusTree();

    // keys strictly ascending; value i defaults to position i.
    static BPlusTree bulk_load(std::span<const Key> keys);
    static BPlusTree bulk_load(std::span<const Key> keys, std::span<const Value> values);

    std::optional<Value> find(Key key) const;
    bool contains(Key key) const { return find(key).has_value(); }
    // False (and no change) when the key exists.
    bool insert(Key key, Value value);
    std::vector<Key> range(Key low, Key high) const;
    std::size_t range_count(Key low, Key high) const;

    std::size_t size() const noexcept { return size_; }
    std::size_t height() const noexcept { return height_ + 1; }
    std::size_t inner_nodes() const noexcept { return inners_.size(); }
    std::size_t leaf_nodes() const noexcept { return leaves_.size(); }
    std::uint64_t inner_bytes() const noexcept { return inners_.size() * sizeof(Inner); }
    std::uint64_t leaf_bytes() const noexcept { return leaves_.size() * sizeof(Leaf); }

    std::vector<Key> keys_in_order() const;

    // Empty string when sorted, linked, balanced and within occupancy bounds.
    std::string check_invariants() const;

private:
    static constexpr std::uint32_t kNone = ~std::uint32_t{0};

    struct Leaf {
        std::uint32_t count = 0;
        std::uint32_t next = kNone;
        Key keys[kLeafSlots];
        Value values[kLeafSlots];
    };
    struct Inner {
        std::uint32_t count = 0;  // number of separator keys
        Key keys[kInnerKeys];
        std::uint32_t children[kFanout];
    };

    std::uint32_t find_leaf(Key key) const noexcept;
    std::uint32_t new_leaf();
    std::uint32_t new_inner();
    std::string check_node(std::uint32_t node, std::size_t depth, std::optional<Key> lo,
                           std::optional<Key> hi, bool is_root) const;

    std::vector<Leaf> leaves_;
    std::vector<Inner> inners_;
    std::uint32_t root_ = 0;
    std::size_t height_ = 0;  // inner levels above the leaves
    std::size_t size_ = 0;
};

}  // namespace aidel
