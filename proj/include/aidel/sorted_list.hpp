#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "aidel/core.hpp"

namespace aidel {

inline constexpr std::size_t kCacheLine = 64;
inline constexpr std::size_t kNodeKeys = 6;
inline constexpr std::uint64_t kNoNode = ~std::uint64_t{0};

// One cache line: six keys, an occupancy count and the index of the next node.
struct alignas(kCacheLine) OverflowNode {
    std::array<Key, kNodeKeys> keys{};
    std::uint64_t count = 0;
    std::uint64_t next = kNoNode;
};
static_assert(sizeof(OverflowNode) == kCacheLine);

// Sorted chains of OverflowNode hung off anchors 0..n_anchors-1. Every chain is
// ascending across its nodes. Nodes live in one pool and are addressed by index.
class OverflowStore {
public:
    OverflowStore() = default;
    explicit OverflowStore(std::size_t n_anchors) : heads_(n_anchors, kNoHead) {}

    std::size_t anchors() const noexcept { return heads_.size(); }
    bool has_chain(std::size_t anchor) const noexcept { return heads_[anchor] != kNoHead; }

    // Slot of the key within the chain, counting from its first key.
    std::optional<std::uint32_t> find(std::size_t anchor, Key key) const noexcept;

    // False when the key is already in the chain.
    bool insert(std::size_t anchor, Key key);

    // Appends a key larger than everything in the chain; used when rebuilding.
    void append(std::size_t anchor, Key key);

    std::size_t chain_nodes(std::size_t anchor) const noexcept;
    std::size_t chain_size(std::size_t anchor) const noexcept;

    template <typename F>
    void for_each(std::size_t anchor, F&& fn) const {
        if (heads_[anchor] == kNoHead) return;
        for (std::uint64_t n = heads_[anchor]; n != kNoNode; n = nodes_[n].next) {
            const auto& node = nodes_[n];
            for (std::uint64_t s = 0; s < node.count; ++s) fn(node.keys[s]);
        }
    }

    std::vector<Key> keys(std::size_t anchor) const;

    std::uint64_t total_keys() const noexcept { return total_keys_; }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t longest_chain_nodes() const noexcept { return longest_chain_; }
    std::size_t bytes() const noexcept {
        return nodes_.size() * sizeof(OverflowNode) + heads_.size() * sizeof(std::uint32_t);
    }

private:
    static constexpr std::uint32_t kNoHead = ~std::uint32_t{0};

    std::uint64_t allocate();
    void note_chain_growth(std::size_t anchor);

    std::vector<OverflowNode> nodes_;
    std::vector<std::uint32_t> heads_;
    std::uint64_t total_keys_ = 0;
    std::size_t longest_chain_ = 0;
};

}  // namespace aidel
