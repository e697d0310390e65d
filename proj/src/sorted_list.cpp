#include "aidel/sorted_list.hpp"

#include <algorithm>

namespace aidel {

std::uint64_t OverflowStore::allocate() {
    if (nodes_.size() >= kNoHead) throw Error(ErrorCode::InvalidArgument, "overflow pool exhausted");
    nodes_.emplace_back();
    return nodes_.size() - 1;
}

void OverflowStore::note_chain_growth(std::size_t anchor) {
    longest_chain_ = std::max(longest_chain_, chain_nodes(anchor));
}

std::optional<std::uint32_t> OverflowStore::find(std::size_t anchor, Key key) const noexcept {
    if (heads_[anchor] == kNoHead) return std::nullopt;
    std::uint32_t seen = 0;
    for (std::uint64_t n = heads_[anchor]; n != kNoNode; n = nodes_[n].next) {
        const auto& node = nodes_[n];
        const Key* first = node.keys.data();
        const Key* last = first + node.count;
        if (node.count > 0 && key > last[-1]) {
            seen += static_cast<std::uint32_t>(node.count);
            continue;
        }
        const Key* it = std::lower_bound(first, last, key);
        if (it != last && *it == key) return seen + static_cast<std::uint32_t>(it - first);
        return std::nullopt;
    }
    return std::nullopt;
}

bool OverflowStore::insert(std::size_t anchor, Key key) {
    if (heads_[anchor] == kNoHead) {
        const auto idx = allocate();
        nodes_[idx].keys[0] = key;
        nodes_[idx].count = 1;
        heads_[anchor] = static_cast<std::uint32_t>(idx);
        ++total_keys_;
        note_chain_growth(anchor);
        return true;
    }

    std::uint64_t n = heads_[anchor];
    while (nodes_[n].next != kNoNode && key > nodes_[n].keys[nodes_[n].count - 1]) n = nodes_[n].next;

    {
        auto& node = nodes_[n];
        Key* first = node.keys.data();
        Key* last = first + node.count;
        Key* it = std::lower_bound(first, last, key);
        if (it != last && *it == key) return false;

        if (node.count < kNodeKeys) {
            std::copy_backward(it, last, last + 1);
            *it = key;
            ++node.count;
            ++total_keys_;
            return true;
        }
    }

    const auto pos = static_cast<std::size_t>(
        std::lower_bound(nodes_[n].keys.begin(), nodes_[n].keys.end(), key) - nodes_[n].keys.begin());
    const auto fresh = allocate();
    auto& node = nodes_[n];
    auto& next = nodes_[fresh];
    next.next = node.next;
    node.next = fresh;

    if (pos == kNodeKeys) {
        // Appending past a full node: start a new one instead of splitting.
        next.keys[0] = key;
        next.count = 1;
    } else {
        constexpr std::size_t keep = kNodeKeys / 2;
        std::copy(node.keys.begin() + keep, node.keys.end(), next.keys.begin());
        next.count = kNodeKeys - keep;
        node.count = keep;
        auto& target = pos <= keep ? node : next;
        const std::size_t at = pos <= keep ? pos : pos - keep;
        std::copy_backward(target.keys.begin() + at, target.keys.begin() + target.count,
                           target.keys.begin() + target.count + 1);
        target.keys[at] = key;
        ++target.count;
    }
    ++total_keys_;
    note_chain_growth(anchor);
    return true;
}

void OverflowStore::append(std::size_t anchor, Key key) {
    if (heads_[anchor] == kNoHead) {
        insert(anchor, key);
        return;
    }
    std::uint64_t n = heads_[anchor];
    while (nodes_[n].next != kNoNode) n = nodes_[n].next;
    if (nodes_[n].count < kNodeKeys) {
        nodes_[n].keys[nodes_[n].count++] = key;
        ++total_keys_;
        return;
    }
    const auto fresh = allocate();
    nodes_[n].next = fresh;
    nodes_[fresh].keys[0] = key;
    nodes_[fresh].count = 1;
    ++total_keys_;
    note_chain_growth(anchor);
}

std::size_t OverflowStore::chain_nodes(std::size_t anchor) const noexcept {
    std::size_t c = 0;
    if (heads_[anchor] == kNoHead) return 0;
    for (std::uint64_t n = heads_[anchor]; n != kNoNode; n = nodes_[n].next) ++c;
    return c;
}

std::size_t OverflowStore::chain_size(std::size_t anchor) const noexcept {
    std::size_t c = 0;
    if (heads_[anchor] == kNoHead) return 0;
    for (std::uint64_t n = heads_[anchor]; n != kNoNode; n = nodes_[n].next) c += nodes_[n].count;
    return c;
}

std::vector<Key> OverflowStore::keys(std::size_t anchor) const {
    std::vector<Key> out;
    for_each(anchor, [&](Key k) { out.push_back(k); });
    return out;
}

}  // namespace aidel
