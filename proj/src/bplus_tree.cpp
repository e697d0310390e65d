#include "aidel/bplus_tree.hpp"

#include <algorithm>
#include <array>

namespace aidel {

BPlusTree::BPlusTree() { root_ = new_leaf(); }

std::uint32_t BPlusTree::new_leaf() {
    leaves_.emplace_back();
    return static_cast<std::uint32_t>(leaves_.size() - 1);
}

std::uint32_t BPlusTree::new_inner() {
    inners_.emplace_back();
    return static_cast<std::uint32_t>(inners_.size() - 1);
}

BPlusTree BPlusTree::bulk_load(std::span<const Key> keys) {
    std::vector<Value> values(keys.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = i;
    return bulk_load(keys, values);
}

BPlusTree BPlusTree::bulk_load(std::span<const Key> keys, std::span<const Value> values) {
    if (keys.size() != values.size())
        throw Error(ErrorCode::InvalidArgument, "bulk_load: key/value count mismatch");
    for (std::size_t i = 1; i < keys.size(); ++i) {
        if (keys[i] <= keys[i - 1]) throw Error(ErrorCode::UnsortedInput, "bulk_load: keys not ascending");
    }
    BPlusTree t;
    if (keys.empty()) return t;
    t.leaves_.clear();

    // Spread entries evenly so every non-root node is at least half full.
    auto spread = [](std::size_t n, std::size_t cap) {
        const std::size_t groups = (n + cap - 1) / cap;
        std::vector<std::size_t> sizes(groups, n / groups);
        for (std::size_t g = 0; g < n % groups; ++g) ++sizes[g];
        return sizes;
    };

    std::vector<std::uint32_t> level;
    std::vector<Key> level_min;
    std::size_t at = 0;
    for (std::size_t sz : spread(keys.size(), kLeafSlots)) {
        const auto id = t.new_leaf();
        auto& leaf = t.leaves_[id];
        leaf.count = static_cast<std::uint32_t>(sz);
        std::copy_n(keys.begin() + at, sz, leaf.keys);
        std::copy_n(values.begin() + at, sz, leaf.values);
        if (!level.empty()) t.leaves_[level.back()].next = id;
        level.push_back(id);
        level_min.push_back(keys[at]);
        at += sz;
    }

    t.height_ = 0;
    while (level.size() > 1) {
        std::vector<std::uint32_t> up;
        std::vector<Key> up_min;
        std::size_t c = 0;
        for (std::size_t sz : spread(level.size(), kFanout)) {
            const auto id = t.new_inner();
            auto& node = t.inners_[id];
            node.count = static_cast<std::uint32_t>(sz - 1);
            for (std::size_t i = 0; i < sz; ++i) {
                node.children[i] = level[c + i];
                if (i > 0) node.keys[i - 1] = level_min[c + i];
            }
            up.push_back(id);
            up_min.push_back(level_min[c]);
            c += sz;
        }
        level = std::move(up);
        level_min = std::move(up_min);
        ++t.height_;
    }
    t.root_ = level.front();
    t.size_ = keys.size();
    return t;
}

std::uint32_t BPlusTree::find_leaf(Key key) const noexcept {
    std::uint32_t node = root_;
    for (std::size_t d = 0; d < height_; ++d) {
        const auto& in = inners_[node];
        const auto slot = std::upper_bound(in.keys, in.keys + in.count, key) - in.keys;
        node = in.children[slot];
    }
    return node;
}

std::optional<BPlusTree::Value> BPlusTree::find(Key key) const {
    const auto& leaf = leaves_[find_leaf(key)];
    const Key* it = std::lower_bound(leaf.keys, leaf.keys + leaf.count, key);
    if (it != leaf.keys + leaf.count && *it == key) return leaf.values[it - leaf.keys];
    return std::nullopt;
}

bool BPlusTree::insert(Key key, Value value) {
    // Descend, remembering the path for split propagation.
    std::array<std::pair<std::uint32_t, std::size_t>, 64> path{};
    std::uint32_t node = root_;
    for (std::size_t d = 0; d < height_; ++d) {
        const auto& in = inners_[node];
        const auto slot = static_cast<std::size_t>(std::upper_bound(in.keys, in.keys + in.count, key) - in.keys);
        path[d] = {node, slot};
        node = in.children[slot];
    }

    std::size_t pos;
    {
        auto& leaf = leaves_[node];
        const Key* it = std::lower_bound(leaf.keys, leaf.keys + leaf.count, key);
        pos = static_cast<std::size_t>(it - leaf.keys);
        if (pos < leaf.count && leaf.keys[pos] == key) return false;
        if (leaf.count < kLeafSlots) {
            std::copy_backward(leaf.keys + pos, leaf.keys + leaf.count, leaf.keys + leaf.count + 1);
            std::copy_backward(leaf.values + pos, leaf.values + leaf.count, leaf.values + leaf.count + 1);
            leaf.keys[pos] = key;
            leaf.values[pos] = value;
            ++leaf.count;
            ++size_;
            return true;
        }
    }

    // Split the full leaf: 129 entries become 64 + 65.
    const auto right_id = new_leaf();
    auto& left = leaves_[node];
    auto& right = leaves_[right_id];
    std::array<Key, kLeafSlots + 1> ks;
    std::array<Value, kLeafSlots + 1> vs;
    std::copy_n(left.keys, pos, ks.begin());
    std::copy_n(left.values, pos, vs.begin());
    ks[pos] = key;
    vs[pos] = value;
    std::copy(left.keys + pos, left.keys + kLeafSlots, ks.begin() + pos + 1);
    std::copy(left.values + pos, left.values + kLeafSlots, vs.begin() + pos + 1);
    constexpr std::size_t keep = (kLeafSlots + 1) / 2;
    std::copy_n(ks.begin(), keep, left.keys);
    std::copy_n(vs.begin(), keep, left.values);
    std::copy(ks.begin() + keep, ks.end(), right.keys);
    std::copy(vs.begin() + keep, vs.end(), right.values);
    left.count = keep;
    right.count = static_cast<std::uint32_t>(kLeafSlots + 1 - keep);
    right.next = left.next;
    left.next = right_id;
    ++size_;

    Key separator = right.keys[0];
    std::uint32_t new_child = right_id;

    for (std::size_t d = height_; d-- > 0;) {
        const auto [parent_id, slot] = path[d];
        {
            auto& parent = inners_[parent_id];
            if (parent.count < kInnerKeys) {
                std::copy_backward(parent.keys + slot, parent.keys + parent.count, parent.keys + parent.count + 1);
                std::copy_backward(parent.children + slot + 1, parent.children + parent.count + 1,
                                   parent.children + parent.count + 2);
                parent.keys[slot] = separator;
                parent.children[slot + 1] = new_child;
                ++parent.count;
                return true;
            }
        }
        // 128 keys / 129 children: left keeps 64 keys, one moves up, right takes 63.
        std::array<Key, kInnerKeys + 1> ks2;
        std::array<std::uint32_t, kFanout + 1> cs;
        {
            const auto& parent = inners_[parent_id];
            std::copy_n(parent.keys, slot, ks2.begin());
            ks2[slot] = separator;
            std::copy(parent.keys + slot, parent.keys + kInnerKeys, ks2.begin() + slot + 1);
            std::copy_n(parent.children, slot + 1, cs.begin());
            cs[slot + 1] = new_child;
            std::copy(parent.children + slot + 1, parent.children + kFanout, cs.begin() + slot + 2);
        }
        const auto sibling_id = new_inner();
        auto& parent = inners_[parent_id];
        auto& sibling = inners_[sibling_id];
        constexpr std::size_t left_keys = (kInnerKeys + 1) / 2;
        std::copy_n(ks2.begin(), left_keys, parent.keys);
        std::copy_n(cs.begin(), left_keys + 1, parent.children);
        parent.count = left_keys;
        separator = ks2[left_keys];
        std::copy(ks2.begin() + left_keys + 1, ks2.end(), sibling.keys);
        std::copy(cs.begin() + left_keys + 1, cs.end(), sibling.children);
        sibling.count = static_cast<std::uint32_t>(kInnerKeys - left_keys);
        new_child = sibling_id;
    }

    const auto root_id = new_inner();
    auto& root = inners_[root_id];
    root.count = 1;
    root.keys[0] = separator;
    root.children[0] = root_;
    root.children[1] = new_child;
    root_ = root_id;
    ++height_;
    return true;
}

std::vector<Key> BPlusTree::range(Key low, Key high) const {
    if (low > high) throw Error(ErrorCode::InvalidRange, "low > high");
    std::vector<Key> out;
    std::uint32_t id = find_leaf(low);
    const Key* first = std::lower_bound(leaves_[id].keys, leaves_[id].keys + leaves_[id].count, low);
    std::size_t i = static_cast<std::size_t>(first - leaves_[id].keys);
    while (id != kNone) {
        const auto& leaf = leaves_[id];
        for (; i < leaf.count; ++i) {
            if (leaf.keys[i] > high) return out;
            out.push_back(leaf.keys[i]);
        }
        id = leaf.next;
        i = 0;
    }
    return out;
}

std::size_t BPlusTree::range_count(Key low, Key high) const {
    if (low > high) throw Error(ErrorCode::InvalidRange, "low > high");
    std::size_t n = 0;
    std::uint32_t id = find_leaf(low);
    const Key* first = std::lower_bound(leaves_[id].keys, leaves_[id].keys + leaves_[id].count, low);
    std::size_t i = static_cast<std::size_t>(first - leaves_[id].keys);
    while (id != kNone) {
        const auto& leaf = leaves_[id];
        for (; i < leaf.count; ++i) {
            if (leaf.keys[i] > high) return n;
            ++n;
        }
        id = leaf.next;
        i = 0;
    }
    return n;
}

std::vector<Key> BPlusTree::keys_in_order() const {
    std::vector<Key> out;
    out.reserve(size_);
    std::uint32_t id = root_;
    for (std::size_t d = 0; d < height_; ++d) id = inners_[id].children[0];
    for (; id != kNone; id = leaves_[id].next)
        out.insert(out.end(), leaves_[id].keys, leaves_[id].keys + leaves_[id].count);
    return out;
}

std::string BPlusTree::check_node(std::uint32_t node, std::size_t depth, std::optional<Key> lo,
                                  std::optional<Key> hi, bool is_root) const {
    auto in_bounds = [&](Key k) { return (!lo || k >= *lo) && (!hi || k < *hi); };
    if (depth == height_) {
        const auto& leaf = leaves_[node];
        if (leaf.count > kLeafSlots) return "leaf over capacity";
        if (!is_root && leaf.count < kLeafSlots / 2) return "leaf under half full";
        for (std::size_t i = 0; i < leaf.count; ++i) {
            if (!in_bounds(leaf.keys[i])) return "leaf key outside separator bounds";
            if (i > 0 && leaf.keys[i] <= leaf.keys[i - 1]) return "leaf keys not ascending";
        }
        return {};
    }
    const auto& in = inners_[node];
    if (in.count > kInnerKeys) return "inner over capacity";
    if (in.count < 1) return "inner node without separators";
    if (!is_root && in.count + 1 < kFanout / 2) return "inner under half full";
    for (std::size_t i = 0; i < in.count; ++i) {
        if (!in_bounds(in.keys[i])) return "separator outside parent bounds";
        if (i > 0 && in.keys[i] <= in.keys[i - 1]) return "separators not ascending";
    }
    for (std::size_t c = 0; c <= in.count; ++c) {
        const std::optional<Key> clo = c == 0 ? lo : std::optional<Key>(in.keys[c - 1]);
        const std::optional<Key> chi = c == in.count ? hi : std::optional<Key>(in.keys[c]);
        auto err = check_node(in.children[c], depth + 1, clo, chi, false);
        if (!err.empty()) return err;
    }
    return {};
}

std::string BPlusTree::check_invariants() const {
    auto err = check_node(root_, 0, std::nullopt, std::nullopt, true);
    if (!err.empty()) return err;
    const auto keys = keys_in_order();
    if (keys.size() != size_) return "leaf chain size mismatch";
    for (std::size_t i = 1; i < keys.size(); ++i) {
        if (keys[i] <= keys[i - 1]) return "leaf chain not ascending";
    }
    return {};
}

}  // namespace aidel
