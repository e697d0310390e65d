#include "aidel/index.hpp"

#include <algorithm>
#include <string>

namespace aidel {

PartitionedIndex AidelIndex::partition(std::size_t shards) const {
    if (shards == 0) throw Error(ErrorCode::InvalidConfig, "shard count must be >= 1");
    if (shards > segments_.size())
        throw Error(ErrorCode::TooManyShards, std::to_string(shards) + " shards for " +
                                                  std::to_string(segments_.size()) + " segments");

    // Balance by records held, overflow included.
    const std::size_t n_seg = segments_.size();
    std::vector<std::uint64_t> cumulative(n_seg + 1, 0);
    for (std::size_t s = 0; s < n_seg; ++s) {
        std::uint64_t w = segments_[s].len;
        for (Position p = segments_[s].start; p < segments_[s].end(); ++p) w += overflow_.chain_size(p);
        if (s == 0) w += overflow_.chain_size(head_slot());
        cumulative[s + 1] = cumulative[s] + w;
    }
    const std::uint64_t total = cumulative.back();

    std::vector<AidelIndex> parts;
    std::vector<Key> router;
    std::size_t begin = 0;
    for (std::size_t g = 0; g < shards; ++g) {
        std::size_t end = n_seg;
        if (g + 1 < shards) {
            const auto target = static_cast<std::uint64_t>(
                static_cast<long double>(total) * static_cast<long double>(g + 1) / shards);
            end = static_cast<std::size_t>(
                std::lower_bound(cumulative.begin() + begin + 1, cumulative.end(), target) -
                cumulative.begin());
            end = std::clamp(end, begin + 1, n_seg - (shards - g - 1));
        }

        const Position lo = segments_[begin].start;
        const Position hi = segments_[end - 1].end();
        std::vector<Key> keys(data_.begin() + lo, data_.begin() + hi);
        std::vector<Segment> segs(segments_.begin() + begin, segments_.begin() + end);
        for (auto& s : segs) s.start -= lo;

        std::vector<OverflowChain> chains;
        if (g == 0 && overflow_.has_chain(head_slot()))
            chains.push_back({kHeadAnchor, overflow_.keys(head_slot())});
        for (Position p = lo; p < hi; ++p) {
            if (overflow_.has_chain(p)) chains.push_back({p - lo, overflow_.keys(p)});
        }

        router.push_back(keys.front());
        parts.push_back(from_parts(std::move(keys), std::move(segs), config_, chains));
        begin = end;
    }
    return PartitionedIndex(std::move(parts), std::move(router));
}

PartitionedIndex::PartitionedIndex(std::vector<AidelIndex> shards, std::vector<Key> router)
    : shards_(std::move(shards)), router_(std::move(router)) {
    if (shards_.empty() || shards_.size() != router_.size())
        throw Error(ErrorCode::InvalidArgument, "router and shard list disagree");
}

std::size_t PartitionedIndex::shard_for(Key key) const noexcept {
    const auto it = std::upper_bound(router_.begin(), router_.end(), key);
    return it == router_.begin() ? 0 : static_cast<std::size_t>(it - router_.begin()) - 1;
}

PartitionedIndex::Routed PartitionedIndex::lookup(Key key) const {
    const std::size_t s = shard_for(key);
    return {s, shards_[s].lookup(key)};
}

InsertResult PartitionedIndex::insert(Key key) { return shards_[shard_for(key)].insert(key); }

std::vector<Key> PartitionedIndex::range_query(Key low, Key high) const {
    if (low > high) throw Error(ErrorCode::InvalidRange, "low > high");
    std::vector<Key> out;
    for (std::size_t s = shard_for(low); s < shards_.size(); ++s) {
        if (s > shard_for(low) && router_[s] > high) break;
        auto part = shards_[s].range_query(low, high);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

std::uint64_t PartitionedIndex::size() const noexcept {
    std::uint64_t n = 0;
    for (const auto& s : shards_) n += s.size();
    return n;
}

}  // namespace aidel
