#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aidel/core.hpp"
#include "aidel/lpa.hpp"
#include "aidel/sorted_list.hpp"

namespace aidel {

struct IndexConfig {
    LpaConfig lpa;
    // should_retrain() fires when any chain is longer than this many nodes...
    std::uint64_t max_chain_nodes = 4;
    // ...or when overflow keys reach this fraction of the trained data.
    double max_overflow_ratio = 1.0;

    void validate() const;

    friend bool operator==(const IndexConfig&, const IndexConfig&) = default;
};

// Anchor of keys smaller than every trained key.
inline constexpr Position kHeadAnchor = ~Position{0};

struct LookupResult {
    enum class Kind : std::uint8_t { data, overflow, absent };

    Kind kind = Kind::absent;
    // data: the key's position. overflow/absent: the anchor, i.e. the position
    // of the greatest trained key below the lookup key, or kHeadAnchor.
    Position position = kHeadAnchor;
    // overflow: index of the key within the anchor's chain.
    std::uint32_t slot = 0;

    bool found() const noexcept { return kind != Kind::absent; }

    friend bool operator==(const LookupResult&, const LookupResult&) = default;
};

enum class InsertResult : std::uint8_t { inserted, duplicate };

struct RetrainReport {
    std::uint64_t merged_records = 0;  // records walked by the in-order merge
    std::uint64_t segments_retrained = 0;
    std::uint64_t segments_before = 0;
    std::uint64_t segments_after = 0;
};

class PartitionedIndex;

// Two-stage learned index: a directory of independent linear segments over a
// dense sorted key array, with sorted overflow chains absorbing inserts.
//
// Segment models are stored in their own frame (they predict an offset within
// the segment), so a segment can move inside the array or between shards by
// updating `start` alone.
//
// Readers may run concurrently; insert, retrain and partition need exclusive
// access.
class AidelIndex {
public:
    AidelIndex() = default;

    // keys: strictly ascending, non-empty.
    static AidelIndex build(std::span<const Key> keys, const IndexConfig& config = {});

    // Reassembles an index from its parts; segments are in relative frame and
    // must tile the keys. Overflow is given as (anchor, ascending keys) pairs.
    struct OverflowChain {
        Position anchor;
        std::vector<Key> keys;
    };
    static AidelIndex from_parts(std::vector<Key> keys, std::vector<Segment> segments,
                                 const IndexConfig& config, std::span<const OverflowChain> overflow);

    LookupResult lookup(Key key) const;
    bool contains(Key key) const { return lookup(key).found(); }
    InsertResult insert(Key key);

    // All keys in [low, high], ascending. Throws InvalidRange when low > high.
    std::vector<Key> range_query(Key low, Key high) const;
    std::size_t range_count(Key low, Key high) const;

    RetrainReport retrain_all();
    // Retrains the segments whose first keys are listed; throws UnknownSegment.
    RetrainReport retrain_partial(std::span<const Key> segment_first_keys);

    bool should_retrain() const noexcept;

    PartitionedIndex partition(std::size_t shards) const;

    // Index of the segment a key routes to; keys below the minimum route to 0.
    std::size_t segment_for(Key key) const noexcept;

    const std::vector<Key>& data() const noexcept { return data_; }
    const std::vector<Segment>& segments() const noexcept { return segments_; }
    const IndexConfig& config() const noexcept { return config_; }
    const OverflowStore& overflow() const noexcept { return overflow_; }

    std::uint64_t trained_size() const noexcept { return data_.size(); }
    std::uint64_t overflow_size() const noexcept { return overflow_.total_keys(); }
    std::uint64_t size() const noexcept { return trained_size() + overflow_size(); }
    std::uint64_t inserts_since_train() const noexcept { return inserts_since_train_; }
    std::size_t longest_chain_nodes() const noexcept { return overflow_.longest_chain_nodes(); }

    // Directory plus model parameters.
    std::uint64_t metadata_bytes() const noexcept;
    static constexpr std::uint64_t kSegmentEntryBytes = sizeof(Key) + sizeof(Segment);

    // Every key in ascending order: head chain, then each data key followed by its chain.
    template <typename F>
    void for_each(F&& fn) const {
        overflow_.for_each(head_slot(), fn);
        for (std::size_t p = 0; p < data_.size(); ++p) {
            fn(data_[p]);
            overflow_.for_each(p, fn);
        }
    }
    std::vector<Key> all_keys() const;

    // Overflow chains as (anchor, keys) pairs, head chain first.
    std::vector<OverflowChain> overflow_chains() const;

private:
    struct Locate {
        bool in_data;
        Position position;  // data hit, or the anchor
    };

    Locate locate(Key key) const noexcept;
    std::size_t head_slot() const noexcept { return data_.size(); }
    std::size_t anchor_slot(Position anchor) const noexcept {
        return anchor == kHeadAnchor ? head_slot() : static_cast<std::size_t>(anchor);
    }
    void rebuild_directory();

    IndexConfig config_;
    std::vector<Key> data_;
    std::vector<Segment> segments_;
    std::vector<Key> directory_;  // first_key of each segment
    // Anchors 0..n-1 follow data positions; anchor n is the head chain.
    OverflowStore overflow_;
    std::uint64_t inserts_since_train_ = 0;
};

// Shards over contiguous key ranges, split at segment boundaries.
class PartitionedIndex {
public:
    PartitionedIndex(std::vector<AidelIndex> shards, std::vector<Key> router);

    struct Routed {
        std::size_t shard;
        LookupResult result;
    };

    std::size_t shard_for(Key key) const noexcept;
    Routed lookup(Key key) const;
    bool contains(Key key) const { return lookup(key).result.found(); }
    InsertResult insert(Key key);
    std::vector<Key> range_query(Key low, Key high) const;

    const std::vector<AidelIndex>& shards() const noexcept { return shards_; }
    const std::vector<Key>& router() const noexcept { return router_; }
    std::uint64_t size() const noexcept;

private:
    std::vector<AidelIndex> shards_;
    std::vector<Key> router_;  // first key of each shard
};

}  // namespace aidel
