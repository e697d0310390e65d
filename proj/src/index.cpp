#include "aidel/index.hpp"

#include <algorithm>
#include <string>

namespace aidel {

void IndexConfig::validate() const {
    lpa.validate();
    if (max_chain_nodes < 1) throw Error(ErrorCode::InvalidConfig, "max_chain_nodes must be >= 1");
    if (!(max_overflow_ratio > 0.0))
        throw Error(ErrorCode::InvalidConfig, "max_overflow_ratio must be positive");
}

namespace {

void check_keys(std::span<const Key> keys) {
    if (keys.empty()) throw Error(ErrorCode::EmptyInput, "index over no keys");
    for (std::size_t i = 1; i < keys.size(); ++i) {
        if (keys[i] <= keys[i - 1])
            throw Error(ErrorCode::UnsortedInput,
                        "keys must be strictly ascending (index " + std::to_string(i) + ")");
    }
}

// LPA over keys occupying positions [base, base + keys.size()) of an array of
// n_total positions; segments come back in relative frame.
void train_run(std::span<const Key> keys, const LpaConfig& lpa, Position base, std::uint64_t n_total,
               std::vector<Segment>& out) {
    const auto records = make_records(keys, base);
    const std::span<const Record> all(records);
    for (const auto& seg : lpa_train(records, lpa, n_total))
        out.push_back(to_relative(seg, all.subspan(seg.start - base, seg.len)));
}

}  // namespace

AidelIndex AidelIndex::build(std::span<const Key> keys, const IndexConfig& config) {
    config.validate();
    check_keys(keys);

    AidelIndex idx;
    idx.config_ = config;
    idx.data_.assign(keys.begin(), keys.end());
    train_run(keys, config.lpa, 0, keys.size(), idx.segments_);
    idx.overflow_ = OverflowStore(keys.size() + 1);
    idx.rebuild_directory();
    return idx;
}

AidelIndex AidelIndex::from_parts(std::vector<Key> keys, std::vector<Segment> segments,
                                  const IndexConfig& config,
                                  std::span<const OverflowChain> overflow) {
    config.validate();
    check_keys(keys);
    if (segments.empty()) throw Error(ErrorCode::ExtentMismatch, "no segments");

    Position expect = 0;
    for (const auto& seg : segments) {
        if (seg.len == 0 || seg.start != expect || seg.end() > keys.size())
            throw Error(ErrorCode::ExtentMismatch, "segments do not tile the key array");
        if (seg.first_key != keys[seg.start])
            throw Error(ErrorCode::ExtentMismatch, "segment first_key does not match its extent");
        if (seg.model.min_err > seg.model.max_err)
            throw Error(ErrorCode::ExtentMismatch, "segment has min_err > max_err");
        expect = seg.end();
    }
    if (expect != keys.size()) throw Error(ErrorCode::ExtentMismatch, "segments do not cover all keys");

    AidelIndex idx;
    idx.config_ = config;
    idx.data_ = std::move(keys);
    idx.segments_ = std::move(segments);
    idx.overflow_ = OverflowStore(idx.data_.size() + 1);
    idx.rebuild_directory();

    const auto n = idx.data_.size();
    for (const auto& chain : overflow) {
        if (chain.anchor != kHeadAnchor && chain.anchor >= n)
            throw Error(ErrorCode::ExtentMismatch, "overflow anchor out of range");
        const std::size_t slot = idx.anchor_slot(chain.anchor);
        if (idx.overflow_.has_chain(slot))
            throw Error(ErrorCode::ExtentMismatch, "overflow anchor listed twice");
        Key prev = 0;
        bool first = true;
        for (Key k : chain.keys) {
            const bool above = chain.anchor == kHeadAnchor || k > idx.data_[chain.anchor];
            const bool below = chain.anchor == kHeadAnchor ? k < idx.data_.front()
                               : chain.anchor + 1 < n    ? k < idx.data_[chain.anchor + 1]
                                                         : true;
            if (!above || !below || (!first && k <= prev))
                throw Error(ErrorCode::UnsortedInput, "overflow key outside its anchor's gap");
            idx.overflow_.append(slot, k);
            prev = k;
            first = false;
        }
    }
    idx.inserts_since_train_ = idx.overflow_.total_keys();
    return idx;
}

void AidelIndex::rebuild_directory() {
    directory_.clear();
    directory_.reserve(segments_.size());
    for (const auto& s : segments_) directory_.push_back(s.first_key);
}

std::size_t AidelIndex::segment_for(Key key) const noexcept {
    const auto it = std::upper_bound(directory_.begin(), directory_.end(), key);
    return it == directory_.begin() ? 0 : static_cast<std::size_t>(it - directory_.begin()) - 1;
}

AidelIndex::Locate AidelIndex::locate(Key key) const noexcept {
    if (data_.empty() || key < data_.front()) return {false, kHeadAnchor};

    const Segment& seg = segments_[segment_for(key)];
    const auto window = predict_in_segment(seg, key);
    const Key* base = data_.data();
    const Key* first = base + window.lo;
    const Key* last = base + window.hi + 1;
    const Key* it = std::lower_bound(first, last, key);
    if (it != last && *it == key) return {true, static_cast<Position>(it - base)};

    // Untrained keys may fall outside the predicted window; the predecessor is
    // still inside the segment's extent because the directory routed us here.
    const Key* seg_first = base + seg.start;
    const Key* seg_last = base + seg.end();
    const bool bracketed = (it != first || first == seg_first) && (it != last || last == seg_last);
    if (!bracketed) {
        it = std::lower_bound(seg_first, seg_last, key);
        if (it != seg_last && *it == key) return {true, static_cast<Position>(it - base)};
    }
    return {false, static_cast<Position>(it - base) - 1};
}

LookupResult AidelIndex::lookup(Key key) const {
    const Locate loc = locate(key);
    if (loc.in_data) return {LookupResult::Kind::data, loc.position, 0};
    if (auto slot = overflow_.find(anchor_slot(loc.position), key))
        return {LookupResult::Kind::overflow, loc.position, *slot};
    return {LookupResult::Kind::absent, loc.position, 0};
}

InsertResult AidelIndex::insert(Key key) {
    const Locate loc = locate(key);
    if (loc.in_data) return InsertResult::duplicate;
    if (!overflow_.insert(anchor_slot(loc.position), key)) return InsertResult::duplicate;
    ++inserts_since_train_;
    return InsertResult::inserted;
}

namespace {

template <typename Emit>
void walk_range(const std::vector<Key>& data, const OverflowStore& overflow, std::size_t head_slot,
                bool in_data, Position position, Key low, Key high, Emit&& emit) {
    std::size_t p;
    if (in_data) {
        p = position;
    } else {
        const std::size_t slot = position == kHeadAnchor ? head_slot : position;
        overflow.for_each(slot, [&](Key k) {
            if (k >= low && k <= high) emit(k);
        });
        p = position == kHeadAnchor ? 0 : position + 1;
    }
    for (; p < data.size() && data[p] <= high; ++p) {
        emit(data[p]);
        overflow.for_each(p, [&](Key k) {
            if (k <= high) emit(k);
        });
    }
}

}  // namespace

std::vector<Key> AidelIndex::range_query(Key low, Key high) const {
    if (low > high) throw Error(ErrorCode::InvalidRange, "low > high");
    std::vector<Key> out;
    const Locate loc = locate(low);
    walk_range(data_, overflow_, head_slot(), loc.in_data, loc.position, low, high,
               [&](Key k) { out.push_back(k); });
    return out;
}

std::size_t AidelIndex::range_count(Key low, Key high) const {
    if (low > high) throw Error(ErrorCode::InvalidRange, "low > high");
    std::size_t count = 0;
    const Locate loc = locate(low);
    walk_range(data_, overflow_, head_slot(), loc.in_data, loc.position, low, high,
               [&](Key) { ++count; });
    return count;
}

std::vector<Key> AidelIndex::all_keys() const {
    std::vector<Key> out;
    out.reserve(size());
    for_each([&](Key k) { out.push_back(k); });
    return out;
}

std::vector<AidelIndex::OverflowChain> AidelIndex::overflow_chains() const {
    std::vector<OverflowChain> out;
    if (data_.empty()) return out;
    if (overflow_.has_chain(head_slot())) out.push_back({kHeadAnchor, overflow_.keys(head_slot())});
    for (std::size_t p = 0; p < data_.size(); ++p) {
        if (overflow_.has_chain(p)) out.push_back({p, overflow_.keys(p)});
    }
    return out;
}

RetrainReport AidelIndex::retrain_all() {
    RetrainReport report;
    report.segments_before = segments_.size();
    report.segments_retrained = segments_.size();

    // Everything is already in order: a single walk replaces sorting.
    std::vector<Key> merged;
    merged.reserve(size());
    for_each([&](Key k) { merged.push_back(k); });
    report.merged_records = merged.size();

    AidelIndex fresh = build(merged, config_);
    report.segments_after = fresh.segments_.size();
    *this = std::move(fresh);
    return report;
}

RetrainReport AidelIndex::retrain_partial(std::span<const Key> segment_first_keys) {
    std::vector<bool> retrain(segments_.size(), false);
    for (Key k : segment_first_keys) {
        const auto it = std::lower_bound(directory_.begin(), directory_.end(), k);
        if (it == directory_.end() || *it != k)
            throw Error(ErrorCode::UnknownSegment, "no segment starts at key " + std::to_string(k));
        retrain[static_cast<std::size_t>(it - directory_.begin())] = true;
    }

    RetrainReport report;
    report.segments_before = segments_.size();

    std::vector<Key> new_data;
    new_data.reserve(size());
    std::vector<Segment> new_segments;
    std::vector<OverflowChain> kept_chains;

    if (!retrain.empty() && !retrain[0] && overflow_.has_chain(head_slot()))
        kept_chains.push_back({kHeadAnchor, overflow_.keys(head_slot())});

    // Length of the rebuilt array: retrained segments absorb their chains.
    std::uint64_t n_final = data_.size();
    for (std::size_t s = 0; s < segments_.size(); ++s) {
        if (!retrain[s]) continue;
        if (s == 0) n_final += overflow_.chain_size(head_slot());
        for (Position p = segments_[s].start; p < segments_[s].end(); ++p) n_final += overflow_.chain_size(p);
    }

    std::vector<Key> merged;
    for (std::size_t s = 0; s < segments_.size(); ++s) {
        const Segment& seg = segments_[s];
        const Position base = new_data.size();
        if (!retrain[s]) {
            for (Position p = seg.start; p < seg.end(); ++p) {
                if (overflow_.has_chain(p))
                    kept_chains.push_back({base + (p - seg.start), overflow_.keys(p)});
            }
            new_data.insert(new_data.end(), data_.begin() + seg.start, data_.begin() + seg.end());
            Segment moved = seg;
            moved.start = base;
            new_segments.push_back(moved);
            continue;
        }

        ++report.segments_retrained;
        merged.clear();
        if (s == 0) overflow_.for_each(head_slot(), [&](Key k) { merged.push_back(k); });
        for (Position p = seg.start; p < seg.end(); ++p) {
            merged.push_back(data_[p]);
            overflow_.for_each(p, [&](Key k) { merged.push_back(k); });
        }
        report.merged_records += merged.size();
        train_run(merged, config_.lpa, base, n_final, new_segments);
        new_data.insert(new_data.end(), merged.begin(), merged.end());
    }

    AidelIndex fresh = from_parts(std::move(new_data), std::move(new_segments), config_, kept_chains);
    report.segments_after = fresh.segments_.size();
    *this = std::move(fresh);
    return report;
}

bool AidelIndex::should_retrain() const noexcept {
    if (longest_chain_nodes() > config_.max_chain_nodes) return true;
    const double limit = config_.max_overflow_ratio * static_cast<double>(trained_size());
    return static_cast<double>(overflow_size()) >= limit;
}

std::uint64_t AidelIndex::metadata_bytes() const noexcept {
    return segments_.size() * kSegmentEntryBytes;
}

}  // namespace aidel
