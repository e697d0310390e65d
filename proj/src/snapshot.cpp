#include "aidel/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace aidel {

namespace {

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void raw(const char* p, std::size_t n) { out_.insert(out_.end(), p, p + n); }

    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::uint8_t u8() {
        need(1);
        return in_[pos_++];
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t{in_[pos_ + i]} << (8 * i);
        pos_ += 8;
        return v;
    }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64() { return std::bit_cast<double>(u64()); }
    bool matches(const char* p, std::size_t n) {
        need(n);
        const bool ok = std::memcmp(in_.data() + pos_, p, n) == 0;
        pos_ += n;
        return ok;
    }
    // Guards count fields against allocating more than the file could hold.
    void check_count(std::uint64_t count, std::uint64_t bytes_each) const {
        if (bytes_each != 0 && count > (in_.size() - pos_) / bytes_each)
            throw Error(ErrorCode::FileFormat, "snapshot truncated");
    }
    bool done() const noexcept { return pos_ == in_.size(); }

private:
    void need(std::size_t n) const {
        if (in_.size() - pos_ < n) throw Error(ErrorCode::FileFormat, "snapshot truncated");
    }

    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

constexpr std::uint64_t kSegmentBytes = 7 * 8;

}  // namespace

std::vector<std::uint8_t> serialize_snapshot(const AidelIndex& index) {
    Writer w;
    w.raw(kSnapshotMagic, sizeof(kSnapshotMagic));
    w.u64(index.data().size());
    w.u64(index.segments().size());

    const auto& cfg = index.config();
    w.u64(cfg.lpa.threshold);
    w.u64(cfg.lpa.learning_step);
    w.f64(cfg.lpa.learning_rate);
    w.u8(static_cast<std::uint8_t>(cfg.lpa.mode));
    w.u64(cfg.max_chain_nodes);
    w.f64(cfg.max_overflow_ratio);

    for (const auto& s : index.segments()) {
        w.u64(s.first_key);
        w.f64(s.model.slope);
        w.f64(s.model.intercept);
        w.i64(s.model.min_err);
        w.i64(s.model.max_err);
        w.u64(s.start);
        w.u64(s.len);
    }
    for (Key k : index.data()) w.u64(k);

    const auto chains = index.overflow_chains();
    w.u64(chains.size());
    for (const auto& c : chains) {
        w.u64(c.anchor);
        w.u64(c.keys.size());
        for (Key k : c.keys) w.u64(k);
    }
    return w.take();
}

AidelIndex deserialize_snapshot(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    if (!r.matches(kSnapshotMagic, sizeof(kSnapshotMagic)))
        throw Error(ErrorCode::FileFormat, "bad snapshot magic");

    const std::uint64_t key_count = r.u64();
    const std::uint64_t segment_count = r.u64();

    IndexConfig cfg;
    cfg.lpa.threshold = r.u64();
    cfg.lpa.learning_step = r.u64();
    cfg.lpa.learning_rate = r.f64();
    const std::uint8_t mode = r.u8();
    if (mode > static_cast<std::uint8_t>(ShrinkMode::bisect))
        throw Error(ErrorCode::FileFormat, "unknown shrink mode");
    cfg.lpa.mode = static_cast<ShrinkMode>(mode);
    cfg.max_chain_nodes = r.u64();
    cfg.max_overflow_ratio = r.f64();

    r.check_count(segment_count, kSegmentBytes);
    std::vector<Segment> segments(segment_count);
    for (auto& s : segments) {
        s.first_key = r.u64();
        s.model.slope = r.f64();
        s.model.intercept = r.f64();
        s.model.min_err = r.i64();
        s.model.max_err = r.i64();
        s.start = r.u64();
        s.len = r.u64();
    }

    r.check_count(key_count, 8);
    std::vector<Key> keys(key_count);
    for (auto& k : keys) k = r.u64();

    const std::uint64_t chain_count = r.u64();
    r.check_count(chain_count, 16);
    std::vector<AidelIndex::OverflowChain> chains(chain_count);
    for (auto& c : chains) {
        c.anchor = r.u64();
        const std::uint64_t n = r.u64();
        r.check_count(n, 8);
        c.keys.resize(n);
        for (auto& k : c.keys) k = r.u64();
    }
    if (!r.done()) throw Error(ErrorCode::FileFormat, "trailing bytes after snapshot");

    try {
        return AidelIndex::from_parts(std::move(keys), std::move(segments), cfg, chains);
    } catch (const Error& e) {
        throw Error(ErrorCode::FileFormat, std::string("inconsistent snapshot: ") + e.what());
    }
}

void save_snapshot(const AidelIndex& index, const std::filesystem::path& path) {
    const auto bytes = serialize_snapshot(index);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

AidelIndex load_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(ErrorCode::Io, "read failed for " + path.string());
    return deserialize_snapshot(bytes);
}

}  // namespace aidel
