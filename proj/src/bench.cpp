#include "aidel/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>

#include "aidel/bplus_tree.hpp"
#include "aidel/csv.hpp"
#include "aidel/index.hpp"
#include "aidel/parallel.hpp"
#include "aidel/rmi.hpp"

namespace aidel::bench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) { return csv::format_double(v); }

class Target {
public:
    virtual ~Target() = default;
    virtual void build(std::span<const Key> sorted) = 0;
    virtual bool insert(Key key) = 0;
    virtual bool contains(Key key) const = 0;
    virtual std::size_t range_count(Key low, Key high) const = 0;
    virtual void seal() {}
    virtual std::uint64_t metadata_bytes() const = 0;
};

class AidelTarget final : public Target {
public:
    explicit AidelTarget(const LpaConfig& lpa) { config_.lpa = lpa; }
    void build(std::span<const Key> sorted) override { index_ = AidelIndex::build(sorted, config_); }
    bool insert(Key key) override { return index_.insert(key) == InsertResult::inserted; }
    bool contains(Key key) const override { return index_.contains(key); }
    std::size_t range_count(Key lo, Key hi) const override { return index_.range_count(lo, hi); }
    std::uint64_t metadata_bytes() const override { return index_.metadata_bytes(); }
    const AidelIndex& index() const { return index_; }

private:
    IndexConfig config_;
    AidelIndex index_;
};

class BTreeTarget final : public Target {
public:
    void build(std::span<const Key> sorted) override { tree_ = BPlusTree::bulk_load(sorted); }
    bool insert(Key key) override { return tree_.insert(key, key); }
    bool contains(Key key) const override { return tree_.contains(key); }
    std::size_t range_count(Key lo, Key hi) const override { return tree_.range_count(lo, hi); }
    std::uint64_t metadata_bytes() const override { return tree_.inner_bytes(); }

private:
    BPlusTree tree_;
};

class RmiTarget final : public Target {
public:
    explicit RmiTarget(RmiConfig cfg) : config_(cfg) {}
    void build(std::span<const Key> sorted) override { rmi_ = std::make_unique<RmiIndex>(RmiIndex::build(sorted, config_)); }
    bool insert(Key key) override { return rmi_->insert(key) == InsertResult::inserted; }
    bool contains(Key key) const override { return rmi_->contains(key); }
    std::size_t range_count(Key, Key) const override {
        throw Error(ErrorCode::InvalidArgument, "rmi does not support range queries");
    }
    std::uint64_t metadata_bytes() const override { return rmi_->metadata_bytes(); }

private:
    RmiConfig config_;
    std::unique_ptr<RmiIndex> rmi_;
};

class BinaryTarget final : public Target {
public:
    void build(std::span<const Key> sorted) override { keys_.assign(sorted.begin(), sorted.end()); }
    bool insert(Key key) override {
        pending_.push_back(key);
        return true;
    }
    void seal() override {
        std::sort(pending_.begin(), pending_.end());
        std::vector<Key> merged(keys_.size() + pending_.size());
        std::merge(keys_.begin(), keys_.end(), pending_.begin(), pending_.end(), merged.begin());
        keys_ = std::move(merged);
        pending_.clear();
    }
    bool contains(Key key) const override { return std::binary_search(keys_.begin(), keys_.end(), key); }
    std::size_t range_count(Key lo, Key hi) const override {
        return static_cast<std::size_t>(std::upper_bound(keys_.begin(), keys_.end(), hi) -
                                        std::lower_bound(keys_.begin(), keys_.end(), lo));
    }
    std::uint64_t metadata_bytes() const override { return 0; }

private:
    std::vector<Key> keys_;
    std::vector<Key> pending_;
};

std::unique_ptr<Target> make_target(Structure s, const ThroughputOptions& o) {
    switch (s) {
        case Structure::aidel: return std::make_unique<AidelTarget>(o.lpa);
        case Structure::btree: return std::make_unique<BTreeTarget>();
        case Structure::rmi: {
            RmiConfig cfg;
            cfg.models = o.rmi_models;
            cfg.threshold = o.rmi_threshold;
            return std::make_unique<RmiTarget>(cfg);
        }
        case Structure::binary_search: return std::make_unique<BinaryTarget>();
    }
    throw Error(ErrorCode::InvalidArgument, "unknown structure");
}

void set_latency(BenchReport& r, std::vector<double>& ns) {
    if (ns.empty()) return;
    std::sort(ns.begin(), ns.end());
    auto at = [&](double q) { return ns[static_cast<std::size_t>(q * static_cast<double>(ns.size() - 1))]; };
    r.p50_ns = at(0.50);
    r.p99_ns = at(0.99);
}

template <typename Op>
double timed_loop(std::size_t n, std::vector<double>& latencies, Op&& op) {
    latencies.assign(n, 0.0);
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < n; ++i) {
        const auto a = Clock::now();
        op(i);
        latencies[i] = std::chrono::duration<double, std::nano>(Clock::now() - a).count();
    }
    return seconds_since(t0);
}

std::string lpa_config_string(const LpaConfig& c) {
    std::ostringstream os;
    os << "threshold=" << c.threshold << ";step=" << c.learning_step << ";rate=" << c.learning_rate;
    if (c.mode == ShrinkMode::bisect) os << ";mode=bisect";
    return os.str();
}

}  // namespace

std::optional<double> BenchReport::metric(std::string_view name) const {
    auto num = [](const auto& o) -> std::optional<double> {
        if (!o) return std::nullopt;
        return static_cast<double>(*o);
    };
    if (name == "build_seconds") return build_seconds;
    if (name == "ops") return num(ops);
    if (name == "ops_per_sec") return ops_per_sec;
    if (name == "p50_ns") return p50_ns;
    if (name == "p99_ns") return p99_ns;
    if (name == "metadata_bytes") return num(metadata_bytes);
    if (name == "models_total") return num(models_total);
    if (name == "models_unsatisfied") return num(models_unsatisfied);
    for (const auto& [k, v] : extra) {
        if (k == name) return v;
    }
    return std::nullopt;
}

const char* to_string(Structure s) noexcept {
    switch (s) {
        case Structure::aidel: return "aidel";
        case Structure::btree: return "btree";
        case Structure::rmi: return "rmi";
        case Structure::binary_search: return "binary_search";
    }
    return "?";
}

const char* to_string(Workload w) noexcept {
    switch (w) {
        case Workload::insert: return "insert";
        case Workload::lookup: return "lookup";
        case Workload::range: return "range";
    }
    return "?";
}

std::vector<BenchReport> bench_model_counts(std::span<const Key> keys, const std::string& dataset,
                                            std::span<const std::uint64_t> thresholds,
                                            std::span<const std::size_t> rmi_sizes, const LpaConfig& lpa) {
    if (keys.empty()) throw Error(ErrorCode::EmptyInput, "model counts over no keys");
    const auto records = make_records(keys);
    const std::span<const Record> all(records);

    std::vector<std::unique_ptr<RmiIndex>> rmis;
    for (std::size_t m : rmi_sizes) {
        RmiConfig cfg;
        cfg.models = m;
        cfg.threshold = std::numeric_limits<std::uint64_t>::max();
        rmis.push_back(std::make_unique<RmiIndex>(RmiIndex::build(keys, cfg)));
    }

    std::vector<BenchReport> out;
    for (std::uint64_t thr : thresholds) {
        LpaConfig cfg = lpa;
        cfg.threshold = thr;
        const auto t0 = Clock::now();
        const auto segs = lpa_train(keys, cfg);
        BenchReport r;
        r.structure = "aidel";
        r.dataset = dataset;
        r.config = lpa_config_string(cfg);
        r.build_seconds = seconds_since(t0);
        r.models_total = segs.size();
        std::uint64_t unsatisfied = 0;
        for (const auto& s : segs) {
            // Recomputed from scratch rather than trusting the stored errors.
            if (compute_errors(s.model, all.subspan(s.start, s.len), keys.size()).error > thr) ++unsatisfied;
        }
        r.models_unsatisfied = unsatisfied;
        out.push_back(std::move(r));

        for (std::size_t i = 0; i < rmis.size(); ++i) {
            BenchReport q;
            q.structure = "rmi";
            q.dataset = dataset;
            q.config = "threshold=" + std::to_string(thr) + ";models=" + std::to_string(rmi_sizes[i]);
            q.models_total = rmi_sizes[i];
            q.models_unsatisfied = rmis[i]->count_exceeding(thr);
            out.push_back(std::move(q));
        }
    }
    return out;
}

std::vector<BenchReport> bench_memory(std::span<const Key> keys, const std::string& dataset,
                                      std::uint64_t threshold, std::span<const std::size_t> rmi_sizes,
                                      const LpaConfig& lpa) {
    if (keys.empty()) throw Error(ErrorCode::EmptyInput, "memory bench over no keys");
    std::vector<BenchReport> out;

    IndexConfig icfg;
    icfg.lpa = lpa;
    icfg.lpa.threshold = threshold;
    const auto t0 = Clock::now();
    const auto index = AidelIndex::build(keys, icfg);
    BenchReport a;
    a.structure = "aidel";
    a.dataset = dataset;
    a.config = lpa_config_string(icfg.lpa);
    a.build_seconds = seconds_since(t0);
    a.metadata_bytes = index.metadata_bytes();
    a.models_total = index.segments().size();
    out.push_back(std::move(a));

    const auto t1 = Clock::now();
    const auto tree = BPlusTree::bulk_load(keys);
    BenchReport b;
    b.structure = "btree";
    b.dataset = dataset;
    b.config = "fanout=128";
    b.build_seconds = seconds_since(t1);
    b.metadata_bytes = tree.inner_bytes();
    b.extra = {{"inner_nodes", static_cast<double>(tree.inner_nodes())},
               {"leaf_bytes", static_cast<double>(tree.leaf_bytes())}};
    out.push_back(std::move(b));

    for (std::size_t m : rmi_sizes) {
        RmiConfig cfg;
        cfg.models = m;
        cfg.threshold = threshold;
        const auto t2 = Clock::now();
        const auto rmi = RmiIndex::build(keys, cfg);
        BenchReport c;
        c.structure = "rmi";
        c.dataset = dataset;
        c.config = "threshold=" + std::to_string(threshold) + ";models=" + std::to_string(m);
        c.build_seconds = seconds_since(t2);
        c.metadata_bytes = rmi.metadata_bytes();
        c.models_total = m;
        c.models_unsatisfied = rmi.invalid_count();
        out.push_back(std::move(c));
    }
    return out;
}

BenchReport bench_throughput(Structure structure, Workload workload, std::span<const Key> keys,
                             const std::string& dataset, const ThroughputOptions& o) {
    if (keys.empty()) throw Error(ErrorCode::EmptyInput, "throughput bench over no keys");
    if (!(o.train_fraction > 0.0 && o.train_fraction <= 1.0) || o.load_factor < 0.0 ||
        o.existing_fraction < 0.0 || o.existing_fraction > 1.0)
        throw Error(ErrorCode::InvalidConfig, "bad throughput options");
    if (workload == Workload::insert && structure == Structure::binary_search)
        throw Error(ErrorCode::InvalidArgument, "binary_search does not take inserts");
    if (workload == Workload::range && structure == Structure::rmi)
        throw Error(ErrorCode::InvalidArgument, "rmi does not support range queries");

    std::mt19937_64 rng(o.seed);
    std::vector<Key> shuffled(keys.begin(), keys.end());
    std::shuffle(shuffled.begin(), shuffled.end(), rng);

    const std::size_t n = keys.size();
    const std::size_t train_n =
        std::max<std::size_t>(1, static_cast<std::size_t>(o.train_fraction * static_cast<double>(n)));
    const std::size_t insert_n = std::min(
        n - train_n, static_cast<std::size_t>(o.load_factor * static_cast<double>(train_n)));
    std::vector<Key> train(shuffled.begin(), shuffled.begin() + train_n);
    std::sort(train.begin(), train.end());
    const std::span<const Key> inserts(shuffled.data() + train_n, insert_n);

    BenchReport r;
    r.structure = to_string(structure);
    r.dataset = dataset;
    {
        std::ostringstream os;
        os << "workload=" << to_string(workload) << ";train=" << train_n << ";load_factor=" << o.load_factor;
        if (structure == Structure::aidel) os << ';' << lpa_config_string(o.lpa);
        if (structure == Structure::rmi) os << ";models=" << o.rmi_models << ";threshold=" << o.rmi_threshold;
        if (workload == Workload::lookup) os << ";existing=" << o.existing_fraction;
        if (workload == Workload::range) os << ";range_keys=" << o.range_keys;
        if (o.threads > 1) os << ";threads=" << o.threads;
        r.config = os.str();
    }

    auto target = make_target(structure, o);
    const auto t0 = Clock::now();
    target->build(train);
    r.build_seconds = seconds_since(t0);

    std::vector<double> latencies;

    if (workload == Workload::insert) {
        if (insert_n == 0) throw Error(ErrorCode::InvalidArgument, "zero-op insert workload");
        for (std::size_t i = 0; i < std::min<std::size_t>(1000, train.size()); ++i) (void)target->contains(train[i]);
        std::size_t inserted = 0;
        const double secs = timed_loop(insert_n, latencies, [&](std::size_t i) { inserted += target->insert(inserts[i]); });
        if (inserted != insert_n) throw std::logic_error("insert workload: unique keys reported as duplicates");
        r.ops = insert_n;
        r.ops_per_sec = throughput(insert_n, secs);
        set_latency(r, latencies);
        r.metadata_bytes = target->metadata_bytes();
        return r;
    }

    for (Key k : inserts) {
        if (!target->insert(k)) throw std::logic_error("setup insert rejected a unique key");
    }
    target->seal();
    std::vector<Key> present(train);
    present.insert(present.end(), inserts.begin(), inserts.end());
    std::sort(present.begin(), present.end());

    if (o.queries == 0) throw Error(ErrorCode::InvalidArgument, "zero-op workload");
    std::uniform_int_distribution<std::size_t> pick(0, present.size() - 1);

    if (workload == Workload::lookup) {
        const auto existing = static_cast<std::size_t>(std::llround(o.existing_fraction * static_cast<double>(o.queries)));
        std::vector<Key> queries;
        queries.reserve(o.queries);
        for (std::size_t i = 0; i < existing; ++i) queries.push_back(present[pick(rng)]);
        const Key top = present.back() > std::numeric_limits<Key>::max() - o.queries - 1
                            ? std::numeric_limits<Key>::max()
                            : present.back() + o.queries + 1;
        std::uniform_int_distribution<Key> any(0, top);
        while (queries.size() < o.queries) {
            const Key k = any(rng);
            if (!std::binary_search(present.begin(), present.end(), k)) queries.push_back(k);
        }
        std::shuffle(queries.begin(), queries.end(), rng);

        std::size_t warm = 0;
        for (Key k : queries) warm += target->contains(k);
        if (warm != existing) throw std::logic_error("lookup answers disagree with the oracle");

        std::size_t found = 0;
        double secs;
        if (o.threads > 1 && structure == Structure::aidel) {
            const auto& index = static_cast<const AidelTarget&>(*target).index();
            const auto tp = Clock::now();
            found = parallel::count_found(index, queries, Exec::parallel);
            secs = seconds_since(tp);
        } else {
            secs = timed_loop(queries.size(), latencies, [&](std::size_t i) { found += target->contains(queries[i]); });
            set_latency(r, latencies);
        }
        if (found != existing) throw std::logic_error("lookup answers disagree with the oracle");
        r.ops = queries.size();
        r.ops_per_sec = throughput(queries.size(), secs);
        r.metadata_bytes = target->metadata_bytes();
        r.extra.push_back({"found", static_cast<double>(found)});
        return r;
    }

    // Range.
    const long double span_keys = static_cast<long double>(present.back() - present.front());
    const auto width = static_cast<Key>(span_keys / static_cast<long double>(present.size()) *
                                        static_cast<long double>(o.range_keys));
    std::vector<std::pair<Key, Key>> ranges;
    std::vector<std::size_t> expected;
    ranges.reserve(o.queries);
    for (std::size_t i = 0; i < o.queries; ++i) {
        const Key lo = present[pick(rng)];
        const Key hi = lo > std::numeric_limits<Key>::max() - width ? std::numeric_limits<Key>::max() : lo + width;
        ranges.emplace_back(lo, hi);
        expected.push_back(static_cast<std::size_t>(std::upper_bound(present.begin(), present.end(), hi) -
                                                    std::lower_bound(present.begin(), present.end(), lo)));
    }
    std::size_t total = 0;
    for (const auto& [lo, hi] : ranges) total += target->range_count(lo, hi);
    std::vector<std::size_t> got(ranges.size());
    const double secs = timed_loop(ranges.size(), latencies,
                                   [&](std::size_t i) { got[i] = target->range_count(ranges[i].first, ranges[i].second); });
    if (got != expected) throw std::logic_error("range answers disagree with the oracle");
    r.ops = ranges.size();
    r.ops_per_sec = throughput(ranges.size(), secs);
    set_latency(r, latencies);
    r.metadata_bytes = target->metadata_bytes();
    r.extra.push_back({"keys_returned", static_cast<double>(total)});
    return r;
}

namespace {

BenchReport strategy_row(const std::string& strategy, const std::string& dataset, std::size_t j,
                         std::span<const Key> keys, Position start, std::uint64_t len, const LinearModel& m) {
    BenchReport r;
    r.structure = strategy;
    r.dataset = dataset;
    r.config = "model=" + std::to_string(j);
    r.extra = {{"count", static_cast<double>(len)},
               {"first_key", len ? static_cast<double>(keys[start]) : 0.0},
               {"last_key", len ? static_cast<double>(keys[start + len - 1]) : 0.0},
               {"slope", m.slope},
               {"intercept", m.intercept},
               {"min_err", static_cast<double>(m.min_err)},
               {"max_err", static_cast<double>(m.max_err)},
               {"error", static_cast<double>(m.error())}};
    return r;
}

}  // namespace

std::vector<BenchReport> bench_strategies(std::span<const Key> keys, const std::string& dataset,
                                          std::size_t models, const LpaConfig& lpa) {
    if (keys.empty()) throw Error(ErrorCode::EmptyInput, "strategies over no keys");
    std::vector<BenchReport> out;

    const auto single = equal_count_build(keys, 1);
    out.push_back(strategy_row("single", dataset, 0, keys, 0, keys.size(), single[0].model));

    RmiConfig rcfg;
    rcfg.models = models;
    rcfg.threshold = std::numeric_limits<std::uint64_t>::max();
    const auto rmi = RmiIndex::build(keys, rcfg);
    for (std::size_t j = 0; j < models; ++j) {
        const auto b = rmi.bounds()[j], e = rmi.bounds()[j + 1];
        out.push_back(strategy_row("rmi", dataset, j, keys, b, e - b, rmi.leaf_models()[j]));
    }

    const auto equal = equal_count_build(keys, models);
    for (std::size_t j = 0; j < equal.size(); ++j)
        out.push_back(strategy_row("equal_count", dataset, j, keys, equal[j].start, equal[j].len, equal[j].model));

    // Smallest threshold whose segmentation fits in the model budget.
    LpaConfig cfg = lpa;
    std::uint64_t lo = 1, hi = std::max<std::uint64_t>(1, keys.size());
    auto count_at = [&](std::uint64_t t) {
        cfg.threshold = t;
        return lpa_train(keys, cfg).size();
    };
    while (lo < hi) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (count_at(mid) <= models) hi = mid;
        else lo = mid + 1;
    }
    cfg.threshold = lo;
    const auto segs = lpa_train(keys, cfg);
    for (std::size_t j = 0; j < segs.size(); ++j) {
        auto row = strategy_row("lpa", dataset, j, keys, segs[j].start, segs[j].len, segs[j].model);
        row.extra.push_back({"threshold", static_cast<double>(lo)});
        out.push_back(std::move(row));
    }
    return out;
}

void write_csv(std::ostream& out, std::span<const BenchReport> reports) {
    const std::vector<std::string> header{"structure", "dataset", "config", "metric", "value"};
    csv::write_row(out, header);
    for (const auto& r : reports) {
        auto emit = [&](const std::string& name, double v) {
            const std::vector<std::string> row{r.structure, r.dataset, r.config, name, fmt(v)};
            csv::write_row(out, row);
        };
        auto emit_opt = [&](const char* name, const auto& o) {
            if (o) emit(name, static_cast<double>(*o));
        };
        emit_opt("build_seconds", r.build_seconds);
        emit_opt("ops", r.ops);
        emit_opt("ops_per_sec", r.ops_per_sec);
        emit_opt("p50_ns", r.p50_ns);
        emit_opt("p99_ns", r.p99_ns);
        emit_opt("metadata_bytes", r.metadata_bytes);
        emit_opt("models_total", r.models_total);
        emit_opt("models_unsatisfied", r.models_unsatisfied);
        for (const auto& [k, v] : r.extra) emit(k, v);
    }
}

std::vector<BenchReport> read_csv(std::istream& in) {
    const auto rows = csv::read_all(in);
    if (rows.empty() || rows[0] != std::vector<std::string>{"structure", "dataset", "config", "metric", "value"})
        throw Error(ErrorCode::FileFormat, "missing bench CSV header");

    std::vector<BenchReport> out;
    std::vector<std::string> seen;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 5) throw Error(ErrorCode::FileFormat, "bench CSV row needs 5 fields");
        const std::string& name = row[3];
        const double v = csv::parse_double(row[4]);
        const bool same = !out.empty() && out.back().structure == row[0] && out.back().dataset == row[1] &&
                          out.back().config == row[2] &&
                          std::find(seen.begin(), seen.end(), name) == seen.end();
        if (!same) {
            out.emplace_back();
            out.back().structure = row[0];
            out.back().dataset = row[1];
            out.back().config = row[2];
            seen.clear();
        }
        seen.push_back(name);
        auto& r = out.back();
        auto as_u64 = [&] { return static_cast<std::uint64_t>(v); };
        if (name == "build_seconds") r.build_seconds = v;
        else if (name == "ops") r.ops = as_u64();
        else if (name == "ops_per_sec") r.ops_per_sec = v;
        else if (name == "p50_ns") r.p50_ns = v;
        else if (name == "p99_ns") r.p99_ns = v;
        else if (name == "metadata_bytes") r.metadata_bytes = as_u64();
        else if (name == "models_total") r.models_total = as_u64();
        else if (name == "models_unsatisfied") r.models_unsatisfied = as_u64();
        else r.extra.emplace_back(name, v);
    }
    return out;
}

std::string format_table(std::span<const BenchReport> reports) {
    std::size_t w_struct = 9, w_cfg = 6;
    for (const auto& r : reports) {
        w_struct = std::max(w_struct, r.structure.size());
        w_cfg = std::max(w_cfg, r.config.size());
    }
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(w_struct) + 2) << "structure" << std::setw(static_cast<int>(w_cfg) + 2)
       << "config" << "metrics\n";
    for (const auto& r : reports) {
        os << std::setw(static_cast<int>(w_struct) + 2) << r.structure << std::setw(static_cast<int>(w_cfg) + 2) << r.config;
        std::ostringstream m;
        std::stringstream buf;
        write_csv(buf, std::span<const BenchReport>(&r, 1));
        bool first_line = true;
        std::string line;
        bool first = true;
        while (std::getline(buf, line)) {
            if (first_line) {
                first_line = false;
                continue;
            }
            std::istringstream ls(line);
            const auto fields = csv::read_all(ls);
            if (fields.empty() || fields[0].size() != 5) continue;
            if (!first) m << "  ";
            m << fields[0][3] << '=' << fields[0][4];
            first = false;
        }
        os << m.str() << '\n';
    }
    return os.str();
}

}  // namespace aidel::bench
