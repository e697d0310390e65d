// aidel: build, query, update and benchmark AIDEL snapshots.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "aidel/bench.hpp"
#include "aidel/datagen.hpp"
#include "aidel/index.hpp"
#include "aidel/snapshot.hpp"

namespace {

using namespace aidel;

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct BuildArgs {
    std::string dataset;
    std::uint64_t threshold = 64;
    std::uint64_t step = 1024;
    double rate = 0.1;
    std::string mode = "literal";
    std::string out;
};

struct BenchArgs {
    std::string suite;
    std::string dataset;
    std::string csv;
    std::vector<std::uint64_t> thresholds{32, 64, 128, 256};
    std::vector<std::size_t> rmi_sizes{1000, 5000, 10000, 20000};
    std::vector<std::string> structures;
    std::uint64_t threshold = 128;
    std::uint64_t step = 1024;
    double rate = 0.1;
    std::size_t models = 10;
    bench::ThroughputOptions tp;
};

ShrinkMode parse_mode(const std::string& s) {
    if (s == "literal") return ShrinkMode::literal;
    if (s == "bisect") return ShrinkMode::bisect;
    throw Error(ErrorCode::InvalidArgument, "mode must be literal or bisect");
}

int run_build(const BuildArgs& a) {
    const auto spec = DatasetSpec::parse(a.dataset);
    const auto keys = generate(spec);
    IndexConfig cfg;
    cfg.lpa.threshold = a.threshold;
    cfg.lpa.learning_step = a.step;
    cfg.lpa.learning_rate = a.rate;
    cfg.lpa.mode = parse_mode(a.mode);
    const auto index = AidelIndex::build(keys, cfg);
    save_snapshot(index, a.out);
    std::cout << "keys " << index.size() << "\nsegments " << index.segments().size() << "\nsnapshot " << a.out
              << '\n';
    return 0;
}

int run_query(const std::string& in, Key key) {
    const auto index = load_snapshot(in);
    const auto r = index.lookup(key);
    auto anchor = [](Position p) { return p == kHeadAnchor ? std::string("head") : std::to_string(p); };
    switch (r.kind) {
        case LookupResult::Kind::data:
            std::cout << "found data position=" << r.position << '\n';
            break;
        case LookupResult::Kind::overflow:
            std::cout << "found overflow anchor=" << anchor(r.position) << " slot=" << r.slot << '\n';
            break;
        case LookupResult::Kind::absent:
            std::cout << "absent anchor=" << anchor(r.position) << '\n';
            break;
    }
    return 0;
}

int run_range(const std::string& in, Key low, Key high, bool count_only) {
    const auto index = load_snapshot(in);
    const auto keys = index.range_query(low, high);
    std::cout << "count " << keys.size() << '\n';
    if (!count_only) {
        for (Key k : keys) std::cout << k << '\n';
    }
    return 0;
}

int run_insert(const std::string& in, const std::string& keys_path, std::string out, bool retrain) {
    auto index = load_snapshot(in);
    const auto keys = read_key_file(keys_path);
    std::uint64_t inserted = 0, duplicates = 0;
    for (Key k : keys) {
        if (index.insert(k) == InsertResult::inserted) ++inserted;
        else ++duplicates;
    }
    const bool wanted = index.should_retrain();
    if (retrain && wanted) index.retrain_all();
    if (out.empty()) out = in;
    save_snapshot(index, out);
    std::cout << "inserted " << inserted << "\nduplicates " << duplicates << "\noverflow " << index.overflow_size()
              << "\nretrain_suggested " << (wanted ? "yes" : "no") << "\nretrained " << (retrain && wanted ? "yes" : "no")
              << "\nsnapshot " << out << '\n';
    return 0;
}

int run_stats(const std::string& in) {
    const auto index = load_snapshot(in);
    const auto& segs = index.segments();
    std::uint64_t max_err = 0, max_len = 0;
    for (const auto& s : segs) {
        max_err = std::max(max_err, s.model.error());
        max_len = std::max(max_len, s.len);
    }
    const auto& c = index.config();
    std::cout << "keys " << index.size() << "\ntrained " << index.trained_size() << "\noverflow "
              << index.overflow_size() << "\nsegments " << segs.size() << "\nmax_segment_error " << max_err
              << "\nmax_segment_len " << max_len << "\nmean_segment_len "
              << static_cast<double>(index.trained_size()) / static_cast<double>(segs.size())
              << "\nlongest_chain_nodes " << index.longest_chain_nodes() << "\nmetadata_bytes "
              << index.metadata_bytes() << "\nthreshold " << c.lpa.threshold << "\nlearning_step "
              << c.lpa.learning_step << "\nlearning_rate " << c.lpa.learning_rate << "\nmode "
              << (c.lpa.mode == ShrinkMode::bisect ? "bisect" : "literal") << "\nshould_retrain "
              << (index.should_retrain() ? "yes" : "no") << '\n';
    return 0;
}

bench::Structure parse_structure(const std::string& s) {
    for (auto st : {bench::Structure::aidel, bench::Structure::btree, bench::Structure::rmi,
                    bench::Structure::binary_search}) {
        if (s == bench::to_string(st)) return st;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown structure '" + s + "'");
}

int run_bench(BenchArgs a) {
    const auto spec = DatasetSpec::parse(a.dataset);
    const auto keys = generate(spec);
    const std::string name = spec.to_string();
    LpaConfig lpa;
    lpa.threshold = a.threshold;
    lpa.learning_step = a.step;
    lpa.learning_rate = a.rate;
    a.tp.lpa = lpa;

    std::vector<bench::BenchReport> reports;
    if (a.suite == "models") {
        reports = bench::bench_model_counts(keys, name, a.thresholds, a.rmi_sizes, lpa);
    } else if (a.suite == "memory") {
        reports = bench::bench_memory(keys, name, a.threshold, a.rmi_sizes, lpa);
    } else if (a.suite == "strategies") {
        reports = bench::bench_strategies(keys, name, a.models, lpa);
    } else {
        const auto workload = a.suite == "insert" ? bench::Workload::insert : bench::Workload::lookup;
        if (a.structures.empty()) {
            a.structures = workload == bench::Workload::insert
                               ? std::vector<std::string>{"aidel", "btree", "rmi"}
                               : std::vector<std::string>{"aidel", "btree", "rmi", "binary_search"};
        }
        for (const auto& s : a.structures)
            reports.push_back(bench::bench_throughput(parse_structure(s), workload, keys, name, a.tp));
    }

    if (!a.csv.empty()) {
        std::ofstream out(a.csv, std::ios::binary);
        if (!out) throw Error(ErrorCode::Io, "cannot open " + a.csv);
        bench::write_csv(out, reports);
        if (!out) throw Error(ErrorCode::Io, "write failed for " + a.csv);
    }
    std::cout << "dataset " << name << " (" << keys.size() << " keys)\n" << bench::format_table(reports);
    return 0;
}

bool is_usage_error(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidConfig:
        case ErrorCode::InvalidSpec:
        case ErrorCode::InvalidArgument:
        case ErrorCode::InvalidRange:
            return true;
        default:
            return false;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AIDEL learned index tool"};
    app.require_subcommand(1);

    BuildArgs build;
    auto* b = app.add_subcommand("build", "Train an index over a dataset and write a snapshot");
    b->add_option("--dataset", build.dataset, "kind[:key=value,...], e.g. lognormal:count=1000000")->required();
    b->add_option("--threshold", build.threshold, "Maximum model error")->capture_default_str();
    b->add_option("--step", build.step, "Learning step")->capture_default_str();
    b->add_option("--rate", build.rate, "Learning rate")->capture_default_str();
    b->add_option("--mode", build.mode, "Shrink mode")->check(CLI::IsMember({"literal", "bisect"}))->capture_default_str();
    b->add_option("--out", build.out, "Snapshot path")->required();

    std::string in;
    Key key = 0, low = 0, high = 0;
    auto* q = app.add_subcommand("query", "Look up one key");
    q->add_option("--in", in, "Snapshot path")->required();
    q->add_option("--key", key, "Key")->required();

    bool count_only = false;
    auto* r = app.add_subcommand("range", "List keys in [low, high]");
    r->add_option("--in", in, "Snapshot path")->required();
    r->add_option("--low", low, "Lower bound")->required();
    r->add_option("--high", high, "Upper bound")->required();
    r->add_flag("--count-only", count_only, "Print only the count");

    std::string keys_path, out_path;
    bool retrain = false;
    auto* ins = app.add_subcommand("insert", "Insert keys from a raw little-endian u64 file");
    ins->add_option("--in", in, "Snapshot path")->required();
    ins->add_option("--keys", keys_path, "Key file")->required();
    ins->add_option("--out", out_path, "Output snapshot (default: overwrite --in)");
    ins->add_flag("--retrain", retrain, "Retrain when the overflow policy asks for it");

    BenchArgs ba;
    auto* be = app.add_subcommand("bench", "Run a benchmark suite");
    be->add_option("--suite", ba.suite, "Suite")
        ->required()
        ->check(CLI::IsMember({"models", "memory", "insert", "lookup", "strategies"}));
    be->add_option("--dataset", ba.dataset, "Dataset spec")->required();
    be->add_option("--csv", ba.csv, "CSV output path");
    be->add_option("--thresholds", ba.thresholds, "models: threshold sweep")->delimiter(',')->capture_default_str();
    be->add_option("--rmi-sizes", ba.rmi_sizes, "models/memory: RMI leaf counts")->delimiter(',')->capture_default_str();
    be->add_option("--threshold", ba.threshold, "AIDEL threshold")->capture_default_str();
    be->add_option("--step", ba.step, "Learning step")->capture_default_str();
    be->add_option("--rate", ba.rate, "Learning rate")->capture_default_str();
    be->add_option("--models", ba.models, "strategies: models per strategy")->capture_default_str();
    be->add_option("--structures", ba.structures, "insert/lookup: structures to run")->delimiter(',');
    be->add_option("--train-fraction", ba.tp.train_fraction, "Fraction of keys used for training")->capture_default_str();
    be->add_option("--load-factor", ba.tp.load_factor, "Inserted keys per trained key")->capture_default_str();
    be->add_option("--queries", ba.tp.queries, "lookup: query count")->capture_default_str();
    be->add_option("--existing", ba.tp.existing_fraction, "lookup: fraction of present keys")->capture_default_str();
    be->add_option("--seed", ba.tp.seed, "Workload seed")->capture_default_str();
    be->add_option("--rmi-models", ba.tp.rmi_models, "insert/lookup: RMI leaf count")->capture_default_str();
    be->add_option("--rmi-threshold", ba.tp.rmi_threshold, "insert/lookup: RMI error threshold")->capture_default_str();
    be->add_option("--threads", ba.tp.threads, "lookup: reader threads for AIDEL")->capture_default_str();

    auto* st = app.add_subcommand("stats", "Describe a snapshot");
    st->add_option("--in", in, "Snapshot path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*b) return run_build(build);
        if (*q) return run_query(in, key);
        if (*r) return run_range(in, low, high, count_only);
        if (*ins) return run_insert(in, keys_path, out_path, retrain);
        if (*be) return run_bench(ba);
        if (*st) return run_stats(in);
    } catch (const Error& e) {
        std::cerr << "aidel: " << e.what() << '\n';
        return is_usage_error(e.code()) ? kExitUsage : kExitData;
    } catch (const std::exception& e) {
        std::cerr << "aidel: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
