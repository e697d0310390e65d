#include "aidel/datagen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <unordered_set>

namespace aidel {

namespace {

std::string_view kind_name(DatasetSpec::Kind k) {
    switch (k) {
        case DatasetSpec::Kind::lognormal: return "lognormal";
        case DatasetSpec::Kind::sequential: return "sequential";
        case DatasetSpec::Kind::two_slope: return "two_slope";
        case DatasetSpec::Kind::file: return "file";
    }
    return "?";
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
    T out{};
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw Error(ErrorCode::InvalidSpec, "bad value for '" + std::string(key) + "': " + std::string(v));
    return out;
}

std::string shortest(double v) {
    char buf[32];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return ec == std::errc{} ? std::string(buf, p) : std::to_string(v);
}

void sort_unique(std::vector<Key>& keys) {
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
}

std::vector<Key> lognormal_keys(const DatasetSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    std::lognormal_distribution<double> dist(spec.mu, spec.sigma);
    std::vector<double> samples(spec.count);
    for (auto& s : samples) s = dist(rng);
    const double max_sample = *std::max_element(samples.begin(), samples.end());

    auto to_key = [&](double s) { return static_cast<Key>(std::floor(s / max_sample * spec.scale)); };
    std::vector<Key> keys;
    keys.reserve(samples.size());
    for (double s : samples) keys.push_back(to_key(s));
    sort_unique(keys);

    if (spec.exact && keys.size() < spec.count) {
        std::unordered_set<Key> seen(keys.begin(), keys.end());
        seen.reserve(spec.count);
        // The key space below the scale must be able to hold the request.
        if (static_cast<double>(spec.count) > spec.scale)
            throw Error(ErrorCode::InvalidSpec, "exact count exceeds the scaled key space");
        while (seen.size() < spec.count) {
            const double s = dist(rng);
            if (s > max_sample) continue;
            seen.insert(to_key(s));
        }
        keys.assign(seen.begin(), seen.end());
        std::sort(keys.begin(), keys.end());
    }
    return keys;
}

std::vector<Key> two_slope_keys(const DatasetSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<std::uint64_t> run_len(8, 64);
    std::uniform_int_distribution<std::uint64_t> wide_gap(500, 1500);
    std::vector<Key> keys;
    keys.reserve(spec.count);
    Key k = 1;
    bool dense = true;
    while (keys.size() < spec.count) {
        const auto run = run_len(rng);
        for (std::uint64_t r = 0; r < run && keys.size() < spec.count; ++r) {
            keys.push_back(k);
            k += dense ? 1 : wide_gap(rng);
        }
        dense = !dense;
    }
    return keys;
}

}  // namespace

DatasetSpec DatasetSpec::parse(std::string_view text) {
    DatasetSpec spec;
    const auto colon = text.find(':');
    const std::string_view kind = text.substr(0, colon);
    if (kind == "lognormal") spec.kind = Kind::lognormal;
    else if (kind == "sequential") spec.kind = Kind::sequential;
    else if (kind == "two_slope") spec.kind = Kind::two_slope;
    else if (kind == "file") spec.kind = Kind::file;
    else throw Error(ErrorCode::InvalidSpec, "unknown dataset kind '" + std::string(kind) + "'");

    std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::InvalidSpec, "expected key=value, got '" + std::string(item) + "'");
        const std::string_view key = item.substr(0, eq), value = item.substr(eq + 1);
        if (key == "count") spec.count = parse_number<std::uint64_t>(key, value);
        else if (key == "seed") spec.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "mu") spec.mu = parse_number<double>(key, value);
        else if (key == "sigma") spec.sigma = parse_number<double>(key, value);
        else if (key == "scale") spec.scale = parse_number<double>(key, value);
        else if (key == "exact") {
            if (value == "1" || value == "true") spec.exact = true;
            else if (value == "0" || value == "false") spec.exact = false;
            else throw Error(ErrorCode::InvalidSpec, "exact must be 0/1/true/false");
        } else if (key == "path") spec.path = std::string(value);
        else throw Error(ErrorCode::InvalidSpec, "unknown dataset parameter '" + std::string(key) + "'");
    }
    spec.validate();
    return spec;
}

std::string DatasetSpec::to_string() const {
    std::ostringstream os;
    os << kind_name(kind);
    if (kind == Kind::file) {
        os << ":path=" << path.string();
        return os.str();
    }
    os << ":count=" << count;
    if (kind == Kind::sequential) return os.str();
    os << ",seed=" << seed;
    if (kind == Kind::lognormal) {
        os << ",mu=" << shortest(mu) << ",sigma=" << shortest(sigma) << ",scale=" << shortest(scale);
        if (exact) os << ",exact=1";
    }
    return os.str();
}

void DatasetSpec::validate() const {
    if (kind == Kind::file) {
        if (path.empty()) throw Error(ErrorCode::InvalidSpec, "file dataset needs path=");
        return;
    }
    if (count < 1) throw Error(ErrorCode::InvalidSpec, "count must be >= 1");
    if (kind == Kind::lognormal) {
        if (!(sigma > 0.0) || !std::isfinite(mu)) throw Error(ErrorCode::InvalidSpec, "bad lognormal parameters");
        if (!(scale >= 1.0) || scale > 1.8e19) throw Error(ErrorCode::InvalidSpec, "scale must lie in [1, 1.8e19]");
    }
}

std::vector<Key> generate(const DatasetSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case DatasetSpec::Kind::lognormal: return lognormal_keys(spec);
        case DatasetSpec::Kind::sequential: {
            std::vector<Key> keys(spec.count);
            for (std::uint64_t i = 0; i < spec.count; ++i) keys[i] = i + 1;
            return keys;
        }
        case DatasetSpec::Kind::two_slope: return two_slope_keys(spec);
        case DatasetSpec::Kind::file: return load_keys(spec.path);
    }
    throw Error(ErrorCode::InvalidSpec, "unknown dataset kind");
}

std::vector<Key> read_key_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(ErrorCode::Io, "read failed for " + path.string());
    if (bytes.empty()) throw Error(ErrorCode::FileFormat, path.string() + " is empty");
    if (bytes.size() % 8 != 0)
        throw Error(ErrorCode::FileFormat, path.string() + " is not a whole number of u64 keys");
    std::vector<Key> keys(bytes.size() / 8);
    for (std::size_t i = 0; i < keys.size(); ++i) {
        Key k = 0;
        for (int b = 0; b < 8; ++b) k |= Key{bytes[i * 8 + b]} << (8 * b);
        keys[i] = k;
    }
    return keys;
}

std::vector<Key> load_keys(const std::filesystem::path& path) {
    auto keys = read_key_file(path);
    sort_unique(keys);
    return keys;
}

void save_keys(const std::filesystem::path& path, std::span<const Key> keys) {
    std::vector<unsigned char> bytes(keys.size() * 8);
    for (std::size_t i = 0; i < keys.size(); ++i) {
        for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<unsigned char>(keys[i] >> (8 * b));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace aidel
