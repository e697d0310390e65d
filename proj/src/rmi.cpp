#include "aidel/rmi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aidel {

void RmiConfig::validate() const {
    if (models < 1) throw Error(ErrorCode::InvalidConfig, "RMI needs at least one leaf model");
    if (!(delta_fraction > 0.0)) throw Error(ErrorCode::InvalidConfig, "delta_fraction must be positive");
}

std::size_t rmi_select(const LinearModel& root, Key key, std::size_t models, std::uint64_t n) noexcept {
    const double f1 = root.slope * static_cast<double>(key) + root.intercept;
    const double v = std::floor(static_cast<double>(models) * f1 / static_cast<double>(n));
    if (!(v > 0.0)) return 0;
    if (v >= static_cast<double>(models - 1)) return models - 1;
    return static_cast<std::size_t>(v);
}

RmiIndex RmiIndex::build(std::span<const Key> keys, const RmiConfig& config) {
    config.validate();
    if (keys.empty()) throw Error(ErrorCode::EmptyInput, "RMI over no keys");
    for (std::size_t i = 1; i < keys.size(); ++i) {
        if (keys[i] <= keys[i - 1]) throw Error(ErrorCode::UnsortedInput, "RMI keys must be strictly ascending");
    }
    RmiIndex rmi;
    rmi.config_ = config;
    rmi.data_.assign(keys.begin(), keys.end());
    rmi.train();
    return rmi;
}

void RmiIndex::train() {
    const std::size_t n = data_.size();
    const std::size_t m = config_.models;
    const auto records = make_records(data_);
    root_ = fit_least_squares(records);

    bounds_.assign(m + 1, 0);
    std::size_t prev = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = rmi_select(root_, data_[i], m, n);
        if (j < prev) throw std::logic_error("RMI root model is not monotone");
        ++bounds_[j + 1];
        prev = j;
    }
    for (std::size_t j = 0; j < m; ++j) bounds_[j + 1] += bounds_[j];

    leaf_models_.assign(m, LinearModel{});
    fallback_.clear();
    fallback_.resize(m);
    std::vector<char> valid(m, 1);
    const PositionWindow window = full_window(n);
    const std::span<const Record> all(records);

    auto fit_one = [&](std::size_t j) {
        const Position b = bounds_[j], e = bounds_[j + 1];
        if (b == e) {
            leaf_models_[j].intercept = static_cast<double>(std::min<Position>(b, n - 1));
            return;
        }
        const auto sub = all.subspan(b, e - b);
        LinearModel model = fit_least_squares(sub);
        model = with_errors(model, compute_errors(model, sub, window));
        leaf_models_[j] = model;
        if (model.error() > config_.threshold) {
            valid[j] = 0;
            std::vector<Key> ks(data_.begin() + b, data_.begin() + e);
            std::vector<BPlusTree::Value> vs(e - b);
            for (std::size_t i = 0; i < vs.size(); ++i) vs[i] = b + i;
            fallback_[j] = std::make_unique<BPlusTree>(BPlusTree::bulk_load(ks, vs));
        }
    };

    const auto mm = static_cast<std::int64_t>(m);
    if (config_.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 64)
        for (std::int64_t j = 0; j < mm; ++j) fit_one(static_cast<std::size_t>(j));
    } else {
        for (std::int64_t j = 0; j < mm; ++j) fit_one(static_cast<std::size_t>(j));
    }
    valid_.assign(valid.begin(), valid.end());
    delta_capacity_ = std::max<std::size_t>(1, static_cast<std::size_t>(config_.delta_fraction * n));
}

std::size_t RmiIndex::select_model(Key key) const noexcept {
    return rmi_select(root_, key, leaf_models_.size(), data_.size());
}

bool RmiIndex::contains(Key key) const {
    const std::size_t j = select_model(key);
    bool hit = false;
    if (bounds_[j] != bounds_[j + 1]) {
        if (valid_[j]) {
            const auto r = predict(leaf_models_[j], key, full_window(data_.size()));
            hit = std::binary_search(data_.begin() + r.lo, data_.begin() + r.hi + 1, key);
        } else {
            hit = fallback_[j]->contains(key);
        }
    }
    return hit || std::binary_search(delta_.begin(), delta_.end(), key);
}

InsertResult RmiIndex::insert(Key key) {
    if (contains(key)) return InsertResult::duplicate;
    delta_.insert(std::upper_bound(delta_.begin(), delta_.end(), key), key);
    if (delta_.size() > delta_capacity_) {
        // Leaf models depend on the root's normalization: everything is retrained.
        std::vector<Key> merged(data_.size() + delta_.size());
        std::merge(data_.begin(), data_.end(), delta_.begin(), delta_.end(), merged.begin());
        data_ = std::move(merged);
        delta_.clear();
        train();
        ++rebuilds_;
    }
    return InsertResult::inserted;
}

std::size_t RmiIndex::invalid_count() const noexcept {
    return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), false));
}

std::size_t RmiIndex::count_exceeding(std::uint64_t threshold) const noexcept {
    return static_cast<std::size_t>(std::count_if(leaf_models_.begin(), leaf_models_.end(),
                                                  [&](const LinearModel& m) { return m.error() > threshold; }));
}

std::uint64_t RmiIndex::metadata_bytes() const noexcept {
    std::uint64_t bytes = sizeof(LinearModel) * (leaf_models_.size() + 1) + (valid_.size() + 7) / 8;
    for (const auto& t : fallback_) {
        if (t) bytes += t->inner_bytes();
    }
    return bytes;
}

std::vector<Segment> equal_count_build(std::span<const Key> keys, std::size_t models, Exec exec) {
    if (keys.empty()) throw Error(ErrorCode::EmptyInput, "equal_count_build over no keys");
    if (models < 1 || models > keys.size())
        throw Error(ErrorCode::InvalidConfig, "model count must lie in [1, key count]");
    for (std::size_t i = 1; i < keys.size(); ++i) {
        if (keys[i] <= keys[i - 1]) throw Error(ErrorCode::UnsortedInput, "keys must be strictly ascending");
    }
    const std::size_t n = keys.size();
    const auto records = make_records(keys);
    const std::span<const Record> all(records);

    std::vector<Segment> out(models);
    const std::size_t base = n / models, extra = n % models;
    Position start = 0;
    for (std::size_t j = 0; j < models; ++j) {
        out[j].start = start;
        out[j].len = base + (j < extra ? 1 : 0);
        out[j].first_key = keys[start];
        start += out[j].len;
    }

    auto fit_one = [&](std::size_t j) {
        const auto sub = all.subspan(out[j].start, out[j].len);
        LinearModel model = fit_least_squares(sub);
        out[j].model = with_errors(model, compute_errors(model, sub, n));
    };
    const auto mm = static_cast<std::int64_t>(models);
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t j = 0; j < mm; ++j) fit_one(static_cast<std::size_t>(j));
    } else {
        for (std::int64_t j = 0; j < mm; ++j) fit_one(static_cast<std::size_t>(j));
    }
    return out;
}

BinarySearchIndex::BinarySearchIndex(std::vector<Key> keys) : keys_(std::move(keys)) {
    for (std::size_t i = 1; i < keys_.size(); ++i) {
        if (keys_[i] <= keys_[i - 1]) throw Error(ErrorCode::UnsortedInput, "keys must be strictly ascending");
    }
}

bool BinarySearchIndex::contains(Key key) const noexcept {
    return std::binary_search(keys_.begin(), keys_.end(), key);
}

}  // namespace aidel
