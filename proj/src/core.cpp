#include "aidel/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace aidel {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::UnsortedInput: return "UnsortedInput";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::ExtentMismatch: return "ExtentMismatch";
        case ErrorCode::InvalidRange: return "InvalidRange";
        case ErrorCode::UnknownSegment: return "UnknownSegment";
        case ErrorCode::TooManyShards: return "TooManyShards";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::FileFormat: return "FileFormat";
        case ErrorCode::Io: return "Io";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

namespace {

std::uint64_t magnitude(std::int64_t v) noexcept {
    return v < 0 ? std::uint64_t(0) - static_cast<std::uint64_t>(v) : static_cast<std::uint64_t>(v);
}

std::int64_t clamp_signed(std::int64_t v, PositionWindow w) noexcept {
    const auto lo = static_cast<std::int64_t>(w.lo);
    const auto hi = static_cast<std::int64_t>(w.hi);
    return std::clamp(v, lo, hi);
}

}  // namespace

ErrorStats make_error_stats(std::int64_t min_err, std::int64_t max_err) noexcept {
    return {min_err, max_err, std::max(magnitude(min_err), magnitude(max_err))};
}

std::uint64_t LinearModel::error() const noexcept {
    return std::max(magnitude(min_err), magnitude(max_err));
}

ErrorStats LinearModel::stats() const noexcept { return make_error_stats(min_err, max_err); }

LinearModel with_errors(LinearModel model, const ErrorStats& stats) noexcept {
    model.min_err = stats.min_err;
    model.max_err = stats.max_err;
    return model;
}

LinearModel fit_least_squares(std::span<const Record> records) {
    if (records.empty()) throw Error(ErrorCode::EmptyInput, "fit_least_squares on no records");
    const auto n = static_cast<long double>(records.size());
    const auto x0 = static_cast<long double>(records.front().key);

    long double sum_dx = 0, sum_y = 0;
    for (const auto& r : records) {
        sum_dx += static_cast<long double>(r.key) - x0;
        sum_y += static_cast<long double>(r.position);
    }
    const long double mean_dx = sum_dx / n;
    const long double mean_y = sum_y / n;

    long double sxx = 0, sxy = 0;
    for (const auto& r : records) {
        const long double cx = (static_cast<long double>(r.key) - x0) - mean_dx;
        sxx += cx * cx;
        sxy += cx * (static_cast<long double>(r.position) - mean_y);
    }

    LinearModel m;
    if (records.size() == 1 || sxx <= 0) {
        m.slope = 0.0;
        m.intercept = static_cast<double>(mean_y);
        return m;
    }
    const long double slope = sxy / sxx;
    m.slope = static_cast<double>(slope);
    m.intercept = static_cast<double>(mean_y - slope * (x0 + mean_dx));
    return m;
}

Position predict_position(const LinearModel& model, Key key, PositionWindow window) noexcept {
    // Values within rounding noise below an integer count as that integer, so
    // exactly linear data predicts exactly.
    const double term = model.slope * static_cast<double>(key);
    const double raw = term + model.intercept;
    const double slack = 8 * std::numeric_limits<double>::epsilon() * (std::fabs(term) + std::fabs(model.intercept));
    const double v = std::floor(raw + slack);
    if (!(v > static_cast<double>(window.lo))) return window.lo;  // also catches NaN
    if (v >= static_cast<double>(window.hi)) return window.hi;
    return static_cast<Position>(v);
}

ErrorStats compute_errors(const LinearModel& model, std::span<const Record> records,
                          PositionWindow window) {
    if (records.empty()) throw Error(ErrorCode::EmptyInput, "compute_errors on no records");
    std::int64_t lo = std::numeric_limits<std::int64_t>::max();
    std::int64_t hi = std::numeric_limits<std::int64_t>::min();
    for (const auto& r : records) {
        const auto pred = static_cast<std::int64_t>(predict_position(model, r.key, window));
        const std::int64_t residual = static_cast<std::int64_t>(r.position) - pred;
        lo = std::min(lo, residual);
        hi = std::max(hi, residual);
    }
    return make_error_stats(lo, hi);
}

ErrorStats compute_errors(const LinearModel& model, std::span<const Record> records,
                          std::uint64_t n_positions) {
    return compute_errors(model, records, full_window(n_positions));
}

PositionRange predict(const LinearModel& model, Key key, PositionWindow window) noexcept {
    const auto pred = static_cast<std::int64_t>(predict_position(model, key, window));
    const auto lo = clamp_signed(pred + model.min_err, window);
    const auto hi = clamp_signed(pred + model.max_err, window);
    return {static_cast<Position>(lo), static_cast<Position>(std::max(lo, hi))};
}

void OlsAccumulator::clear() noexcept { *this = OlsAccumulator{}; }

void OlsAccumulator::add(const Record& r) noexcept {
    if (!anchored_) {
        x0_ = static_cast<long double>(r.key);
        y0_ = static_cast<long double>(r.position);
        anchored_ = true;
    }
    const long double dx = static_cast<long double>(r.key) - x0_;
    const long double dy = static_cast<long double>(r.position) - y0_;
    ++n_;
    sx_ += dx;
    sy_ += dy;
    sxx_ += dx * dx;
    sxy_ += dx * dy;
}

void OlsAccumulator::remove(const Record& r) noexcept {
    const long double dx = static_cast<long double>(r.key) - x0_;
    const long double dy = static_cast<long double>(r.position) - y0_;
    --n_;
    sx_ -= dx;
    sy_ -= dy;
    sxx_ -= dx * dx;
    sxy_ -= dx * dy;
}

void OlsAccumulator::add(std::span<const Record> records) noexcept {
    for (const auto& r : records) add(r);
}

void OlsAccumulator::remove(std::span<const Record> records) noexcept {
    for (const auto& r : records) remove(r);
}

LinearModel OlsAccumulator::model() const noexcept {
    LinearModel m;
    if (n_ == 0) return m;
    const auto n = static_cast<long double>(n_);
    const long double mean_dx = sx_ / n;
    const long double mean_dy = sy_ / n;
    const long double cxx = sxx_ - sx_ * mean_dx;
    const long double cxy = sxy_ - sx_ * mean_dy;
    if (n_ == 1 || cxx <= 0) {
        m.intercept = static_cast<double>(y0_ + mean_dy);
        return m;
    }
    const long double slope = cxy / cxx;
    m.slope = static_cast<double>(slope);
    m.intercept = static_cast<double>((y0_ + mean_dy) - slope * (x0_ + mean_dx));
    return m;
}

}  // namespace aidel
