#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace aidel {

using Key = std::uint64_t;
using Position = std::uint64_t;

// Kernels that have an OpenMP path take this; serial is the reference.
enum class Exec : std::uint8_t { serial, parallel };

enum class ErrorCode {
    EmptyInput,
    UnsortedInput,
    InvalidConfig,
    ExtentMismatch,
    InvalidRange,
    UnknownSegment,
    TooManyShards,
    InvalidSpec,
    FileFormat,
    Io,
    InvalidArgument,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

struct Record {
    Key key;
    Position position;

    friend bool operator==(const Record&, const Record&) = default;
};

// Inclusive range of positions a prediction is clamped into.
struct PositionWindow {
    Position lo;
    Position hi;
};

inline PositionWindow full_window(std::uint64_t n_positions) {
    return {0, n_positions == 0 ? 0 : n_positions - 1};
}

struct ErrorStats {
    std::int64_t min_err = 0;
    std::int64_t max_err = 0;
    std::uint64_t error = 0;  // max(|min_err|, |max_err|)

    friend bool operator==(const ErrorStats&, const ErrorStats&) = default;
};

// y = slope * key + intercept, with the residual spread observed on its training set.
struct LinearModel {
    double slope = 0.0;
    double intercept = 0.0;
    std::int64_t min_err = 0;
    std::int64_t max_err = 0;

    std::uint64_t error() const noexcept;
    ErrorStats stats() const noexcept;

    friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

LinearModel with_errors(LinearModel model, const ErrorStats& stats) noexcept;

ErrorStats make_error_stats(std::int64_t min_err, std::int64_t max_err) noexcept;

// Ordinary least squares of position on key. One record yields slope 0.
LinearModel fit_least_squares(std::span<const Record> records);

// floor(slope * key + intercept) clamped into the window.
Position predict_position(const LinearModel& model, Key key, PositionWindow window) noexcept;

// Residuals y - predict_position(x) over all records.
ErrorStats compute_errors(const LinearModel& model, std::span<const Record> records,
                          PositionWindow window);
ErrorStats compute_errors(const LinearModel& model, std::span<const Record> records,
                          std::uint64_t n_positions);

struct PositionRange {
    Position lo;
    Position hi;

    friend bool operator==(const PositionRange&, const PositionRange&) = default;
};

// Search interval [pred + min_err, pred + max_err] clamped into the window.
PositionRange predict(const LinearModel& model, Key key, PositionWindow window) noexcept;

// Running sums for an OLS fit that grows and shrinks at the tail. Sums are kept
// relative to the first record added so that large keys do not swamp the
// centered moments.
class OlsAccumulator {
public:
    void clear() noexcept;
    void add(const Record& r) noexcept;
    void remove(const Record& r) noexcept;
    void add(std::span<const Record> records) noexcept;
    void remove(std::span<const Record> records) noexcept;

    std::uint64_t count() const noexcept { return n_; }
    LinearModel model() const noexcept;

private:
    std::uint64_t n_ = 0;
    bool anchored_ = false;
    long double x0_ = 0, y0_ = 0;
    long double sx_ = 0, sy_ = 0, sxx_ = 0, sxy_ = 0;
};

}  // namespace aidel
