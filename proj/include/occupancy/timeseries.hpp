#pragma once

// Building telemetry data model: per-minute event records, CSV ingestion,
// calendar features, z-score normalization, chronological splitting and
// future-window occupancy targets.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace occupancy {

/// Minutes since 1970-01-01T00:00 (UTC, no time zone handling).
struct Timestamp {
    std::int64_t minutes = 0;

    auto operator<=>(const Timestamp&) const = default;
};

struct CivilTime {
    int year = 1970;
    unsigned month = 1;   // 1..12
    unsigned day = 1;     // 1..31
    unsigned hour = 0;    // 0..23
    unsigned minute = 0;  // 0..59
    unsigned day_of_week = 3;  // Monday = 0
};

Timestamp make_timestamp(int year, unsigned month, unsigned day, unsigned hour = 0,
                         unsigned minute = 0);
CivilTime to_civil(Timestamp ts);

/// Parses "YYYY-MM-DDTHH:MM" (a space is accepted instead of 'T'; a trailing
/// ":00" seconds field is accepted). Throws DomainError on anything else.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp ts);

struct EventRecord {
    Timestamp timestamp;
    double airflow_actual = 0.0;
    double airflow_setpoint = 0.0;
    double cooling_setpoint = 0.0;
    double heating_setpoint = 0.0;
    double damper_position_command = 0.0;
    double discharge_temperature = 0.0;
    double hw_valve_command = 0.0;
    double space_temperature_actual = 0.0;
    int occupancy = 0;
};

inline constexpr std::array<std::string_view, 10> kCsvColumns = {
    "timestamp",           "airflow_actual",          "airflow_setpoint",
    "cooling_setpoint",    "heating_setpoint",        "damper_position_command",
    "discharge_temperature", "hw_valve_command",      "space_temperature_actual",
    "occupancy"};

/// One room's telemetry. Records are validated on construction: occupancy in
/// {0,1}, all readings finite, timestamps strictly increasing.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::string room_id, std::vector<EventRecord> records);

    const std::string& room_id() const noexcept { return room_id_; }
    std::span<const EventRecord> records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    const EventRecord& operator[](std::size_t i) const { return records_[i]; }

    bool operator==(const Dataset&) const;

private:
    std::string room_id_;
    std::vector<EventRecord> records_;
};

Dataset load_csv(const std::filesystem::path& path, const std::string& room_id);
Dataset read_csv(std::istream& in, const std::string& room_id);
void write_csv(std::ostream& out, const Dataset& d);

// ---------------------------------------------------------------------------
// Features

enum class FeatureKind { Continuous, Binary };

struct FeatureLayout {
    std::vector<std::string> names;
    std::vector<FeatureKind> kinds;

    std::size_t size() const noexcept { return names.size(); }
    bool operator==(const FeatureLayout&) const = default;

    /// The 12-column layout: 8 sensor channels, day_of_week, hour, month,
    /// is_weekend. With `with_occupancy`, the current occupancy reading is
    /// appended as a 13th binary column.
    static FeatureLayout standard(bool with_occupancy = false);
};

/// Row-major T x n feature matrix.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(FeatureLayout layout, std::size_t rows);

    const FeatureLayout& layout() const noexcept { return layout_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return layout_.size(); }

    std::span<double> row(std::size_t t) { return {data_.data() + t * cols(), cols()}; }
    std::span<const double> row(std::size_t t) const {
        return {data_.data() + t * cols(), cols()};
    }
    std::span<const double> data() const noexcept { return data_; }

    /// Rows [begin, end) as a new matrix.
    FeatureMatrix slice(std::size_t begin, std::size_t end) const;

private:
    FeatureLayout layout_;
    std::size_t rows_ = 0;
    std::vector<double> data_;
};

FeatureMatrix engineer_features(const Dataset& d, bool with_occupancy = false);

// ---------------------------------------------------------------------------
// Normalization

struct NormStats {
    FeatureLayout layout;
    std::vector<double> mean;
    std::vector<double> std;
    std::string fitted_on;
};

/// Per-column sample mean and (n-1) standard deviation. Binary columns get
/// mean 0 / std 1. A zero standard deviation is floored to 1 with a warning
/// on std::clog.
NormStats fit_normalizer(const FeatureMatrix& train, std::string fitted_on = "train");
FeatureMatrix apply_normalizer(const NormStats& stats, const FeatureMatrix& features);
FeatureMatrix invert_normalizer(const NormStats& stats, const FeatureMatrix& normalized);

void write_norm_stats(std::ostream& out, const NormStats& stats);
NormStats read_norm_stats(std::istream& in);
void save_norm_stats(const std::filesystem::path& path, const NormStats& stats);
NormStats load_norm_stats(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Splitting and targets

/// Train = first floor(fraction * T) records, test = the rest.
std::pair<Dataset, Dataset> split_train_test(const Dataset& d, double fraction);
std::size_t train_size(std::size_t total, double fraction);

inline constexpr std::array<int, 8> kSupportedWindows = {1, 5, 10, 30, 60, 120, 240, 480};

struct WindowSpec {
    int minutes = 1;

    /// Throws ConfigError unless minutes >= 1.
    explicit WindowSpec(int w);
    bool supported() const noexcept;
};

/// 1 iff any occupancy in records t+1 .. min(t+W, T-1) (0-based) is 1.
/// Valid for 0 <= t <= T-2; windows running past the end use what is left.
int aggregate_target(const Dataset& d, std::size_t t, WindowSpec w);

/// aggregate_target for t = 0 .. T-2, computed in one linear pass.
std::vector<int> window_targets(const Dataset& d, WindowSpec w);

}  // namespace occupancy
