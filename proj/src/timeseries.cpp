#include "occupancy/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "occupancy/error.hpp"
#include "occupancy/textio.hpp"

namespace occupancy {

namespace chr = std::chrono;

Timestamp make_timestamp(int year, unsigned month, unsigned day, unsigned hour, unsigned minute) {
    const chr::year_month_day ymd{chr::year{year}, chr::month{month}, chr::day{day}};
    if (!ymd.ok() || hour > 23 || minute > 59) {
        throw DomainError("invalid calendar date/time");
    }
    const auto days = chr::sys_days{ymd}.time_since_epoch().count();
    return Timestamp{static_cast<std::int64_t>(days) * 1440 + hour * 60 + minute};
}

CivilTime to_civil(Timestamp ts) {
    std::int64_t days = ts.minutes / 1440;
    std::int64_t rem = ts.minutes % 1440;
    if (rem < 0) {
        rem += 1440;
        --days;
    }
    const chr::sys_days sd{chr::days{days}};
    const chr::year_month_day ymd{sd};
    CivilTime c;
    c.year = static_cast<int>(ymd.year());
    c.month = static_cast<unsigned>(ymd.month());
    c.day = static_cast<unsigned>(ymd.day());
    c.hour = static_cast<unsigned>(rem / 60);
    c.minute = static_cast<unsigned>(rem % 60);
    c.day_of_week = chr::weekday{sd}.iso_encoding() - 1;
    return c;
}

namespace {

std::optional<unsigned> digits(std::string_view s, std::size_t pos, std::size_t n) {
    if (pos + n > s.size()) return std::nullopt;
    unsigned v = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
        if (s[i] < '0' || s[i] > '9') return std::nullopt;
        v = v * 10 + static_cast<unsigned>(s[i] - '0');
    }
    return v;
}

}  // namespace

Timestamp parse_timestamp(std::string_view s) {
    // YYYY-MM-DDTHH:MM[:SS]
    const bool shape_ok = (s.size() == 16 || s.size() == 19) && s[4] == '-' && s[7] == '-' &&
                          (s[10] == 'T' || s[10] == ' ') && s[13] == ':' &&
                          (s.size() == 16 || s[16] == ':');
    if (!shape_ok) {
        throw DomainError("timestamp '" + std::string(s) + "' is not YYYY-MM-DDTHH:MM");
    }
    auto y = digits(s, 0, 4), mo = digits(s, 5, 2), d = digits(s, 8, 2), h = digits(s, 11, 2),
         mi = digits(s, 14, 2);
    if (!y || !mo || !d || !h || !mi) {
        throw DomainError("timestamp '" + std::string(s) + "' has non-digit fields");
    }
    if (s.size() == 19) {
        auto sec = digits(s, 17, 2);
        if (!sec || *sec != 0) {
            throw DomainError("timestamp '" + std::string(s) + "' is not minute aligned");
        }
    }
    return make_timestamp(static_cast<int>(*y), *mo, *d, *h, *mi);
}

std::string format_timestamp(Timestamp ts) {
    const CivilTime c = to_civil(ts);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02u:%02u", c.year, c.month, c.day, c.hour,
                  c.minute);
    return buf;
}

// ---------------------------------------------------------------------------

namespace {

void validate_record(const EventRecord& r, const std::string& where) {
    if (r.occupancy != 0 && r.occupancy != 1) {
        throw DomainError(where + "occupancy must be 0 or 1, got " + std::to_string(r.occupancy));
    }
    const double vals[] = {r.airflow_actual,          r.airflow_setpoint,
                           r.cooling_setpoint,        r.heating_setpoint,
                           r.damper_position_command, r.discharge_temperature,
                           r.hw_valve_command,        r.space_temperature_actual};
    for (double v : vals) {
        if (!std::isfinite(v)) throw DomainError(where + "non-finite sensor reading");
    }
}

}  // namespace

Dataset::Dataset(std::string room_id, std::vector<EventRecord> records)
    : room_id_(std::move(room_id)), records_(std::move(records)) {
    for (std::size_t i = 0; i < records_.size(); ++i) {
        validate_record(records_[i], "record " + std::to_string(i) + ": ");
        if (i > 0 && !(records_[i - 1].timestamp < records_[i].timestamp)) {
            throw OrderingError("record " + std::to_string(i) +
                                ": timestamps must strictly increase");
        }
    }
}

bool Dataset::operator==(const Dataset& o) const {
    if (room_id_ != o.room_id_ || records_.size() != o.records_.size()) return false;
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const auto& a = records_[i];
        const auto& b = o.records_[i];
        if (a.timestamp != b.timestamp || a.airflow_actual != b.airflow_actual ||
            a.airflow_setpoint != b.airflow_setpoint || a.cooling_setpoint != b.cooling_setpoint ||
            a.heating_setpoint != b.heating_setpoint ||
            a.damper_position_command != b.damper_position_command ||
            a.discharge_temperature != b.discharge_temperature ||
            a.hw_valve_command != b.hw_valve_command ||
            a.space_temperature_actual != b.space_temperature_actual ||
            a.occupancy != b.occupancy) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// CSV

Dataset read_csv(std::istream& in, const std::string& room_id) {
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) throw SchemaError("empty CSV: missing header row");
    ++lineno;
    const auto header = split_fields(trim(line), ',');
    std::array<std::size_t, kCsvColumns.size()> col_of{};
    col_of.fill(static_cast<std::size_t>(-1));
    for (std::size_t c = 0; c < header.size(); ++c) {
        const auto name = trim(header[c]);
        const auto it = std::find(kCsvColumns.begin(), kCsvColumns.end(), name);
        if (it == kCsvColumns.end()) {
            throw SchemaError("unknown column '" + std::string(name) + "'");
        }
        const auto k = static_cast<std::size_t>(it - kCsvColumns.begin());
        if (col_of[k] != static_cast<std::size_t>(-1)) {
            throw SchemaError("duplicate column '" + std::string(name) + "'");
        }
        col_of[k] = c;
    }
    for (std::size_t k = 0; k < kCsvColumns.size(); ++k) {
        if (col_of[k] == static_cast<std::size_t>(-1)) {
            throw SchemaError("missing column '" + std::string(kCsvColumns[k]) + "'");
        }
    }

    std::vector<EventRecord> records;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto fields = split_fields(body, ',');
        if (fields.size() != header.size()) {
            throw ParseError(lineno, "expected " + std::to_string(header.size()) +
                                         " fields, got " + std::to_string(fields.size()));
        }
        auto field = [&](std::size_t k) -> std::string_view {
            const auto f = trim(fields[col_of[k]]);
            if (f.empty()) {
                throw ParseError(lineno, "missing value for '" + std::string(kCsvColumns[k]) + "'");
            }
            return f;
        };
        auto real = [&](std::size_t k) {
            const auto v = parse_double(field(k));
            if (!v) {
                throw ParseError(lineno, "'" + std::string(field(k)) + "' is not a number (" +
                                             std::string(kCsvColumns[k]) + ")");
            }
            return *v;
        };

        EventRecord r;
        try {
            r.timestamp = parse_timestamp(field(0));
        } catch (const DomainError& e) {
            throw ParseError(lineno, e.what());
        }
        r.airflow_actual = real(1);
        r.airflow_setpoint = real(2);
        r.cooling_setpoint = real(3);
        r.heating_setpoint = real(4);
        r.damper_position_command = real(5);
        r.discharge_temperature = real(6);
        r.hw_valve_command = real(7);
        r.space_temperature_actual = real(8);
        const double occ = real(9);
        if (occ != 0.0 && occ != 1.0) {
            throw DomainError("line " + std::to_string(lineno) + ": occupancy must be 0 or 1, got " +
                              std::string(field(9)));
        }
        r.occupancy = occ == 1.0 ? 1 : 0;
        validate_record(r, "line " + std::to_string(lineno) + ": ");
        if (!records.empty() && !(records.back().timestamp < r.timestamp)) {
            throw OrderingError("line " + std::to_string(lineno) + ": timestamp " +
                                format_timestamp(r.timestamp) + " does not follow " +
                                format_timestamp(records.back().timestamp));
        }
        records.push_back(r);
    }
    return Dataset(room_id, std::move(records));
}

Dataset load_csv(const std::filesystem::path& path, const std::string& room_id) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_csv(in, room_id);
}

void write_csv(std::ostream& out, const Dataset& d) {
    for (std::size_t k = 0; k < kCsvColumns.size(); ++k) {
        out << (k ? "," : "") << kCsvColumns[k];
    }
    out << '\n';
    char buf[256];
    for (const auto& r : d.records()) {
        std::snprintf(buf, sizeof buf, "%s,%.2f,%.2f,%.2f,%.2f,%.2f,%.2f,%.2f,%.2f,%d\n",
                      format_timestamp(r.timestamp).c_str(), r.airflow_actual, r.airflow_setpoint,
                      r.cooling_setpoint, r.heating_setpoint, r.damper_position_command,
                      r.discharge_temperature, r.hw_valve_command, r.space_temperature_actual,
                      r.occupancy);
        out << buf;
    }
}

// ---------------------------------------------------------------------------
// Features

FeatureLayout FeatureLayout::standard(bool with_occupancy) {
    FeatureLayout l;
    l.names = {"airflow_actual",    "airflow_setpoint",        "cooling_setpoint",
               "heating_setpoint",  "damper_position_command", "discharge_temperature",
               "hw_valve_command",  "space_temperature_actual", "day_of_week",
               "hour",              "month",                   "is_weekend"};
    l.kinds.assign(l.names.size(), FeatureKind::Continuous);
    l.kinds.back() = FeatureKind::Binary;
    if (with_occupancy) {
        l.names.emplace_back("occupancy");
        l.kinds.push_back(FeatureKind::Binary);
    }
    return l;
}

FeatureMatrix::FeatureMatrix(FeatureLayout layout, std::size_t rows)
    : layout_(std::move(layout)), rows_(rows), data_(rows * layout_.size(), 0.0) {}

FeatureMatrix FeatureMatrix::slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > rows_) throw IndexError("feature slice out of range");
    FeatureMatrix m(layout_, end - begin);
    std::copy(data_.begin() + static_cast<std::ptrdiff_t>(begin * cols()),
              data_.begin() + static_cast<std::ptrdiff_t>(end * cols()), m.data_.begin());
    return m;
}

FeatureMatrix engineer_features(const Dataset& d, bool with_occupancy) {
    FeatureMatrix m(FeatureLayout::standard(with_occupancy), d.size());
    for (std::size_t t = 0; t < d.size(); ++t) {
        const auto& r = d[t];
        const CivilTime c = to_civil(r.timestamp);
        auto x = m.row(t);
        x[0] = r.airflow_actual;
        x[1] = r.airflow_setpoint;
        x[2] = r.cooling_setpoint;
        x[3] = r.heating_setpoint;
        x[4] = r.damper_position_command;
        x[5] = r.discharge_temperature;
        x[6] = r.hw_valve_command;
        x[7] = r.space_temperature_actual;
        x[8] = c.day_of_week;
        x[9] = c.hour;
        x[10] = c.month;
        x[11] = c.day_of_week >= 5 ? 1.0 : 0.0;
        if (with_occupancy) x[12] = r.occupancy;
    }
    return m;
}

// ---------------------------------------------------------------------------
// Normalization

NormStats fit_normalizer(const FeatureMatrix& train, std::string fitted_on) {
    if (train.rows() == 0) throw ShapeError("fit_normalizer: empty training features");
    const std::size_t n = train.cols();
    NormStats s;
    s.layout = train.layout();
    s.mean.assign(n, 0.0);
    s.std.assign(n, 1.0);
    s.fitted_on = std::move(fitted_on);

    for (std::size_t j = 0; j < n; ++j) {
        if (s.layout.kinds[j] == FeatureKind::Binary) continue;
        double sum = 0.0;
        for (std::size_t t = 0; t < train.rows(); ++t) sum += train.row(t)[j];
        const double mean = sum / static_cast<double>(train.rows());
        double ss = 0.0;
        for (std::size_t t = 0; t < train.rows(); ++t) {
            const double dv = train.row(t)[j] - mean;
            ss += dv * dv;
        }
        const double sd =
            train.rows() > 1 ? std::sqrt(ss / static_cast<double>(train.rows() - 1)) : 0.0;
        s.mean[j] = mean;
        if (sd > 0.0 && std::isfinite(sd)) {
            s.std[j] = sd;
        } else {
            s.std[j] = 1.0;
            std::clog << "warning: feature '" << s.layout.names[j]
                      << "' has zero variance on " << s.fitted_on << "; std floored to 1\n";
        }
    }
    return s;
}

namespace {

void check_dims(const NormStats& stats, const FeatureMatrix& f) {
    if (stats.layout.size() != f.cols() || stats.mean.size() != f.cols() ||
        stats.std.size() != f.cols()) {
        throw ShapeError("normalizer has " + std::to_string(stats.mean.size()) +
                         " features, input has " + std::to_string(f.cols()));
    }
}

}  // namespace

FeatureMatrix apply_normalizer(const NormStats& stats, const FeatureMatrix& features) {
    check_dims(stats, features);
    FeatureMatrix out = features;
    for (std::size_t t = 0; t < out.rows(); ++t) {
        auto x = out.row(t);
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (stats.layout.kinds[j] == FeatureKind::Binary) continue;
            x[j] = (x[j] - stats.mean[j]) / stats.std[j];
        }
    }
    return out;
}

FeatureMatrix invert_normalizer(const NormStats& stats, const FeatureMatrix& normalized) {
    check_dims(stats, normalized);
    FeatureMatrix out = normalized;
    for (std::size_t t = 0; t < out.rows(); ++t) {
        auto x = out.row(t);
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (stats.layout.kinds[j] == FeatureKind::Binary) continue;
            x[j] = x[j] * stats.std[j] + stats.mean[j];
        }
    }
    return out;
}

void write_norm_stats(std::ostream& out, const NormStats& s) {
    out << "fitted_on=" << s.fitted_on << '\n';
    out << "n_features=" << s.layout.size() << '\n';
    for (std::size_t j = 0; j < s.layout.size(); ++j) {
        const std::string p = "feature." + std::to_string(j) + '.';
        out << p << "name=" << s.layout.names[j] << '\n';
        out << p << "kind="
            << (s.layout.kinds[j] == FeatureKind::Binary ? "binary" : "continuous") << '\n';
        out << p << "mean=" << format_exact(s.mean[j]) << '\n';
        out << p << "std=" << format_exact(s.std[j]) << '\n';
    }
}

NormStats read_norm_stats(std::istream& in) {
    const KeyValues kv = read_key_values(in);
    NormStats s;
    s.fitted_on = kv.get("fitted_on");
    const std::size_t n = kv.get_size("n_features");
    s.layout.names.resize(n);
    s.layout.kinds.resize(n);
    s.mean.resize(n);
    s.std.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::string p = "feature." + std::to_string(j) + '.';
        s.layout.names[j] = kv.get(p + "name");
        const std::string kind = kv.get(p + "kind");
        if (kind == "binary") {
            s.layout.kinds[j] = FeatureKind::Binary;
        } else if (kind == "continuous") {
            s.layout.kinds[j] = FeatureKind::Continuous;
        } else {
            throw SchemaError("unknown feature kind '" + kind + "'");
        }
        s.mean[j] = kv.get_double(p + "mean");
        s.std[j] = kv.get_double(p + "std");
        if (!(s.std[j] > 0.0)) throw DomainError("normalizer std must be positive");
    }
    return s;
}

void save_norm_stats(const std::filesystem::path& path, const NormStats& stats) {
    std::ostringstream os;
    write_norm_stats(os, stats);
    write_file_atomic(path, os.str());
}

NormStats load_norm_stats(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_norm_stats(in);
}

// ---------------------------------------------------------------------------
// Split / targets

std::size_t train_size(std::size_t total, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw ConfigError("train fraction must lie in (0, 1)");
    }
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(total)));
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& d, double fraction) {
    const std::size_t n_train = train_size(d.size(), fraction);
    if (d.size() < 2 || n_train == 0 || n_train == d.size()) {
        throw ConfigError("degenerate split: " + std::to_string(d.size()) + " records at fraction " +
                          std::to_string(fraction) + " leaves an empty side");
    }
    const auto recs = d.records();
    std::vector<EventRecord> train(recs.begin(), recs.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<EventRecord> test(recs.begin() + static_cast<std::ptrdiff_t>(n_train), recs.end());
    return {Dataset(d.room_id(), std::move(train)), Dataset(d.room_id(), std::move(test))};
}

WindowSpec::WindowSpec(int w) : minutes(w) {
    if (w < 1) throw ConfigError("window must be >= 1 minute, got " + std::to_string(w));
}

bool WindowSpec::supported() const noexcept {
    return std::find(kSupportedWindows.begin(), kSupportedWindows.end(), minutes) !=
           kSupportedWindows.end();
}

int aggregate_target(const Dataset& d, std::size_t t, WindowSpec w) {
    if (d.size() < 2 || t + 1 >= d.size()) {
        throw IndexError("target index " + std::to_string(t) + " out of range for T=" +
                         std::to_string(d.size()));
    }
    const std::size_t last = std::min(t + static_cast<std::size_t>(w.minutes), d.size() - 1);
    for (std::size_t k = t + 1; k <= last; ++k) {
        if (d[k].occupancy == 1) return 1;
    }
    return 0;
}

std::vector<int> window_targets(const Dataset& d, WindowSpec w) {
    if (d.size() < 2) return {};
    const std::size_t T = d.size();
    const auto W = static_cast<std::size_t>(w.minutes);
    // next_occupied[k]: smallest index >= k with occupancy 1, or T.
    std::vector<std::size_t> next_occupied(T + 1, T);
    for (std::size_t k = T; k-- > 0;) {
        next_occupied[k] = d[k].occupancy == 1 ? k : next_occupied[k + 1];
    }
    std::vector<int> out(T - 1);
    for (std::size_t t = 0; t + 1 < T; ++t) {
        const std::size_t last = std::min(t + W, T - 1);
        out[t] = next_occupied[t + 1] <= last ? 1 : 0;
    }
    return out;
}

}  // namespace occupancy
