#include "occupancy/energy.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "occupancy/error.hpp"
#include "occupancy/textio.hpp"

namespace occupancy {

void EnergyConfig::validate() const {
    if (!(cp > 0.0) || !std::isfinite(cp)) throw ConfigError("cp must be positive");
    if (!(unoccupied_threshold > 0.0 && unoccupied_threshold < 1.0)) {
        throw ConfigError("unoccupied threshold must lie in (0, 1)");
    }
    for (unsigned m : heating_months) {
        if (m < 1 || m > 12) throw ConfigError("heating month out of range: " + std::to_string(m));
    }
    if (control_window < 1) throw ConfigError("control window must be >= 1");
}

bool EnergyConfig::is_heating_month(unsigned month) const noexcept {
    return std::find(heating_months.begin(), heating_months.end(), month) != heating_months.end();
}

double select_setpoint(const EventRecord& r, const EnergyConfig& cfg) {
    return cfg.is_heating_month(to_civil(r.timestamp).month) ? r.heating_setpoint
                                                             : r.cooling_setpoint;
}

double step_energy(const EventRecord& r, const EnergyConfig& cfg) {
    const double delta_t = select_setpoint(r, cfg) - r.space_temperature_actual;
    const double airflow = std::max(r.airflow_actual, 0.0);
    return cfg.cp * airflow * std::abs(delta_t);
}

EnergySeries simulate_rbc(const Dataset& test, const EnergyConfig& cfg) {
    EnergySeries s;
    s.room_id = test.room_id();
    s.energy.reserve(test.size());
    for (const auto& r : test.records()) {
        s.energy.push_back(step_energy(r, cfg));
        s.total += s.energy.back();
    }
    return s;
}

SavingsEstimate estimate_savings(const EnergySeries& series, std::span<const double> preds,
                                 const EnergyConfig& cfg) {
    if (preds.size() != series.energy.size()) {
        throw ShapeError("estimate_savings: " + std::to_string(preds.size()) +
                         " predictions for " + std::to_string(series.energy.size()) + " timesteps");
    }
    SavingsEstimate est;
    for (std::size_t t = 0; t < preds.size(); ++t) {
        if (preds[t] < cfg.unoccupied_threshold) est.saved += series.energy[t];
    }
    if (series.total > 0.0) {
        est.percent = 100.0 * est.saved / series.total;
    } else {
        est.degenerate_baseline = true;
        std::clog << "warning: room '" << series.room_id
                  << "' has zero baseline energy; savings reported as 0%\n";
    }
    return est;
}

SavingsReport savings_report(std::span<const RoomSavings> rooms) {
    if (rooms.empty()) throw ConfigError("savings report needs at least one room");
    SavingsReport rep;
    double sum_actual = 0.0, sum_saved = 0.0, sum_percent = 0.0;
    for (const auto& r : rooms) {
        SavingsRow row{r.room_id, r.actual, r.saved, r.actual > 0.0 ? 100.0 * r.saved / r.actual : 0.0};
        sum_actual += row.actual;
        sum_saved += row.saved;
        sum_percent += row.percent;
        rep.rows.push_back(std::move(row));
    }
    const double n = static_cast<double>(rooms.size());
    rep.average = {"AVERAGE", sum_actual / n, sum_saved / n, sum_percent / n};
    return rep;
}

std::string savings_csv(const SavingsReport& report) {
    std::ostringstream os;
    os << "room,actual_energy,saved_energy,savings_percent\n";
    auto line = [&](const SavingsRow& r) {
        os << r.room_id << ',' << format_fixed(r.actual, 2) << ',' << format_fixed(r.saved, 2) << ','
           << format_fixed(r.percent, 2) << '\n';
    };
    for (const auto& r : report.rows) line(r);
    line(report.average);
    return os.str();
}

std::vector<RoomSavings> read_room_savings_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("savings CSV is empty");
    const auto header = split_fields(trim(line), ',');
    std::size_t room_col = header.size(), actual_col = header.size(), saved_col = header.size();
    for (std::size_t c = 0; c < header.size(); ++c) {
        const auto h = trim(header[c]);
        if (h == "room") room_col = c;
        if (h == "actual_energy") actual_col = c;
        if (h == "saved_energy") saved_col = c;
    }
    if (room_col == header.size() || actual_col == header.size() || saved_col == header.size()) {
        throw SchemaError("savings CSV needs room, actual_energy and saved_energy columns");
    }
    std::vector<RoomSavings> rooms;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto f = split_fields(body, ',');
        if (f.size() != header.size()) throw ParseError(lineno, "wrong field count");
        const std::string room(trim(f[room_col]));
        if (room == "AVERAGE") continue;
        const auto actual = parse_double(trim(f[actual_col]));
        const auto saved = parse_double(trim(f[saved_col]));
        if (!actual || !saved) throw ParseError(lineno, "non-numeric energy value");
        if (*actual < 0.0 || *saved < 0.0 || *saved > *actual) {
            throw DomainError("line " + std::to_string(lineno) +
                              ": need 0 <= saved_energy <= actual_energy");
        }
        rooms.push_back({room, *actual, *saved});
    }
    return rooms;
}

}  // namespace occupancy
