#pragma once

// Convective-heat HVAC energy model, rule-based-control baseline, and
// savings from switching HVAC off during predicted-unoccupied minutes.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "occupancy/timeseries.hpp"

namespace occupancy {

struct EnergyConfig {
    double cp = 1.005;  // kJ/(kg K), air near 300 K
    std::vector<unsigned> heating_months = {10, 11, 12, 1, 2, 3};
    double unoccupied_threshold = 0.5;
    int control_window = 30;

    /// Throws ConfigError on cp <= 0, threshold outside (0,1), or a month
    /// outside 1..12.
    void validate() const;
    bool is_heating_month(unsigned month) const noexcept;
};

/// Heating setpoint in heating months, cooling setpoint otherwise.
double select_setpoint(const EventRecord& r, const EnergyConfig& cfg);

/// cp * max(airflow, 0) * |setpoint - space temperature|.
double step_energy(const EventRecord& r, const EnergyConfig& cfg);

struct EnergySeries {
    std::string room_id;
    std::vector<double> energy;
    double total = 0.0;
};

EnergySeries simulate_rbc(const Dataset& test, const EnergyConfig& cfg);

struct SavingsEstimate {
    double saved = 0.0;
    double percent = 0.0;
    bool degenerate_baseline = false;  // total energy was zero
};

/// preds[t] governs series timestep t; t is switched off (its energy saved)
/// iff preds[t] < cfg.unoccupied_threshold.
SavingsEstimate estimate_savings(const EnergySeries& series, std::span<const double> preds,
                                 const EnergyConfig& cfg);

struct RoomSavings {
    std::string room_id;
    double actual = 0.0;
    double saved = 0.0;
};

struct SavingsRow {
    std::string room_id;
    double actual = 0.0;
    double saved = 0.0;
    double percent = 0.0;
};

struct SavingsReport {
    std::vector<SavingsRow> rows;
    /// Mean actual, mean saved, and the mean of the per-room percentages.
    SavingsRow average;
};

SavingsReport savings_report(std::span<const RoomSavings> rooms);

/// `room,actual_energy,saved_energy,savings_percent` plus an AVERAGE row,
/// two decimals.
std::string savings_csv(const SavingsReport& report);

/// Reads `room,actual_energy,saved_energy` rows (header required; a
/// savings_percent column, if present, is ignored; an AVERAGE row is skipped).
std::vector<RoomSavings> read_room_savings_csv(std::istream& in);

}  // namespace occupancy
