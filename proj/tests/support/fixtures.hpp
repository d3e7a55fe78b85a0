#pragma once

#include <string>
#include <vector>

#include "occupancy/timeseries.hpp"

namespace fixture {

/// One record per minute from `start`, with the given occupancy and fixed
/// sensor readings.
inline occupancy::Dataset minute_series(const std::vector<int>& occ,
                                        occupancy::Timestamp start = occupancy::make_timestamp(2019, 7, 9),
                                        const std::string& room = "RM-T") {
    std::vector<occupancy::EventRecord> rs(occ.size());
    for (std::size_t t = 0; t < occ.size(); ++t) {
        auto& r = rs[t];
        r.timestamp.minutes = start.minutes + static_cast<std::int64_t>(t);
        r.airflow_actual = 60.0 + static_cast<double>(t % 7);
        r.airflow_setpoint = 65.0;
        r.cooling_setpoint = 74.8;
        r.heating_setpoint = 67.4;
        r.damper_position_command = 40.0;
        r.discharge_temperature = 58.0;
        r.hw_valve_command = 0.0;
        r.space_temperature_actual = 71.0 + 0.1 * static_cast<double>(t % 5);
        r.occupancy = occ[t];
    }
    return occupancy::Dataset(room, std::move(rs));
}

}  // namespace fixture
