#pragma once

// Seeded synthetic building telemetry: a scheduled two-state occupancy
// process with Markov deviations, and sensor channels that respond to
// occupancy and to the rule-based HVAC schedule. Channel levels are set near
// the per-room statistics of a real campus building (e.g. cooling setpoint
// ~74.8 F, heating setpoint ~67.4 F, space temperature ~71 F).

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "occupancy/timeseries.hpp"

namespace occupancy {

struct OccupancySchedule {
    double arrival_mean_h = 8.0;
    double arrival_sd_h = 0.75;
    double departure_mean_h = 18.0;
    double departure_sd_h = 1.0;
    /// Probability that a Saturday/Sunday has a session at all.
    double weekend_occupancy_prob = 0.1;
    /// Per-minute probability of starting a deviation from the schedule.
    double flip_prob = 0.002;
    /// Mean length of a deviation, minutes.
    double flip_mean_minutes = 15.0;
    /// Each room's arrival/departure means are shifted by U(-jitter, jitter) hours.
    double room_jitter_h = 0.75;
};

struct SensorNoise {
    double airflow = 8.0;
    double damper = 6.0;
    double discharge = 2.0;
    double hw_valve = 10.0;
    double space_temperature = 0.4;
};

struct GenConfig {
    std::uint64_t seed = 7;
    Timestamp start = make_timestamp(2019, 7, 9);
    Timestamp end = make_timestamp(2019, 9, 3);  // 8 weeks
    std::vector<std::string> room_ids = default_room_ids(5);
    OccupancySchedule schedule;
    SensorNoise noise;

    static std::vector<std::string> default_room_ids(int count);
    /// Sets `end` to `weeks` weeks after `start`.
    void set_weeks(int weeks);
    /// Throws ConfigError on start >= end, no rooms, or probabilities outside [0,1].
    void validate() const;
};

/// One Dataset per room, one record per minute in [start, end).
std::vector<Dataset> generate(const GenConfig& cfg);

/// Writes `<dir>/<room>.csv` for each dataset; returns the paths written.
std::vector<std::filesystem::path> write_datasets(const std::filesystem::path& dir,
                                                  const std::vector<Dataset>& datasets);

}  // namespace occupancy
