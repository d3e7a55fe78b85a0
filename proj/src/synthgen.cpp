#include "occupancy/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "occupancy/error.hpp"
#include "occupancy/textio.hpp"

namespace occupancy {

std::vector<std::string> GenConfig::default_room_ids(int count) {
    std::vector<std::string> ids;
    for (int i = 0; i < count; ++i) {
        ids.push_back(i < 26 ? std::string("RM-") + static_cast<char>('A' + i)
                             : "RM-" + std::to_string(i + 1));
    }
    return ids;
}

void GenConfig::set_weeks(int weeks) {
    if (weeks <= 0) throw ConfigError("weeks must be positive");
    end = Timestamp{start.minutes + static_cast<std::int64_t>(weeks) * 7 * 1440};
}

void GenConfig::validate() const {
    if (!(start < end)) throw ConfigError("generator start must precede end");
    if (room_ids.empty()) throw ConfigError("generator needs at least one room");
    auto prob = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0,1]");
    };
    prob(schedule.weekend_occupancy_prob, "weekend occupancy probability");
    prob(schedule.flip_prob, "flip probability");
    if (!(schedule.flip_mean_minutes >= 1.0)) throw ConfigError("flip mean length must be >= 1");
    if (schedule.arrival_sd_h < 0.0 || schedule.departure_sd_h < 0.0 || schedule.room_jitter_h < 0.0) {
        throw ConfigError("schedule spreads must be non-negative");
    }
}

namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

Dataset generate_room(const GenConfig& cfg, std::size_t room_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(room_index), 0x6f636375u};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    const OccupancySchedule& s = cfg.schedule;
    const double arrival_mean = s.arrival_mean_h + s.room_jitter_h * (2.0 * unit(rng) - 1.0);
    const double departure_mean = s.departure_mean_h + s.room_jitter_h * (2.0 * unit(rng) - 1.0);
    const double flip_end_prob = 1.0 / s.flip_mean_minutes;

    std::vector<EventRecord> records;
    records.reserve(static_cast<std::size_t>(cfg.end.minutes - cfg.start.minutes));

    // Per-day session bounds in minutes of the day; empty when start >= end.
    double session_start = 0.0, session_end = 0.0;
    std::int64_t current_day = std::numeric_limits<std::int64_t>::min();
    bool deviating = false;
    double temp_noise = 0.0;

    for (std::int64_t m = cfg.start.minutes; m < cfg.end.minutes; ++m) {
        const Timestamp ts{m};
        const CivilTime c = to_civil(ts);
        const std::int64_t day = m >= 0 ? m / 1440 : (m - 1439) / 1440;
        const bool weekend = c.day_of_week >= 5;
        if (day != current_day) {
            current_day = day;
            const bool active = !weekend || unit(rng) < s.weekend_occupancy_prob;
            const double a = arrival_mean + s.arrival_sd_h * normal(rng);
            const double d = departure_mean + s.departure_sd_h * normal(rng);
            if (active) {
                session_start = std::clamp(a, 0.0, 24.0) * 60.0;
                session_end = std::clamp(d, 0.0, 24.0) * 60.0;
            } else {
                session_start = session_end = 0.0;
            }
        }
        const double minute_of_day = c.hour * 60.0 + c.minute;
        const bool scheduled = minute_of_day >= session_start && minute_of_day < session_end;

        if (deviating) {
            if (unit(rng) < flip_end_prob) deviating = false;
        } else if (s.flip_prob > 0.0 && unit(rng) < s.flip_prob) {
            deviating = true;
        }
        const int occ = (scheduled != deviating) ? 1 : 0;

        const bool heating = c.month >= 10 || c.month <= 3;
        const bool hvac_on = !weekend && c.hour >= 6 && c.hour < 22;
        const double o = occ;

        EventRecord r;
        r.timestamp = ts;
        r.occupancy = occ;
        r.cooling_setpoint = hvac_on ? 72.0 : 78.0;
        r.heating_setpoint = hvac_on ? 68.5 : 66.5;
        r.airflow_setpoint = hvac_on ? 70.0 : 65.0;
        r.airflow_actual =
            round2(std::max(-3.0, 35.0 + 45.0 * o + 10.0 * hvac_on + cfg.noise.airflow * normal(rng)));
        r.damper_position_command =
            round2(std::clamp(25.0 + 40.0 * o + cfg.noise.damper * normal(rng), 0.0, 100.0));
        r.discharge_temperature =
            round2(58.0 + (heating ? 20.0 * o : 0.0) + cfg.noise.discharge * normal(rng));
        r.hw_valve_command =
            heating && occ ? round2(std::clamp(30.0 + cfg.noise.hw_valve * normal(rng), 0.0, 100.0))
                           : 0.0;
        temp_noise = 0.95 * temp_noise + cfg.noise.space_temperature * normal(rng);
        const double base = heating ? 69.0 : 71.0;
        const double drift = hvac_on ? 0.0 : (heating ? -2.0 : 2.0);
        r.space_temperature_actual = round2(base + 1.2 * o + drift + temp_noise);
        records.push_back(r);
    }
    return Dataset(cfg.room_ids[room_index], std::move(records));
}

}  // namespace

std::vector<Dataset> generate(const GenConfig& cfg) {
    cfg.validate();
    std::vector<Dataset> out;
    out.reserve(cfg.room_ids.size());
    for (std::size_t i = 0; i < cfg.room_ids.size(); ++i) out.push_back(generate_room(cfg, i));
    return out;
}

std::vector<std::filesystem::path> write_datasets(const std::filesystem::path& dir,
                                                  const std::vector<Dataset>& datasets) {
    std::vector<std::filesystem::path> paths;
    for (const auto& d : datasets) {
        std::ostringstream os;
        write_csv(os, d);
        auto path = dir / (d.room_id() + ".csv");
        write_file_atomic(path, os.str());
        paths.push_back(std::move(path));
    }
    return paths;
}

}  // namespace occupancy
