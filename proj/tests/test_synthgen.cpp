#include <sstream>

#include "doctest.h"
#include "occupancy/error.hpp"
#include "occupancy/synthgen.hpp"
#include "support/temp_dir.hpp"

using namespace occupancy;
using testing_support::TempDir;

namespace {

GenConfig small_config(std::uint64_t seed) {
    GenConfig c;
    c.seed = seed;
    c.room_ids = GenConfig::default_room_ids(3);
    c.set_weeks(2);
    return c;
}

std::string as_csv(const Dataset& d) {
    std::ostringstream out;
    write_csv(out, d);
    return out.str();
}

}  // namespace

TEST_CASE("room ids") {
    const auto ids = GenConfig::default_room_ids(3);
    REQUIRE(ids.size() == 3);
    CHECK(ids[0] == "RM-A");
    CHECK(ids[2] == "RM-C");
}

TEST_CASE("generation is deterministic per seed") {
    const auto a = generate(small_config(7));
    const auto b = generate(small_config(7));
    const auto c = generate(small_config(8));
    REQUIRE(a.size() == 3);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(as_csv(a[k]) == as_csv(b[k]));
        CHECK(as_csv(a[k]) != as_csv(c[k]));
    }
    CHECK(as_csv(a[0]) != as_csv(a[1]));
}

TEST_CASE("one record per minute over the configured span") {
    const auto rooms = generate(small_config(1));
    for (const auto& d : rooms) {
        CHECK(d.size() == 14u * 24u * 60u);
        CHECK(d[0].timestamp == make_timestamp(2019, 7, 9));
        for (std::size_t t = 1; t < d.size(); ++t) {
            if (d[t].timestamp.minutes != d[t - 1].timestamp.minutes + 1) {
                FAIL("gap at " << t);
            }
        }
    }
}

TEST_CASE("occupancy statistics are plausible") {
    GenConfig cfg = small_config(3);
    cfg.set_weeks(4);
    for (const auto& d : generate(cfg)) {
        CAPTURE(d.room_id());
        double occupied = 0, weekday = 0, weekday_n = 0, weekend = 0, weekend_n = 0;
        double same = 0;
        for (std::size_t t = 0; t < d.size(); ++t) {
            const int o = d[t].occupancy;
            occupied += o;
            if (to_civil(d[t].timestamp).day_of_week >= 5) {
                weekend += o;
                ++weekend_n;
            } else {
                weekday += o;
                ++weekday_n;
            }
            if (t > 0 && o == d[t - 1].occupancy) ++same;
        }
        const double rate = occupied / static_cast<double>(d.size());
        CHECK(rate > 0.2);
        CHECK(rate < 0.8);
        CHECK(weekend / weekend_n <= weekday / weekday_n);
        // Occupancy changes slowly: consecutive minutes almost always agree.
        CHECK(same / static_cast<double>(d.size() - 1) > 0.95);
    }
}

TEST_CASE("sensor channels stay in physical ranges") {
    for (const auto& d : generate(small_config(4))) {
        for (const auto& r : d.records()) {
            CHECK(r.damper_position_command >= 0.0);
            CHECK(r.damper_position_command <= 100.0);
            CHECK(r.hw_valve_command >= 0.0);
            CHECK(r.hw_valve_command <= 100.0);
            CHECK(r.space_temperature_actual > 55.0);
            CHECK(r.space_temperature_actual < 90.0);
            CHECK(r.heating_setpoint < r.cooling_setpoint);
        }
    }
}

TEST_CASE("written datasets load back identically") {
    TempDir dir;
    const auto rooms = generate(small_config(5));
    const auto paths = write_datasets(dir.path(), rooms);
    REQUIRE(paths.size() == rooms.size());
    for (std::size_t k = 0; k < rooms.size(); ++k) {
        CHECK(paths[k].filename() == rooms[k].room_id() + ".csv");
        CHECK(load_csv(paths[k], rooms[k].room_id()) == rooms[k]);
    }
}

TEST_CASE("GenConfig validation") {
    GenConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK_THROWS_AS(c.set_weeks(0), ConfigError);
    c.room_ids.clear();
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = GenConfig{};
    c.schedule.weekend_occupancy_prob = 1.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = GenConfig{};
    c.end = c.start;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}
