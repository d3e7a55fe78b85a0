#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "occupancy/error.hpp"
#include "occupancy/synthgen.hpp"
#include "occupancy/timeseries.hpp"
#include "support/temp_dir.hpp"

using namespace occupancy;

namespace {

const char* kHeader =
    "timestamp,airflow_actual,airflow_setpoint,cooling_setpoint,heating_setpoint,"
    "damper_position_command,discharge_temperature,hw_valve_command,space_temperature_actual,"
    "occupancy\n";

Dataset parse(const std::string& body) {
    std::istringstream in(std::string(kHeader) + body);
    return read_csv(in, "room");
}

Dataset occupancy_series(const std::vector<int>& occ) {
    std::vector<EventRecord> recs;
    for (std::size_t i = 0; i < occ.size(); ++i) {
        EventRecord r;
        r.timestamp = Timestamp{static_cast<std::int64_t>(i)};
        r.occupancy = occ[i];
        recs.push_back(r);
    }
    return Dataset("room", std::move(recs));
}

}  // namespace

TEST_CASE("load_csv reads a well-formed three-row file") {
    testing_support::TempDir dir;
    const auto path = dir / "RM-X.csv";
    std::ofstream(path) << kHeader
                        << "2019-07-09T00:00,62.5,70,74,68,45,62,0,71.0,1\n"
                           "2019-07-09T00:01,60.1,70,74,68,44,62,0,71.1,0\n"
                           "2019-07-09T00:02,-2.38,65,74,68,20,61,0,71.2,0\n";
    const Dataset d = load_csv(path, "RM-X");
    CHECK(d.size() == 3);
    CHECK(d.room_id() == "RM-X");
    CHECK(d[2].airflow_actual == doctest::Approx(-2.38));
    CHECK(d[0].occupancy == 1);
    CHECK(format_timestamp(d[1].timestamp) == "2019-07-09T00:01");
}

TEST_CASE("load_csv rejects invalid content") {
    SUBCASE("occupancy outside {0,1}") {
        CHECK_THROWS_AS(parse("2019-07-09T00:00,1,1,1,1,1,1,1,1,2\n"), DomainError);
    }
    SUBCASE("timestamps going backwards") {
        CHECK_THROWS_AS(parse("2019-07-09T00:05,1,1,1,1,1,1,1,1,0\n"
                              "2019-07-09T00:04,1,1,1,1,1,1,1,1,0\n"),
                        OrderingError);
    }
    SUBCASE("duplicate timestamps") {
        CHECK_THROWS_AS(parse("2019-07-09T00:05,1,1,1,1,1,1,1,1,0\n"
                              "2019-07-09T00:05,1,1,1,1,1,1,1,1,0\n"),
                        OrderingError);
    }
    SUBCASE("malformed row reports its line") {
        try {
            parse("2019-07-09T00:00,1,1,1,1,1,1,1,1,0\n2019-07-09T00:01,1,abc,1,1,1,1,1,1,0\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
    }
    SUBCASE("missing value") {
        CHECK_THROWS_AS(parse("2019-07-09T00:00,1,,1,1,1,1,1,1,0\n"), ParseError);
    }
    SUBCASE("wrong field count") {
        CHECK_THROWS_AS(parse("2019-07-09T00:00,1,1,1\n"), ParseError);
    }
    SUBCASE("bad timestamp") {
        CHECK_THROWS_AS(parse("2019-13-09T00:00,1,1,1,1,1,1,1,1,0\n"), ParseError);
    }
    SUBCASE("missing column") {
        std::istringstream in("timestamp,airflow_actual\n");
        CHECK_THROWS_AS(read_csv(in, "r"), SchemaError);
    }
    SUBCASE("unknown column") {
        std::istringstream in(std::string(kHeader).insert(10, "bogus,"));
        CHECK_THROWS_AS(read_csv(in, "r"), SchemaError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", "r"), IoError);
    }
}

TEST_CASE("timestamps parse and format at minute resolution") {
    CHECK(format_timestamp(parse_timestamp("2020-02-01T23:59")) == "2020-02-01T23:59");
    CHECK(parse_timestamp("2019-07-09 08:30") == parse_timestamp("2019-07-09T08:30"));
    CHECK(parse_timestamp("2019-07-09T08:30:00") == parse_timestamp("2019-07-09T08:30"));
    CHECK_THROWS_AS(parse_timestamp("2019-07-09T08:30:15"), DomainError);
    CHECK_THROWS_AS(parse_timestamp("2019-02-30T00:00"), DomainError);
    CHECK_THROWS_AS(parse_timestamp("2019-7-9T8:30"), DomainError);
    CHECK(parse_timestamp("1970-01-01T00:01").minutes == 1);
}

TEST_CASE("engineer_features derives calendar columns") {
    std::vector<EventRecord> recs(2);
    recs[0].timestamp = parse_timestamp("2019-07-13T10:00");  // Saturday
    recs[1].timestamp = parse_timestamp("2019-07-15T00:30");  // Monday
    recs[1].airflow_actual = 1.5;
    recs[1].airflow_setpoint = 2.5;
    recs[1].cooling_setpoint = 3.5;
    recs[1].heating_setpoint = 4.5;
    recs[1].damper_position_command = 5.5;
    recs[1].discharge_temperature = 6.5;
    recs[1].hw_valve_command = 7.5;
    recs[1].space_temperature_actual = 8.5;
    const FeatureMatrix f = engineer_features(Dataset("r", recs));
    REQUIRE(f.rows() == 2);
    REQUIRE(f.cols() == 12);

    const auto sat = f.row(0);
    CHECK(sat[8] == 5);
    CHECK(sat[9] == 10);
    CHECK(sat[10] == 7);
    CHECK(sat[11] == 1);

    const auto mon = f.row(1);
    CHECK(mon[8] == 0);
    CHECK(mon[9] == 0);
    CHECK(mon[11] == 0);
    for (int j = 0; j < 8; ++j) CHECK(mon[j] == 1.5 + j);

    const FeatureMatrix with_occ = engineer_features(Dataset("r", recs), true);
    CHECK(with_occ.cols() == 13);
    CHECK(with_occ.layout().names.back() == "occupancy");
}

TEST_CASE("split_train_test uses floor and keeps order") {
    const auto d10 = occupancy_series(std::vector<int>(10, 0));
    auto [tr, te] = split_train_test(d10, 0.7);
    CHECK(tr.size() == 7);
    CHECK(te.size() == 3);

    const auto d100 = occupancy_series(std::vector<int>(100, 0));
    auto [tr100, te100] = split_train_test(d100, 0.7);
    CHECK(tr100[0].timestamp.minutes == 0);
    CHECK(tr100[69].timestamp.minutes == 69);
    CHECK(te100[0].timestamp.minutes == 70);
    CHECK(te100[29].timestamp.minutes == 99);

    const auto d3 = occupancy_series({0, 1, 0});
    auto [tr3, te3] = split_train_test(d3, 0.5);
    CHECK(tr3.size() == 1);
    CHECK(te3.size() == 2);

    CHECK_THROWS_AS(split_train_test(d10, 0.0), ConfigError);
    CHECK_THROWS_AS(split_train_test(d10, 1.0), ConfigError);
    CHECK_THROWS_AS(split_train_test(occupancy_series({0, 1}), 0.3), ConfigError);
    CHECK_THROWS_AS(split_train_test(occupancy_series({0}), 0.5), ConfigError);
}

TEST_CASE("split_train_test: train ++ test reproduces the input") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> frac(0.1, 0.9);
    std::uniform_int_distribution<int> len(2, 400);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<int> occ(static_cast<std::size_t>(len(rng)));
        for (auto& o : occ) o = static_cast<int>(rng() & 1);
        const Dataset d = occupancy_series(occ);
        const double f = frac(rng);
        if (train_size(d.size(), f) == 0) continue;
        auto [tr, te] = split_train_test(d, f);
        std::vector<EventRecord> joined(tr.records().begin(), tr.records().end());
        joined.insert(joined.end(), te.records().begin(), te.records().end());
        CHECK(Dataset("room", joined) == d);
    }
}

TEST_CASE("fit_normalizer and apply_normalizer") {
    FeatureLayout layout{{"a", "b", "flag"},
                         {FeatureKind::Continuous, FeatureKind::Continuous, FeatureKind::Binary}};
    FeatureMatrix m(layout, 2);
    m.row(0)[0] = 5.0;
    m.row(1)[0] = 5.0;
    m.row(0)[1] = 1.0;
    m.row(1)[1] = 3.0;
    m.row(0)[2] = 1.0;
    m.row(1)[2] = 0.0;

    const NormStats s = fit_normalizer(m);
    CHECK(s.mean[0] == 5.0);
    CHECK(s.std[0] == 1.0);  // zero variance floored
    CHECK(s.mean[1] == 2.0);
    CHECK(s.std[1] == doctest::Approx(std::sqrt(2.0)));
    CHECK(s.mean[2] == 0.0);
    CHECK(s.std[2] == 1.0);

    const FeatureMatrix z = apply_normalizer(s, m);
    CHECK(z.row(0)[0] == 0.0);
    CHECK(z.row(1)[0] == 0.0);
    CHECK(z.row(0)[2] == 1.0);  // binary passthrough
    CHECK(z.row(1)[2] == 0.0);

    FeatureMatrix probe(layout, 2);
    probe.row(0)[1] = s.mean[1];
    probe.row(1)[1] = s.mean[1] + s.std[1];
    const FeatureMatrix pz = apply_normalizer(s, probe);
    CHECK(pz.row(0)[1] == 0.0);
    CHECK(pz.row(1)[1] == doctest::Approx(1.0).epsilon(1e-15));

    FeatureMatrix wrong(FeatureLayout::standard(), 1);
    CHECK_THROWS_AS(apply_normalizer(s, wrong), ShapeError);
    CHECK_THROWS_AS(fit_normalizer(FeatureMatrix(layout, 0)), ShapeError);
}

TEST_CASE("airflow at the reference mean normalizes to zero") {
    NormStats s;
    s.layout = FeatureLayout::standard();
    s.mean.assign(12, 0.0);
    s.std.assign(12, 1.0);
    s.mean[0] = 62.46;
    s.std[0] = 30.28;
    FeatureMatrix m(s.layout, 1);
    m.row(0)[0] = 62.46;
    CHECK(apply_normalizer(s, m).row(0)[0] == 0.0);
}

TEST_CASE("normalized synthetic train split has zero mean and round-trips") {
    GenConfig cfg;
    cfg.room_ids = {"RM-A"};
    cfg.set_weeks(1);
    const Dataset d = generate(cfg).front();
    auto [train, test] = split_train_test(d, 0.7);
    const FeatureMatrix raw = engineer_features(train);
    const NormStats s = fit_normalizer(raw);
    const FeatureMatrix z = apply_normalizer(s, raw);
    for (std::size_t j = 0; j < z.cols(); ++j) {
        if (s.layout.kinds[j] == FeatureKind::Binary) continue;
        double sum = 0.0;
        for (std::size_t t = 0; t < z.rows(); ++t) sum += z.row(t)[j];
        CHECK(std::abs(sum / static_cast<double>(z.rows())) < 1e-9);
    }
    const FeatureMatrix back = invert_normalizer(s, z);
    for (std::size_t t = 0; t < raw.rows(); ++t) {
        for (std::size_t j = 0; j < raw.cols(); ++j) {
            const double a = raw.row(t)[j];
            const double b = back.row(t)[j];
            CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
        }
    }
    for (std::size_t t = 0; t < z.rows(); ++t) {
        const double w = z.row(t)[11];
        CHECK((w == 0.0 || w == 1.0));
    }
}

TEST_CASE("NormStats sidecar round-trips exactly") {
    NormStats s;
    s.layout = FeatureLayout::standard(true);
    s.fitted_on = "RM-A/train";
    for (std::size_t j = 0; j < s.layout.size(); ++j) {
        s.mean.push_back(0.1 * static_cast<double>(j) + 1.0 / 3.0);
        s.std.push_back(1.0 + 1.0 / 7.0 * static_cast<double>(j));
    }
    std::stringstream io;
    write_norm_stats(io, s);
    const NormStats r = read_norm_stats(io);
    CHECK(r.layout == s.layout);
    CHECK(r.mean == s.mean);
    CHECK(r.std == s.std);
    CHECK(r.fitted_on == s.fitted_on);
}

TEST_CASE("aggregate_target examples") {
    const Dataset d = occupancy_series({0, 0, 0, 1, 0, 0, 0, 0});
    SUBCASE("W=1 is the next reading") {
        for (std::size_t t = 0; t + 1 < d.size(); ++t) {
            CHECK(aggregate_target(d, t, WindowSpec(1)) == d[t + 1].occupancy);
        }
    }
    SUBCASE("empty window") {
        CHECK(aggregate_target(d, 3, WindowSpec(4)) == 0);
    }
    SUBCASE("W=5 with one occupied minute") {
        // steps 1..5 = [0,0,1,0,0]
        CHECK(aggregate_target(d, 0, WindowSpec(5)) == 1);
    }
    SUBCASE("window truncated at series end") {
        CHECK(aggregate_target(d, 6, WindowSpec(480)) == 0);
        CHECK(aggregate_target(d, 2, WindowSpec(480)) == 1);
    }
    SUBCASE("out of range") {
        CHECK_THROWS_AS(aggregate_target(d, 7, WindowSpec(1)), IndexError);
    }
    CHECK_THROWS_AS(WindowSpec(0), ConfigError);
    CHECK(WindowSpec(30).supported());
    CHECK_FALSE(WindowSpec(7).supported());
}

TEST_CASE("window targets: brute force agreement and monotonicity in W") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<int> occ(200);
        for (auto& o : occ) o = (rng() % 17 == 0) ? 1 : 0;
        const Dataset d = occupancy_series(occ);
        std::vector<int> prev;
        for (int w : kSupportedWindows) {
            const auto fast = window_targets(d, WindowSpec(w));
            REQUIRE(fast.size() == d.size() - 1);
            for (std::size_t t = 0; t + 1 < d.size(); ++t) {
                int any = 0;
                for (std::size_t k = t + 1; k <= std::min(t + static_cast<std::size_t>(w), d.size() - 1);
                     ++k) {
                    any |= occ[k];
                }
                CHECK(fast[t] == any);
                CHECK(aggregate_target(d, t, WindowSpec(w)) == any);
                if (!prev.empty()) CHECK(prev[t] <= fast[t]);
            }
            prev = fast;
        }
    }
}
