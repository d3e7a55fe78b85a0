// occupancy: generate synthetic telemetry, train per-window occupancy models,
// sweep evaluation windows and report HVAC savings against rule-based control.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "occupancy/energy.hpp"
#include "occupancy/error.hpp"
#include "occupancy/kernels.hpp"
#include "occupancy/metrics.hpp"
#include "occupancy/pipeline.hpp"
#include "occupancy/synthgen.hpp"
#include "occupancy/textio.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using namespace occupancy;

namespace {

struct GlobalOptions {
    std::string out = "out";
    std::uint64_t seed = 7;
    int jobs = 1;
    std::string isa;
};

struct GenOptions {
    int rooms = 5;
    int weeks = 8;
    std::string start = "2019-07-09T00:00";
    double weekend_prob = OccupancySchedule{}.weekend_occupancy_prob;
    double flip_prob = OccupancySchedule{}.flip_prob;
    double arrival = OccupancySchedule{}.arrival_mean_h;
    double departure = OccupancySchedule{}.departure_mean_h;
};

struct TrainOptions {
    std::vector<std::string> data;
    std::vector<int> windows = {30};
    std::size_t hidden = 256;
    int epochs = 10;
    double lr = 0.001;
    std::size_t tbptt = 100;
    double train_fraction = 0.7;
    bool with_occupancy = false;
};

struct EvalOptions {
    std::vector<std::string> data;
    std::vector<int> windows = {kSupportedWindows.begin(), kSupportedWindows.end()};
    bool oracle = false;
    bool plot = false;
    double train_fraction = 0.7;
};

struct SavingsOptions {
    std::vector<std::string> data;
    int window = 30;
    double threshold = 0.5;
    double cp = 1.005;
    std::vector<unsigned> heating_months = {10, 11, 12, 1, 2, 3};
    std::string replay;
    bool oracle = false;
    double train_fraction = 0.7;
};

/// Expands files and directories (all *.csv inside, sorted) into CSV paths.
std::vector<fs::path> resolve_inputs(const std::vector<std::string>& items) {
    if (items.empty()) throw ConfigError("no input data given (--data)");
    std::vector<fs::path> out;
    for (const auto& item : items) {
        const fs::path p(item);
        if (fs::is_directory(p)) {
            std::vector<fs::path> found;
            for (const auto& e : fs::directory_iterator(p)) {
                if (e.is_regular_file() && e.path().extension() == ".csv") found.push_back(e.path());
            }
            std::sort(found.begin(), found.end());
            if (found.empty()) throw IoError("no .csv files in " + p.string());
            out.insert(out.end(), found.begin(), found.end());
        } else if (fs::is_regular_file(p)) {
            out.push_back(p);
        } else {
            throw IoError("input not found: " + p.string());
        }
    }
    return out;
}

std::vector<Dataset> load_all(const std::vector<fs::path>& paths) {
    std::vector<Dataset> rooms;
    for (const auto& p : paths) rooms.push_back(load_csv(p, room_id_from_path(p)));
    return rooms;
}

void check_windows(const std::vector<int>& windows) {
    if (windows.empty()) throw ConfigError("no windows requested");
    for (int w : windows) {
        if (!WindowSpec(w).supported()) {
            throw ConfigError("window " + std::to_string(w) +
                              " is not one of 1, 5, 10, 30, 60, 120, 240, 480");
        }
    }
}

/// Runs jobs [0, n) on up to `workers` threads. Every job runs even if some
/// fail; the first failure is rethrown afterwards.
void run_jobs(std::size_t n, int workers, const std::function<void(std::size_t)>& job) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                job(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    const auto count = static_cast<std::size_t>(std::max(1, workers));
    if (count == 1 || n <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < std::min(count, n); ++t) pool.emplace_back(worker);
    }
    if (first_error) std::rethrow_exception(first_error);
}

std::mutex log_mutex;

void log_line(const std::string& s) {
    std::lock_guard lock(log_mutex);
    std::cerr << s << '\n';
}

// ---------------------------------------------------------------------------

int cmd_gen(const GlobalOptions& g, const GenOptions& o) {
    if (o.rooms <= 0) throw ConfigError("--rooms must be positive");
    if (o.weeks <= 0) throw ConfigError("--weeks must be positive");
    GenConfig cfg;
    cfg.seed = g.seed;
    cfg.start = parse_timestamp(o.start);
    cfg.set_weeks(o.weeks);
    cfg.room_ids = GenConfig::default_room_ids(o.rooms);
    cfg.schedule.weekend_occupancy_prob = o.weekend_prob;
    cfg.schedule.flip_prob = o.flip_prob;
    cfg.schedule.arrival_mean_h = o.arrival;
    cfg.schedule.departure_mean_h = o.departure;
    const auto datasets = generate(cfg);
    for (const auto& p : write_datasets(g.out, datasets)) log_line("wrote " + p.string());
    return 0;
}

int cmd_train(const GlobalOptions& g, const TrainOptions& o) {
    check_windows(o.windows);
    TrainConfig base;
    base.hidden = o.hidden;
    base.epochs = o.epochs;
    base.learning_rate = o.lr;
    base.tbptt_segment = o.tbptt;
    base.seed = g.seed;
    base.window = o.windows.front();
    base.validate();

    // Everything is read and validated before any output is written.
    const auto rooms = load_all(resolve_inputs(o.data));
    std::vector<PreparedRoom> prepared;
    for (const auto& d : rooms) prepared.push_back(prepare_room(d, o.train_fraction, o.with_occupancy));

    const std::size_t n = prepared.size() * o.windows.size();
    run_jobs(n, g.jobs, [&](std::size_t job) {
        const PreparedRoom& room = prepared[job / o.windows.size()];
        TrainConfig cfg = base;
        cfg.window = o.windows[job % o.windows.size()];
        const TrainedModel trained = train_room(room, cfg, o.train_fraction);
        const auto path = save_trained(g.out, trained);
        std::ostringstream msg;
        msg << "trained " << room.data.room_id() << " W=" << cfg.window
            << " final epoch BCE=" << trained.epoch_loss.back() << " -> " << path.string();
        log_line(msg.str());
    });
    return 0;
}

int cmd_evaluate(const GlobalOptions& g, const EvalOptions& o) {
    check_windows(o.windows);
    const auto rooms = load_all(resolve_inputs(o.data));

    // Fail early, naming the first missing (room, W) pair.
    if (!o.oracle) {
        for (const auto& d : rooms) {
            for (int w : o.windows) {
                if (!fs::exists(model_path(g.out, d.room_id(), w))) {
                    throw IoError("missing model for room '" + d.room_id() + "', window " +
                                  std::to_string(w) + " (" + model_path(g.out, d.room_id(), w).string() +
                                  ")");
                }
            }
        }
    }

    std::vector<MetricsReport> reports(rooms.size() * o.windows.size());
    run_jobs(reports.size(), g.jobs, [&](std::size_t job) {
        const Dataset& d = rooms[job / o.windows.size()];
        const WindowSpec w(o.windows[job % o.windows.size()]);
        if (o.oracle) {
            const PreparedRoom room = prepare_room(d, o.train_fraction);
            reports[job] = evaluate_room(oracle_predictions(d, w), room, w);
        } else {
            const LoadedModel m = load_trained(g.out, d.room_id(), w.minutes);
            if (m.model.config.window != w.minutes) {
                throw SchemaError("model for room '" + d.room_id() + "' window " +
                                  std::to_string(w.minutes) + " records window " +
                                  std::to_string(m.model.config.window));
            }
            const PreparedRoom room = prepare_room(d, m.model.train_fraction, m.stats);
            reports[job] = evaluate_room(predict_room(m.model.params, room), room, w);
        }
    });

    std::ostringstream csv;
    csv << metrics_csv_header() << '\n';
    for (const auto& r : reports) csv << metrics_csv_row(r) << '\n';
    write_file_atomic(fs::path(g.out) / "metrics.csv", csv.str());
    log_line("wrote " + (fs::path(g.out) / "metrics.csv").string());

    if (o.plot) {
        for (const auto& p : write_metric_plots(g.out, reports)) log_line("wrote " + p.string());
    }
    return 0;
}

int cmd_savings(const GlobalOptions& g, const SavingsOptions& o) {
    EnergyConfig cfg;
    cfg.cp = o.cp;
    cfg.unoccupied_threshold = o.threshold;
    cfg.heating_months = o.heating_months;
    cfg.control_window = o.window;
    cfg.validate();

    std::vector<RoomSavings> results;
    if (!o.replay.empty()) {
        std::ifstream in(o.replay);
        if (!in) throw IoError("cannot open " + o.replay);
        results = read_room_savings_csv(in);
    } else {
        check_windows({o.window});
        const auto rooms = load_all(resolve_inputs(o.data));
        results.resize(rooms.size());
        const WindowSpec w(o.window);
        run_jobs(rooms.size(), g.jobs, [&](std::size_t i) {
            const Dataset& d = rooms[i];
            if (o.oracle) {
                const PreparedRoom room = prepare_room(d, o.train_fraction);
                results[i] = savings_room(oracle_predictions(d, w), room, cfg);
            } else {
                const LoadedModel m = load_trained(g.out, d.room_id(), w.minutes);
                const PreparedRoom room = prepare_room(d, m.model.train_fraction, m.stats);
                results[i] = savings_room(predict_room(m.model.params, room), room, cfg);
            }
        });
    }
    const SavingsReport report = savings_report(results);
    const fs::path path = fs::path(g.out) / "savings.csv";
    write_file_atomic(path, savings_csv(report));
    log_line("wrote " + path.string());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Occupancy forecasting and HVAC savings estimation"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Configuration file (TOML/INI); flags override it");

    GlobalOptions g;
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    app.add_option("--seed", g.seed, "PRNG seed")->capture_default_str();
    app.add_option("--jobs", g.jobs, "Concurrent (room, window) jobs")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--isa", g.isa, "Force a kernel variant")
        ->check(CLI::IsMember({"scalar", "avx2", "neon"}));

    GenOptions gen_o;
    auto* gen = app.add_subcommand("gen", "Generate synthetic per-room telemetry CSVs");
    gen->add_option("--rooms", gen_o.rooms, "Number of rooms")->capture_default_str();
    gen->add_option("--weeks", gen_o.weeks, "Weeks of per-minute data")->capture_default_str();
    gen->add_option("--start", gen_o.start, "First timestamp (YYYY-MM-DDTHH:MM)")
        ->capture_default_str();
    gen->add_option("--weekend-prob", gen_o.weekend_prob, "Probability a weekend day is occupied")
        ->capture_default_str();
    gen->add_option("--flip-prob", gen_o.flip_prob, "Per-minute schedule deviation probability")
        ->capture_default_str();
    gen->add_option("--arrival", gen_o.arrival, "Mean arrival hour")->capture_default_str();
    gen->add_option("--departure", gen_o.departure, "Mean departure hour")->capture_default_str();

    TrainOptions train_o;
    auto* train_cmd = app.add_subcommand("train", "Train one model per (room, window)");
    train_cmd->add_option("--data", train_o.data, "Room CSV files or directories")->required();
    train_cmd->add_option("--window", train_o.windows, "Prediction window(s) in minutes")
        ->capture_default_str();
    train_cmd->add_option("--hidden", train_o.hidden, "LSTM hidden size")->capture_default_str();
    train_cmd->add_option("--epochs", train_o.epochs, "Training epochs")->capture_default_str();
    train_cmd->add_option("--lr", train_o.lr, "Adam learning rate")->capture_default_str();
    train_cmd->add_option("--tbptt", train_o.tbptt, "Steps per truncated-BPTT update")
        ->capture_default_str();
    train_cmd->add_option("--train-fraction", train_o.train_fraction, "Chronological train share")
        ->capture_default_str();
    train_cmd->add_flag("--with-occupancy", train_o.with_occupancy,
                        "Append the current occupancy reading as an input feature");

    EvalOptions eval_o;
    auto* eval_cmd = app.add_subcommand("evaluate", "Score trained models on the test split");
    eval_cmd->add_option("--data", eval_o.data, "Room CSV files or directories")->required();
    eval_cmd->add_option("--windows,--window", eval_o.windows, "Windows to evaluate")
        ->capture_default_str();
    eval_cmd->add_flag("--oracle", eval_o.oracle, "Score the true targets instead of a model");
    eval_cmd->add_flag("--plot", eval_o.plot, "Also write metric-vs-window SVG charts");
    eval_cmd->add_option("--train-fraction", eval_o.train_fraction, "Split used in --oracle mode")
        ->capture_default_str();

    SavingsOptions sav_o;
    auto* sav_cmd = app.add_subcommand("savings", "Estimate HVAC savings against rule-based control");
    sav_cmd->add_option("--data", sav_o.data, "Room CSV files or directories");
    sav_cmd->add_option("--window", sav_o.window, "Control window (model to use)")
        ->capture_default_str();
    sav_cmd->add_option("--threshold", sav_o.threshold, "Probability below which HVAC is off")
        ->capture_default_str();
    sav_cmd->add_option("--cp", sav_o.cp, "Specific heat of air, kJ/(kg K)")->capture_default_str();
    sav_cmd->add_option("--heating-months", sav_o.heating_months, "Months using the heating setpoint")
        ->capture_default_str();
    sav_cmd->add_option("--replay-table2", sav_o.replay,
                        "Report from a CSV of room,actual_energy,saved_energy rows");
    sav_cmd->add_flag("--oracle", sav_o.oracle, "Use the true windowed targets as predictions");
    sav_cmd->add_option("--train-fraction", sav_o.train_fraction, "Split used in --oracle mode")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (!g.isa.empty()) {
            const auto isa = g.isa == "avx2"   ? kernels::Isa::Avx2
                             : g.isa == "neon" ? kernels::Isa::Neon
                                               : kernels::Isa::Scalar;
            if (!kernels::select(isa)) throw ConfigError("kernel variant '" + g.isa + "' unavailable");
        }
        if (*gen) return cmd_gen(g, gen_o);
        if (*train_cmd) return cmd_train(g, train_o);
        if (*eval_cmd) return cmd_evaluate(g, eval_o);
        if (*sav_cmd) {
            if (sav_o.replay.empty() && sav_o.data.empty()) {
                throw ConfigError("savings needs --data or --replay-table2");
            }
            return cmd_savings(g, sav_o);
        }
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
