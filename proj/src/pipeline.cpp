#include "occupancy/pipeline.hpp"

#include <sstream>

#include "occupancy/error.hpp"
#include "occupancy/textio.hpp"

namespace occupancy {

namespace {

std::vector<EventRecord> copy_range(const Dataset& d, std::size_t begin, std::size_t end) {
    const auto r = d.records();
    return {r.begin() + static_cast<std::ptrdiff_t>(begin), r.begin() + static_cast<std::ptrdiff_t>(end)};
}

std::size_t checked_train_size(const Dataset& d, double fraction) {
    const std::size_t n_train = train_size(d.size(), fraction);
    if (n_train < 2 || n_train >= d.size()) {
        throw ConfigError("room '" + d.room_id() + "': split of " + std::to_string(d.size()) +
                          " records leaves too few steps on one side");
    }
    return n_train;
}

}  // namespace

Dataset PreparedRoom::train_split() const {
    return Dataset(data.room_id(), copy_range(data, 0, n_train));
}

Dataset PreparedRoom::test_split() const {
    return Dataset(data.room_id(), copy_range(data, n_train, data.size()));
}

PreparedRoom prepare_room(const Dataset& d, double train_fraction, bool with_occupancy) {
    PreparedRoom room;
    room.data = d;
    room.n_train = checked_train_size(d, train_fraction);
    const FeatureMatrix raw = engineer_features(d, with_occupancy);
    room.stats = fit_normalizer(raw.slice(0, room.n_train), d.room_id() + "/train");
    room.normalized = apply_normalizer(room.stats, raw);
    return room;
}

PreparedRoom prepare_room(const Dataset& d, double train_fraction, const NormStats& stats) {
    const bool with_occupancy = stats.layout == FeatureLayout::standard(true);
    const FeatureMatrix raw = engineer_features(d, with_occupancy);
    if (!(raw.layout() == stats.layout)) {
        throw ShapeError("normalizer feature layout does not match the engineered features");
    }
    PreparedRoom room;
    room.data = d;
    room.n_train = checked_train_size(d, train_fraction);
    room.stats = stats;
    room.normalized = apply_normalizer(stats, raw);
    return room;
}

TrainedModel train_room(const PreparedRoom& room, const TrainConfig& cfg, double train_fraction) {
    const WindowSpec w(cfg.window);
    const std::vector<int> targets = window_targets(room.train_split(), w);
    const FeatureMatrix inputs = room.normalized.slice(0, targets.size());
    TrainResult result = train(inputs, targets, cfg);

    TrainedModel t;
    t.model.room_id = room.data.room_id();
    t.model.layout = room.normalized.layout();
    t.model.config = cfg;
    t.model.train_fraction = train_fraction;
    t.model.params = std::move(result.params);
    t.stats = room.stats;
    t.epoch_loss = std::move(result.epoch_loss);
    return t;
}

std::vector<double> predict_room(const LstmParams& params, const PreparedRoom& room) {
    return predict_series(params, room.normalized);
}

std::vector<double> oracle_predictions(const Dataset& d, WindowSpec w) {
    const std::vector<int> targets = window_targets(d, w);
    std::vector<double> p(d.size(), 0.5);
    for (std::size_t t = 0; t < targets.size(); ++t) p[t] = targets[t] ? 1.0 - 1e-9 : 1e-9;
    return p;
}

MetricsReport evaluate_room(std::span<const double> full_preds, const PreparedRoom& room,
                            WindowSpec w) {
    const std::size_t T = room.data.size();
    if (full_preds.size() != T) {
        throw ShapeError("evaluate_room: " + std::to_string(full_preds.size()) +
                         " predictions for " + std::to_string(T) + " steps");
    }
    return evaluate(full_preds.subspan(room.n_train, T - 1 - room.n_train), room.data, w,
                    room.n_train);
}

std::vector<double> align_for_control(std::span<const double> full_preds, const PreparedRoom& room) {
    const std::size_t T = room.data.size();
    if (full_preds.size() != T) throw ShapeError("align_for_control: prediction length mismatch");
    return {full_preds.begin() + static_cast<std::ptrdiff_t>(room.n_train - 1),
            full_preds.begin() + static_cast<std::ptrdiff_t>(T - 1)};
}

RoomSavings savings_room(std::span<const double> full_preds, const PreparedRoom& room,
                         const EnergyConfig& cfg) {
    const EnergySeries series = simulate_rbc(room.test_split(), cfg);
    const std::vector<double> aligned = align_for_control(full_preds, room);
    const SavingsEstimate est = estimate_savings(series, aligned, cfg);
    return {room.data.room_id(), series.total, est.saved};
}

// ---------------------------------------------------------------------------

std::filesystem::path model_path(const std::filesystem::path& out, const std::string& room, int w) {
    return out / room / ("model_w" + std::to_string(w));
}

std::filesystem::path loss_path(const std::filesystem::path& out, const std::string& room, int w) {
    return out / ("loss_" + room + "_w" + std::to_string(w) + ".csv");
}

std::string loss_csv(const std::vector<double>& epoch_loss) {
    std::ostringstream os;
    os << "epoch,mean_bce\n";
    for (std::size_t e = 0; e < epoch_loss.size(); ++e) {
        os << e + 1 << ',' << format_exact(epoch_loss[e]) << '\n';
    }
    return os.str();
}

std::filesystem::path save_trained(const std::filesystem::path& out, const TrainedModel& trained) {
    const std::string& room = trained.model.room_id;
    const int w = trained.model.config.window;
    const auto path = model_path(out, room, w);
    ModelFile model = trained.model;
    model.norm_stats_file = path.filename().string() + ".norm";
    save_norm_stats(path.parent_path() / model.norm_stats_file, trained.stats);
    save_model(path, model);
    write_file_atomic(loss_path(out, room, w), loss_csv(trained.epoch_loss));
    return path;
}

LoadedModel load_trained(const std::filesystem::path& out, const std::string& room, int w) {
    const auto path = model_path(out, room, w);
    if (!std::filesystem::exists(path)) {
        throw IoError("no trained model for room '" + room + "', window " + std::to_string(w) +
                      " (expected " + path.string() + ")");
    }
    LoadedModel m;
    m.model = load_model(path);
    m.stats = load_norm_stats(path.parent_path() / m.model.norm_stats_file);
    if (!(m.stats.layout == m.model.layout)) {
        throw SchemaError("model and normalizer sidecar disagree on the feature layout");
    }
    return m;
}

std::string room_id_from_path(const std::filesystem::path& csv) { return csv.stem().string(); }

}  // namespace occupancy
