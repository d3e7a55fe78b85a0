#pragma once

// Per-room experiment plumbing shared by the CLI and the acceptance suite:
// split, normalize, train one model per window, predict over the whole
// series, score the test split, and estimate savings on it.
//
// Alignment conventions (0-based steps of the full series, T records,
// n_train of them in the train split):
//   - the model's output at step t predicts the W-window target of step t,
//     i.e. whether any of steps t+1 .. t+W is occupied;
//   - metrics score steps n_train .. T-2 (the last step has no future);
//   - the prediction made at step t-1 decides whether HVAC runs at test
//     step t, so every test step has a governing prediction.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "occupancy/energy.hpp"
#include "occupancy/lstm.hpp"
#include "occupancy/metrics.hpp"
#include "occupancy/model_io.hpp"
#include "occupancy/timeseries.hpp"

namespace occupancy {

struct PreparedRoom {
    Dataset data;
    std::size_t n_train = 0;
    NormStats stats;
    FeatureMatrix normalized;  // whole series, train-split statistics

    Dataset train_split() const;
    Dataset test_split() const;
};

/// Splits chronologically, fits normalization on the train rows only, and
/// normalizes the whole series.
PreparedRoom prepare_room(const Dataset& d, double train_fraction, bool with_occupancy = false);
/// Same split, reusing previously fitted statistics.
PreparedRoom prepare_room(const Dataset& d, double train_fraction, const NormStats& stats);

struct TrainedModel {
    ModelFile model;
    NormStats stats;
    std::vector<double> epoch_loss;
};

/// Trains on train-split steps 0 .. n_train-2 against W-window targets
/// computed inside the train split.
TrainedModel train_room(const PreparedRoom& room, const TrainConfig& cfg, double train_fraction);

/// One prediction per step of the full series.
std::vector<double> predict_room(const LstmParams& params, const PreparedRoom& room);

/// Probability-like stand-ins for the true W-window targets: 1-1e-9 where
/// the target is 1, 1e-9 where it is 0; the final step (no future) gets 0.5.
std::vector<double> oracle_predictions(const Dataset& d, WindowSpec w);

MetricsReport evaluate_room(std::span<const double> full_preds, const PreparedRoom& room,
                            WindowSpec w);

/// Test-split predictions aligned to test steps (prediction from the step before).
std::vector<double> align_for_control(std::span<const double> full_preds, const PreparedRoom& room);

RoomSavings savings_room(std::span<const double> full_preds, const PreparedRoom& room,
                         const EnergyConfig& cfg);

// ---------------------------------------------------------------------------
// On-disk layout: <out>/<room>/model_w<W>, <out>/<room>/model_w<W>.norm,
// <out>/loss_<room>_w<W>.csv, <out>/metrics.csv, <out>/savings.csv.

std::filesystem::path model_path(const std::filesystem::path& out, const std::string& room, int w);
std::filesystem::path loss_path(const std::filesystem::path& out, const std::string& room, int w);

/// Writes model, sidecar and loss log. Returns the model path.
std::filesystem::path save_trained(const std::filesystem::path& out, const TrainedModel& trained);

struct LoadedModel {
    ModelFile model;
    NormStats stats;
};

/// Throws IoError naming (room, W) when the model is missing.
LoadedModel load_trained(const std::filesystem::path& out, const std::string& room, int w);

std::string loss_csv(const std::vector<double>& epoch_loss);

/// Room id of a CSV path: the file stem.
std::string room_id_from_path(const std::filesystem::path& csv);

}  // namespace occupancy
