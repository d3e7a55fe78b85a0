#pragma once

// Plain-text model container. Values are written in shortest round-trip
// form, so save -> load reproduces every parameter bit for bit.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "occupancy/lstm.hpp"
#include "occupancy/timeseries.hpp"

namespace occupancy {

struct ModelFile {
    std::string room_id;
    FeatureLayout layout;
    TrainConfig config;
    double train_fraction = 0.7;
    /// Sidecar NormStats file name, relative to the model file's directory.
    std::string norm_stats_file;
    LstmParams params;
};

void write_model(std::ostream& out, const ModelFile& model);
ModelFile read_model(std::istream& in);

void save_model(const std::filesystem::path& path, const ModelFile& model);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace occupancy
