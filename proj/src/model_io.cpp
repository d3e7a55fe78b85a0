#include "occupancy/model_io.hpp"

#include <fstream>
#include <sstream>

#include "occupancy/error.hpp"
#include "occupancy/textio.hpp"

namespace occupancy {

namespace {
constexpr const char* kFormat = "occupancy-lstm/1";
}

void write_model(std::ostream& out, const ModelFile& m) {
    out << "# single-layer LSTM occupancy model\n";
    out << "format=" << kFormat << '\n';
    out << "room=" << m.room_id << '\n';
    out << "hidden=" << m.params.hidden() << '\n';
    out << "inputs=" << m.params.inputs() << '\n';
    out << "features=";
    for (std::size_t j = 0; j < m.layout.size(); ++j) {
        out << (j ? "," : "") << m.layout.names[j] << ':'
            << (m.layout.kinds[j] == FeatureKind::Binary ? 'b' : 'c');
    }
    out << '\n';
    out << "window=" << m.config.window << '\n';
    out << "seed=" << m.config.seed << '\n';
    out << "epochs=" << m.config.epochs << '\n';
    out << "learning_rate=" << format_exact(m.config.learning_rate) << '\n';
    out << "tbptt_segment=" << m.config.tbptt_segment << '\n';
    out << "train_fraction=" << format_exact(m.train_fraction) << '\n';
    out << "norm_stats=" << m.norm_stats_file << '\n';
    out << "param_count=" << m.params.size() << '\n';
    out << "params=";
    const auto flat = m.params.flat();
    for (std::size_t i = 0; i < flat.size(); ++i) {
        out << (i ? " " : "") << format_exact(flat[i]);
    }
    out << '\n';
}

ModelFile read_model(std::istream& in) {
    const KeyValues kv = read_key_values(in);
    if (kv.get("format") != kFormat) {
        throw SchemaError("unsupported model format '" + kv.get("format") + "'");
    }
    ModelFile m;
    m.room_id = kv.get("room");
    const std::size_t hidden = kv.get_size("hidden");
    const std::size_t inputs = kv.get_size("inputs");

    for (auto item : split_fields(kv.get("features"), ',')) {
        const auto colon = item.rfind(':');
        if (colon == std::string_view::npos) throw SchemaError("bad feature entry in model");
        m.layout.names.emplace_back(item.substr(0, colon));
        const auto kind = item.substr(colon + 1);
        if (kind == "b") {
            m.layout.kinds.push_back(FeatureKind::Binary);
        } else if (kind == "c") {
            m.layout.kinds.push_back(FeatureKind::Continuous);
        } else {
            throw SchemaError("bad feature kind in model");
        }
    }
    if (m.layout.size() != inputs) throw SchemaError("feature list does not match input count");

    m.config.hidden = hidden;
    m.config.window = static_cast<int>(kv.get_size("window"));
    m.config.seed = kv.get_size("seed");
    m.config.epochs = static_cast<int>(kv.get_size("epochs"));
    m.config.learning_rate = kv.get_double("learning_rate");
    m.config.tbptt_segment = kv.get_size("tbptt_segment");
    m.train_fraction = kv.get_double("train_fraction");
    m.norm_stats_file = kv.get("norm_stats");

    m.params = LstmParams(hidden, inputs);
    if (kv.get_size("param_count") != m.params.size()) {
        throw SchemaError("param_count does not match hidden/inputs");
    }
    auto flat = m.params.flat();
    const auto values = split_fields(kv.get("params"), ' ');
    if (values.size() != flat.size()) {
        throw SchemaError("expected " + std::to_string(flat.size()) + " parameters, found " +
                          std::to_string(values.size()));
    }
    for (std::size_t i = 0; i < flat.size(); ++i) {
        const auto v = parse_double(values[i]);
        if (!v) throw SchemaError("parameter " + std::to_string(i) + " is not a finite number");
        flat[i] = *v;
    }
    return m;
}

void save_model(const std::filesystem::path& path, const ModelFile& model) {
    std::ostringstream os;
    write_model(os, model);
    write_file_atomic(path, os.str());
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model " + path.string());
    return read_model(in);
}

}  // namespace occupancy
