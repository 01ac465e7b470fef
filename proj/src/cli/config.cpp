#include "cal/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/core.h>
#include <json.hpp>

#include "cal/error.hpp"

namespace cal::cli {

using nlohmann::json;

void RunConfig::set_seed(std::uint64_t value) {
    seed = value;
    train.seed = value;
    synth.seed = value;
}

namespace {

struct KeySpec {
    ConfigKey doc;
    std::function<void(RunConfig&, const json&)> apply;
};

template <typename T>
T as(const json& v, const std::string& key) {
    try {
        if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError("");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError("");
            if constexpr (std::is_unsigned_v<T>) {
                if (v.get<std::int64_t>() < 0 && !v.is_number_unsigned()) throw ConfigError("");
            }
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError("");
        }
        return v.get<T>();
    } catch (const std::exception&) {
        throw ConfigError(fmt::format("config key '{}' has a value of the wrong type", key));
    }
}

#define CAL_KEY(name, def, desc, expr) \
    KeySpec { ConfigKey{name, def, desc}, [](RunConfig& c, const json& v) { expr; } }

const std::vector<KeySpec>& specs() {
    static const std::vector<KeySpec> table = {
        CAL_KEY("seed", "0", "seed for shuffling and synthesis", c.set_seed(as<std::uint64_t>(v, "seed"))),
        CAL_KEY("out", "out", "output directory", c.out_dir = as<std::string>(v, "out")),
        CAL_KEY("data.train_manifest", "", "training manifest path",
                c.train_manifest = as<std::string>(v, "data.train_manifest")),
        CAL_KEY("data.test_manifest", "", "held-out manifest path (evaluation, snapshots)",
                c.test_manifest = as<std::string>(v, "data.test_manifest")),
        CAL_KEY("data.weights", "[] (uniform)", "per-band intensity weights for binarization",
                c.train.intensity_weights = as<std::vector<double>>(v, "data.weights")),
        CAL_KEY("model.window", "5", "odd neighbourhood size k of the k x k x B classifier",
                c.window = as<int>(v, "model.window")),
        CAL_KEY("train.learning_rate", "0.001", "Adam learning rate",
                c.train.learning_rate = as<double>(v, "train.learning_rate")),
        CAL_KEY("train.epochs", "3", "passes over the training split",
                c.train.epochs = as<std::uint32_t>(v, "train.epochs")),
        CAL_KEY("train.batch_size", "1", "patches per mini-batch",
                c.train.batch_size = as<std::size_t>(v, "train.batch_size")),
        CAL_KEY("train.eval_cut", "0.5", "probability cut for predicted masks",
                c.train.eval_cut = as<double>(v, "train.eval_cut")),
        CAL_KEY("controller.initial_threshold", "60", "starting pixel-intensity threshold",
                c.train.controller.initial_threshold = as<double>(v, "controller.initial_threshold")),
        CAL_KEY("controller.delta", "2", "threshold step size",
                c.train.controller.delta = as<double>(v, "controller.delta")),
        CAL_KEY("controller.lower_bound", "45", "threshold floor",
                c.train.controller.lower_bound = as<double>(v, "controller.lower_bound")),
        CAL_KEY("controller.upper_bound", "255", "threshold ceiling",
                c.train.controller.upper_bound = as<double>(v, "controller.upper_bound")),
        CAL_KEY("controller.update_frequency", "150", "batches between threshold updates",
                c.train.controller.update_frequency =
                    as<std::uint64_t>(v, "controller.update_frequency")),
        CAL_KEY("morphology.opening_radius", "0", "opening radius applied to regenerated labels",
                c.train.morphology.opening = as<int>(v, "morphology.opening_radius")),
        CAL_KEY("morphology.closing_radius", "0", "closing radius applied to regenerated labels",
                c.train.morphology.closing = as<int>(v, "morphology.closing_radius")),
        CAL_KEY("synth.count", "64", "training patches", c.synth.count = as<std::size_t>(v, "synth.count")),
        CAL_KEY("synth.test_count", "16", "held-out patches (clean masks)",
                c.synth.test_count = as<std::size_t>(v, "synth.test_count")),
        CAL_KEY("synth.size", "64", "patch side in pixels", c.synth.size = as<std::size_t>(v, "synth.size")),
        CAL_KEY("synth.true_threshold", "70", "threshold defining clean masks, in (45, 255)",
                c.synth.true_threshold = as<double>(v, "synth.true_threshold")),
        CAL_KEY("synth.smoothness", "8", "value-noise lattice spacing in pixels",
                c.synth.smoothness = as<double>(v, "synth.smoothness")),
        CAL_KEY("synth.gamma", "2", "contrast exponent applied to the noise field",
                c.synth.gamma = as<double>(v, "synth.gamma")),
        CAL_KEY("synth.flip_fraction", "0.15", "fraction of training-mask pixels flipped",
                c.synth.flip_fraction = as<double>(v, "synth.flip_fraction")),
        CAL_KEY("synth.dilation_radius", "1", "dilation applied after flipping",
                c.synth.dilation_radius = as<int>(v, "synth.dilation_radius")),
        CAL_KEY("synth.band_jitter", "2", "per-band uniform intensity jitter bound",
                c.synth.band_jitter = as<double>(v, "synth.band_jitter")),
        CAL_KEY("synth.bands", "4", "number of bands (red, green, blue, nir prefix)",
                c.synth.band_count = as<std::size_t>(v, "synth.bands")),
        CAL_KEY("synth.bit_depth", "8", "PGM bit depth, 8 or 16",
                c.synth.bit_depth = as<int>(v, "synth.bit_depth")),
    };
    return table;
}

#undef CAL_KEY

void walk(const json& node, const std::string& prefix, RunConfig& config) {
    for (const auto& [key, value] : node.items()) {
        const std::string name = prefix.empty() ? key : prefix + "." + key;
        const auto& table = specs();
        const auto it = std::find_if(table.begin(), table.end(),
                                     [&](const KeySpec& s) { return s.doc.name == name; });
        if (it != table.end()) {
            it->apply(config, value);
        } else if (value.is_object() && prefix.empty()) {
            walk(value, name, config);
        } else {
            throw ConfigError(fmt::format("unknown config key '{}'", name));
        }
    }
}

}  // namespace

RunConfig parse_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig config;
    walk(doc, "", config);
    if (config.window < 1 || config.window % 2 == 0) {
        throw ConfigError(fmt::format("model.window must be odd and positive, got {}", config.window));
    }
    config.train.validate();
    config.synth.validate();
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config {}", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> out;
        for (const auto& s : specs()) out.push_back(s.doc);
        return out;
    }();
    return keys;
}

}  // namespace cal::cli
