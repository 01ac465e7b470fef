#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cal/synthetic.hpp"
#include "cal/trainer.hpp"

namespace cal::cli {

/// Everything a command needs. Defaults are the training constants listed by --help.
struct RunConfig {
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "out";
    std::filesystem::path train_manifest;
    std::filesystem::path test_manifest;
    int window = 5;
    TrainConfig train;
    SynthConfig synth;

    /// Applies the seed to both training shuffles and synthesis.
    void set_seed(std::uint64_t value);
};

/// JSON document of nested sections, e.g. {"controller": {"update_frequency": 10}}.
/// Unknown sections or keys, and values of the wrong type, raise ConfigError.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

struct ConfigKey {
    std::string name;           // dotted path, e.g. "controller.delta"
    std::string default_value;  // rendered default
    std::string description;
};

/// Every accepted key with its default, in documentation order.
const std::vector<ConfigKey>& config_keys();

}  // namespace cal::cli
