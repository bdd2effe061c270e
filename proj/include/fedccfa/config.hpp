#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fedccfa/data.hpp"
#include "fedccfa/federation.hpp"

namespace fedccfa {

enum class DatasetSource { synthetic, idx };

/// Everything a run needs. Training defaults: E=5, eta_theta=0.01,
/// eta_phi=0.1, momentum 0.9, weight decay 1e-5, s=5, 5 samples per class,
/// gamma=20, eps=0.1, min_samples=1, T_s=20. The data defaults describe a
/// small synthetic problem.
struct ExperimentConfig {
    AlgorithmConfig algorithm;

    DatasetSource source = DatasetSource::synthetic;
    int classes = 10;
    std::size_t input_dim = 20;
    std::size_t train_per_class = 200;
    std::size_t test_per_class = 100;
    double separation = 4.0;
    double noise = 1.0;
    std::string idx_train_images;
    std::string idx_train_labels;
    std::string idx_test_images;
    std::string idx_test_labels;

    std::size_t hidden_dim = 32;

    std::size_t clients = 20;
    double alpha = 0.5;
    std::size_t min_per_class = 5;

    DriftPattern drift = DriftPattern::none;
    double drift_fraction = 0.5;
    std::vector<SwapRule> swap_rules = standard_swap_rules();

    std::size_t rounds = 200;
    std::size_t eval_interval = 1;
    std::vector<std::uint64_t> seeds = {0, 1, 2};
    std::string output_dir = "out";
    bool dump_distances = false;
    std::size_t workers = 1;

    // Cross-field checks; throws ConfigError.
    void validate() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Flat `key=value` text, one pair per line, `#` starts a comment. Unknown
/// keys, unparsable values and constraint violations throw ConfigError
/// naming the line.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::filesystem::path& path);

// Sets one key on an existing config (same rules as a config line).
void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Every key in a fixed order, doubles at full precision, so that
/// parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

std::vector<std::string> config_keys();

std::string to_string(Variant v);
std::string to_string(DriftPattern p);

}  // namespace fedccfa
