#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "fedccfa/config.hpp"
#include "fedccfa/federation.hpp"

namespace fedccfa {

struct ExperimentSummary {
    std::vector<std::uint64_t> seeds;
    std::vector<double> final_accuracies;  // mean client accuracy at the last round, per seed
    double mean = 0.0;
    double std = 0.0;  // population standard deviation over seeds
    std::filesystem::path metrics_path;
    std::filesystem::path summary_path;
};

using RoundObserver = std::function<void(std::uint64_t seed, const RoundMetrics&)>;

/// Builds the per-seed simulation inputs (datasets, partition, schedule).
SimulationSetup make_setup(const ExperimentConfig& config, std::uint64_t seed);

/// Runs every seed for `rounds` rounds and writes into output_dir:
///   metrics.csv   seed,round,mean_acc,frob_norm,rand_index,mean_align_weight,acc_client_0..
///   summary.jsonl one JSON object with final accuracies, mean and std
///   distances/seed_<s>/round_<t>_class_<c>.csv when dump_distances is set
/// Throws InvariantError if a metric leaves its valid range.
ExperimentSummary run_experiment(const ExperimentConfig& config, const RoundObserver& observer = {});

std::string metrics_header(std::size_t clients);
std::string metrics_row(std::uint64_t seed, const RoundMetrics& m);

}  // namespace fedccfa
