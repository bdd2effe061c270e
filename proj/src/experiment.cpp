#include "fedccfa/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "fedccfa/error.hpp"

namespace fedccfa {
namespace {

std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed * 0x9e3779b97f4a7c15ULL + stream;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string g6(double d) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", d);
    return buf;
}

void check_metrics(const RoundMetrics& m) {
    auto in_unit = [](double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; };
    if (!std::isfinite(m.extractor_delta_norm) || m.extractor_delta_norm < 0.0) {
        throw InvariantError("round " + std::to_string(m.round) + ": invalid extractor delta norm");
    }
    if (m.rand_index && !in_unit(*m.rand_index)) {
        throw InvariantError("round " + std::to_string(m.round) + ": rand index out of [0,1]");
    }
    for (double a : m.client_accuracy) {
        if (!in_unit(a)) {
            throw InvariantError("round " + std::to_string(m.round) + ": accuracy out of [0,1]");
        }
    }
    if (!std::isfinite(m.mean_alignment_weight)) {
        throw InvariantError("round " + std::to_string(m.round) + ": non-finite alignment weight");
    }
}

}  // namespace

SimulationSetup make_setup(const ExperimentConfig& config, std::uint64_t seed) {
    config.validate();
    SimulationSetup s;
    if (config.source == DatasetSource::synthetic) {
        SyntheticSpec spec{config.classes,         config.input_dim, config.train_per_class,
                           config.separation,      config.noise,     derive(seed, 1)};
        s.train = make_synthetic(spec);
        spec.per_class = config.test_per_class;
        spec.seed = derive(seed, 2);
        s.test = make_synthetic(spec);
    } else {
        s.train = load_idx(config.idx_train_images, config.idx_train_labels);
        s.test = load_idx(config.idx_test_images, config.idx_test_labels, s.train.class_count);
    }
    s.partition = dirichlet_partition(
        s.train, PartitionSpec{config.clients, config.alpha, config.min_per_class, derive(seed, 3)});
    s.schedule =
        build_drift_schedule(config.drift, config.rounds, config.drift_fraction, config.swap_rules);
    s.algorithm = config.algorithm;
    s.hidden_dim = config.hidden_dim;
    s.total_rounds = config.rounds;
    s.seed = derive(seed, 4);
    s.workers = config.workers;
    return s;
}

std::string metrics_header(std::size_t clients) {
    std::string h = "seed,round,mean_acc,frob_norm,rand_index,mean_align_weight";
    for (std::size_t k = 0; k < clients; ++k) {
        h += ",acc_client_" + std::to_string(k);
    }
    return h;
}

std::string metrics_row(std::uint64_t seed, const RoundMetrics& m) {
    std::string r = std::to_string(seed) + ',' + std::to_string(m.round) + ',' +
                    g6(m.mean_accuracy) + ',' + g6(m.extractor_delta_norm) + ',' +
                    (m.rand_index ? g6(*m.rand_index) : std::string()) + ',' +
                    g6(m.mean_alignment_weight);
    for (double a : m.client_accuracy) {
        r += ',' + g6(a);
    }
    return r;
}

ExperimentSummary run_experiment(const ExperimentConfig& config, const RoundObserver& observer) {
    config.validate();
    namespace fs = std::filesystem;
    const fs::path out_dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    }

    ExperimentSummary summary;
    summary.metrics_path = out_dir / "metrics.csv";
    summary.summary_path = out_dir / "summary.jsonl";
    std::ofstream metrics(summary.metrics_path);
    if (!metrics) {
        throw IoError("cannot write " + summary.metrics_path.string());
    }
    metrics << metrics_header(config.clients) << '\n';

    for (std::uint64_t seed : config.seeds) {
        Simulation sim(make_setup(config, seed));
        if (config.dump_distances) {
            const fs::path dir = out_dir / "distances" / ("seed_" + std::to_string(seed));
            fs::create_directories(dir, ec);
            if (ec) {
                throw IoError("cannot create " + dir.string() + ": " + ec.message());
            }
            sim.on_distances = [dir](std::size_t round, const std::vector<DistanceMatrix>& ms) {
                for (std::size_t c = 0; c < ms.size(); ++c) {
                    write_distance_csv(dir / ("round_" + std::to_string(round) + "_class_" +
                                              std::to_string(c) + ".csv"),
                                       ms[c]);
                }
            };
        }
        double last = 0.0;
        for (std::size_t t = 0; t < config.rounds; ++t) {
            const bool eval = (t + 1) % config.eval_interval == 0 || t + 1 == config.rounds;
            const RoundMetrics m = sim.step(eval);
            check_metrics(m);
            if (observer) {
                observer(seed, m);
            }
            if (eval) {
                metrics << metrics_row(seed, m) << '\n';
                last = m.mean_accuracy;
            }
        }
        summary.seeds.push_back(seed);
        summary.final_accuracies.push_back(last);
    }
    metrics.flush();
    if (!metrics) {
        throw IoError("write failed for " + summary.metrics_path.string());
    }

    const auto n = static_cast<double>(summary.final_accuracies.size());
    summary.mean =
        std::accumulate(summary.final_accuracies.begin(), summary.final_accuracies.end(), 0.0) / n;
    double var = 0.0;
    for (double a : summary.final_accuracies) {
        var += (a - summary.mean) * (a - summary.mean);
    }
    summary.std = std::sqrt(var / n);

    nlohmann::json j;
    j["variant"] = to_string(config.algorithm.variant);
    j["drift"] = to_string(config.drift);
    j["rounds"] = config.rounds;
    j["seeds"] = summary.seeds;
    j["final_accuracy"] = summary.final_accuracies;
    j["mean"] = summary.mean;
    j["std"] = summary.std;
    std::ofstream js(summary.summary_path);
    if (!js) {
        throw IoError("cannot write " + summary.summary_path.string());
    }
    js << j.dump() << '\n';
    return summary;
}

}  // namespace fedccfa
