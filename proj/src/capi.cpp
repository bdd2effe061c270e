#include "fedccfa/fedccfa.h"

#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "fedccfa/config.hpp"
#include "fedccfa/error.hpp"
#include "fedccfa/experiment.hpp"
#include "fedccfa/plot.hpp"

struct fedccfa_config {
    fedccfa::ExperimentConfig value;
};

struct fedccfa_simulation {
    fedccfa::Simulation sim;
};

struct fedccfa_summary {
    fedccfa::ExperimentSummary value;
    std::string metrics_path;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
fedccfa_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return FEDCCFA_OK;
    } catch (const fedccfa::ConfigError& e) {
        g_last_error = e.what();
        return FEDCCFA_ERR_CONFIG;
    } catch (const fedccfa::InvariantError& e) {
        g_last_error = e.what();
        return FEDCCFA_ERR_INVARIANT;
    } catch (const fedccfa::DataError& e) {
        g_last_error = e.what();
        return FEDCCFA_ERR_DATA;
    } catch (const fedccfa::IoError& e) {
        g_last_error = e.what();
        return FEDCCFA_ERR_IO;
    } catch (const fedccfa::ContractError& e) {
        g_last_error = e.what();
        return FEDCCFA_ERR_CONTRACT;
    } catch (const fedccfa::DegenerateSimilarityError& e) {
        g_last_error = e.what();
        return FEDCCFA_ERR_DEGENERATE;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return FEDCCFA_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return FEDCCFA_ERR_INTERNAL;
    }
}

void require(const void* p, const char* what) {
    if (p == nullptr) {
        throw fedccfa::ContractError(std::string(what) + " must not be null");
    }
}

}  // namespace

extern "C" {

const char* fedccfa_version(void) { return "1.0.0"; }

const char* fedccfa_last_error(void) { return g_last_error.c_str(); }

const char* fedccfa_status_name(fedccfa_status status) {
    switch (status) {
        case FEDCCFA_OK: return "ok";
        case FEDCCFA_ERR_CONFIG: return "config error";
        case FEDCCFA_ERR_INVARIANT: return "invariant breach";
        case FEDCCFA_ERR_DATA: return "data error";
        case FEDCCFA_ERR_IO: return "i/o error";
        case FEDCCFA_ERR_CONTRACT: return "contract violation";
        case FEDCCFA_ERR_DEGENERATE: return "degenerate similarity";
        case FEDCCFA_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

fedccfa_status fedccfa_config_default(fedccfa_config** out) {
    return guarded([&] {
        require(out, "out");
        *out = new fedccfa_config{};
    });
}

fedccfa_status fedccfa_config_load(const char* path, fedccfa_config** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new fedccfa_config{fedccfa::parse_config(path)};
    });
}

fedccfa_status fedccfa_config_parse(const char* text, fedccfa_config** out) {
    return guarded([&] {
        require(text, "text");
        require(out, "out");
        *out = new fedccfa_config{fedccfa::parse_config_text(text)};
    });
}

fedccfa_status fedccfa_config_set(fedccfa_config* config, const char* key, const char* value) {
    return guarded([&] {
        require(config, "config");
        require(key, "key");
        require(value, "value");
        fedccfa::set_config_value(config->value, key, value);
    });
}

fedccfa_status fedccfa_config_validate(const fedccfa_config* config) {
    return guarded([&] {
        require(config, "config");
        config->value.validate();
    });
}

fedccfa_status fedccfa_config_serialize(const fedccfa_config* config, char* buf, size_t cap,
                                        size_t* length) {
    return guarded([&] {
        require(config, "config");
        const std::string text = fedccfa::serialize_config(config->value);
        if (length != nullptr) {
            *length = text.size();
        }
        if (cap > 0) {
            require(buf, "buf");
            const size_t n = std::min(cap - 1, text.size());
            std::memcpy(buf, text.data(), n);
            buf[n] = '\0';
        }
    });
}

void fedccfa_config_free(fedccfa_config* config) { delete config; }

fedccfa_status fedccfa_run(const fedccfa_config* config, fedccfa_summary** out) {
    return guarded([&] {
        require(config, "config");
        auto summary = fedccfa::run_experiment(config->value);
        if (out != nullptr) {
            auto path = summary.metrics_path.string();
            *out = new fedccfa_summary{std::move(summary), std::move(path)};
        }
    });
}

size_t fedccfa_summary_seed_count(const fedccfa_summary* summary) {
    return summary ? summary->value.seeds.size() : 0;
}

double fedccfa_summary_final_accuracy(const fedccfa_summary* summary, size_t index) {
    if (summary == nullptr || index >= summary->value.final_accuracies.size()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return summary->value.final_accuracies[index];
}

double fedccfa_summary_mean(const fedccfa_summary* summary) {
    return summary ? summary->value.mean : 0.0;
}

double fedccfa_summary_std(const fedccfa_summary* summary) {
    return summary ? summary->value.std : 0.0;
}

const char* fedccfa_summary_metrics_path(const fedccfa_summary* summary) {
    return summary ? summary->metrics_path.c_str() : "";
}

void fedccfa_summary_free(fedccfa_summary* summary) { delete summary; }

fedccfa_status fedccfa_simulation_create(const fedccfa_config* config, uint64_t seed,
                                         fedccfa_simulation** out) {
    return guarded([&] {
        require(config, "config");
        require(out, "out");
        *out = new fedccfa_simulation{fedccfa::Simulation(fedccfa::make_setup(config->value, seed))};
    });
}

fedccfa_status fedccfa_simulation_step(fedccfa_simulation* sim, fedccfa_round_info* info) {
    return guarded([&] {
        require(sim, "sim");
        if (sim->sim.round() >= sim->sim.setup().total_rounds) {
            throw fedccfa::ContractError("simulation already ran all configured rounds");
        }
        const fedccfa::RoundMetrics m = sim->sim.step(true);
        if (info != nullptr) {
            info->round = m.round;
            info->evaluated = m.evaluated ? 1 : 0;
            info->mean_accuracy = m.mean_accuracy;
            info->extractor_delta_norm = m.extractor_delta_norm;
            info->has_rand_index = m.rand_index ? 1 : 0;
            info->rand_index = m.rand_index.value_or(0.0);
            info->mean_alignment_weight = m.mean_alignment_weight;
        }
    });
}

size_t fedccfa_simulation_client_count(const fedccfa_simulation* sim) {
    return sim ? sim->sim.clients().size() : 0;
}

fedccfa_status fedccfa_simulation_accuracies(const fedccfa_simulation* sim, double* out,
                                             size_t count) {
    return guarded([&] {
        require(sim, "sim");
        require(out, "out");
        const auto acc = sim->sim.evaluate();
        if (count < acc.size()) {
            throw fedccfa::ContractError("output buffer holds " + std::to_string(count) +
                                         " values, need " + std::to_string(acc.size()));
        }
        std::copy(acc.begin(), acc.end(), out);
    });
}

void fedccfa_simulation_free(fedccfa_simulation* sim) { delete sim; }

fedccfa_status fedccfa_plot(const char* const* csv_paths, size_t path_count, const char* column,
                            const char* out_path) {
    return guarded([&] {
        require(column, "column");
        require(out_path, "out_path");
        if (path_count == 0) {
            throw fedccfa::ContractError("plot needs at least one metrics file");
        }
        require(csv_paths, "csv_paths");
        std::vector<std::filesystem::path> paths;
        for (size_t i = 0; i < path_count; ++i) {
            require(csv_paths[i], "csv path");
            paths.emplace_back(csv_paths[i]);
        }
        fedccfa::emit_plot(paths, column, out_path);
    });
}

}  // extern "C"
