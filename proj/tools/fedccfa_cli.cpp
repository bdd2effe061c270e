// Command-line driver. Talks to the simulator only through the C interface.
//
//   fedccfa run <config-path>
//   fedccfa plot <metrics.csv>... --series <column> --out <file.svg>
//
// FEDCCFA_OUTPUT_DIR overrides output_dir from the config file.
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedccfa/fedccfa.h"

namespace {

int exit_code(fedccfa_status status) {
    switch (status) {
        case FEDCCFA_OK: return 0;
        case FEDCCFA_ERR_CONFIG: return 1;
        default: return 2;
    }
}

int report(fedccfa_status status) {
    if (status != FEDCCFA_OK) {
        std::fprintf(stderr, "fedccfa: %s: %s\n", fedccfa_status_name(status), fedccfa_last_error());
    }
    return exit_code(status);
}

int run(const std::string& config_path) {
    fedccfa_config* config = nullptr;
    fedccfa_status st = fedccfa_config_load(config_path.c_str(), &config);
    if (st != FEDCCFA_OK) {
        return report(st);
    }
    if (const char* dir = std::getenv("FEDCCFA_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
        st = fedccfa_config_set(config, "output_dir", dir);
        if (st == FEDCCFA_OK) {
            st = fedccfa_config_validate(config);
        }
        if (st != FEDCCFA_OK) {
            fedccfa_config_free(config);
            return report(st);
        }
    }
    fedccfa_summary* summary = nullptr;
    st = fedccfa_run(config, &summary);
    fedccfa_config_free(config);
    if (st != FEDCCFA_OK) {
        return report(st);
    }
    const size_t n = fedccfa_summary_seed_count(summary);
    for (size_t i = 0; i < n; ++i) {
        std::printf("seed %zu: final mean accuracy %.4f\n", i, fedccfa_summary_final_accuracy(summary, i));
    }
    std::printf("final accuracy %.4f +- %.4f over %zu seed(s); metrics in %s\n",
                fedccfa_summary_mean(summary), fedccfa_summary_std(summary), n,
                fedccfa_summary_metrics_path(summary));
    fedccfa_summary_free(summary);
    return 0;
}

int plot(const std::vector<std::string>& files, const std::string& series, const std::string& out) {
    std::vector<const char*> paths;
    for (const auto& f : files) {
        paths.push_back(f.c_str());
    }
    const fedccfa_status st = fedccfa_plot(paths.data(), paths.size(), series.c_str(), out.c_str());
    if (st == FEDCCFA_ERR_DATA) {
        // a missing column is a usage problem
        report(st);
        return 1;
    }
    return report(st);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Federated learning under distributed concept drift"};
    app.require_subcommand(1);
    app.set_version_flag("--version", fedccfa_version());

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "Run an experiment from a key=value config file");
    run_cmd->add_option("config", config_path, "Config file")->required();

    std::vector<std::string> files;
    std::string series = "mean_acc";
    std::string out;
    auto* plot_cmd = app.add_subcommand("plot", "Render metrics.csv columns as an SVG line plot");
    plot_cmd->add_option("metrics", files, "metrics.csv files")->required();
    plot_cmd->add_option("--series", series, "Column to plot (e.g. mean_acc, frob_norm)");
    plot_cmd->add_option("--out", out, "Output SVG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (*run_cmd) {
        return run(config_path);
    }
    return plot(files, series, out);
}
