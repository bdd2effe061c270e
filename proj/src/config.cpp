#include "fedccfa/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "fedccfa/error.hpp"

namespace fedccfa {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        out.push_back(trim(cur));
    }
    return out;
}

double to_double(const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(d)) {
        throw ConfigError("'" + v + "' is not a finite number");
    }
    return d;
}

std::uint64_t to_u64(const std::string& v) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
        throw ConfigError("'" + v + "' is not a non-negative integer");
    }
    errno = 0;
    const unsigned long long u = std::strtoull(v.c_str(), nullptr, 10);
    if (errno == ERANGE) {
        throw ConfigError("'" + v + "' is out of range");
    }
    return u;
}

std::size_t to_size(const std::string& v) { return static_cast<std::size_t>(to_u64(v)); }

bool to_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    throw ConfigError("'" + v + "' is not a boolean");
}

std::string fmt_double(double d) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

template <typename E>
E to_enum(const std::string& v, std::initializer_list<std::pair<const char*, E>> options) {
    std::string names;
    for (const auto& [name, value] : options) {
        if (v == name) {
            return value;
        }
        names += names.empty() ? name : std::string("|") + name;
    }
    throw ConfigError("'" + v + "' is not one of " + names);
}

template <typename E>
std::string from_enum(E e, std::initializer_list<std::pair<const char*, E>> options) {
    for (const auto& [name, value] : options) {
        if (value == e) {
            return name;
        }
    }
    return "?";
}

const std::initializer_list<std::pair<const char*, Variant>> kVariants = {
    {"fedccfa", Variant::fedccfa},
    {"fedavg", Variant::fedavg},
    {"decoupled", Variant::decoupled},
    {"decoupled_clustering", Variant::decoupled_clustering}};
const std::initializer_list<std::pair<const char*, ClusteringInput>> kInputs = {
    {"balanced", ClusteringInput::balanced},
    {"local", ClusteringInput::local},
    {"oracle", ClusteringInput::oracle}};
const std::initializer_list<std::pair<const char*, AnchorMode>> kAnchors = {
    {"clustered", AnchorMode::clustered}, {"global", AnchorMode::global}, {"off", AnchorMode::off}};
const std::initializer_list<std::pair<const char*, WeightMode>> kWeights = {
    {"adaptive", WeightMode::adaptive}, {"fixed", WeightMode::fixed}};
const std::initializer_list<std::pair<const char*, AggregationMode>> kAggregation = {
    {"uniform", AggregationMode::uniform}, {"weighted", AggregationMode::weighted}};
const std::initializer_list<std::pair<const char*, DriftPattern>> kDrift = {
    {"none", DriftPattern::none},
    {"sudden", DriftPattern::sudden},
    {"incremental", DriftPattern::incremental},
    {"reoccurring", DriftPattern::reoccurring}};
const std::initializer_list<std::pair<const char*, DatasetSource>> kSources = {
    {"synthetic", DatasetSource::synthetic}, {"idx", DatasetSource::idx}};

// a:b:modulus:lo:hi;...   or "standard"
std::vector<SwapRule> to_rules(const std::string& v) {
    if (v == "standard") {
        return standard_swap_rules();
    }
    std::vector<SwapRule> out;
    for (const auto& item : split(v, ';')) {
        if (item.empty()) {
            continue;
        }
        const auto f = split(item, ':');
        if (f.size() != 5) {
            throw ConfigError("swap rule '" + item + "' must be class_a:class_b:modulus:lo:hi");
        }
        SwapRule r{static_cast<int>(to_u64(f[0])), static_cast<int>(to_u64(f[1])),
                   ResidueRange{static_cast<int>(to_u64(f[2])), static_cast<int>(to_u64(f[3])),
                                static_cast<int>(to_u64(f[4]))}};
        if (r.class_a == r.class_b) {
            throw ConfigError("swap rule '" + item + "' swaps a class with itself");
        }
        if (r.clients.modulus < 1 || r.clients.lo > r.clients.hi) {
            throw ConfigError("swap rule '" + item + "' has an invalid client range");
        }
        out.push_back(r);
    }
    return out;
}

std::string from_rules(const std::vector<SwapRule>& rules) {
    std::string out;
    for (const auto& r : rules) {
        if (!out.empty()) {
            out += ';';
        }
        out += std::to_string(r.class_a) + ':' + std::to_string(r.class_b) + ':' +
               std::to_string(r.clients.modulus) + ':' + std::to_string(r.clients.lo) + ':' +
               std::to_string(r.clients.hi);
    }
    return out;
}

std::vector<std::uint64_t> to_seeds(const std::string& v) {
    std::vector<std::uint64_t> out;
    for (const auto& s : split(v, ',')) {
        out.push_back(to_u64(s));
    }
    if (out.empty()) {
        throw ConfigError("seeds must list at least one seed");
    }
    return out;
}

std::string from_seeds(const std::vector<std::uint64_t>& seeds) {
    std::string out;
    for (auto s : seeds) {
        out += (out.empty() ? "" : ",") + std::to_string(s);
    }
    return out;
}

double positive(double d, const char* what) {
    if (!(d > 0.0)) {
        throw ConfigError(std::string(what) + " must be > 0");
    }
    return d;
}

double non_negative(double d, const char* what) {
    if (d < 0.0) {
        throw ConfigError(std::string(what) + " must be >= 0");
    }
    return d;
}

double unit_interval(double d, bool closed_top, const char* what) {
    if (!(d > 0.0) || d > 1.0 || (!closed_top && d == 1.0)) {
        throw ConfigError(std::string(what) + (closed_top ? " must lie in (0, 1]" : " must lie in (0, 1)"));
    }
    return d;
}

std::size_t at_least(std::size_t v, std::size_t lo, const char* what) {
    if (v < lo) {
        throw ConfigError(std::string(what) + " must be >= " + std::to_string(lo));
    }
    return v;
}

double momentum_value(double d) {
    if (d < 0.0 || d >= 1.0) {
        throw ConfigError("momentum must lie in [0, 1)");
    }
    return d;
}

struct Field {
    const char* key;
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

#define FIELD_DOUBLE(name, member, check)                                               \
    Field {                                                                             \
        name, [](ExperimentConfig& c, const std::string& v) { c.member = check; },      \
            [](const ExperimentConfig& c) { return fmt_double(c.member); }              \
    }
#define FIELD_SIZE(name, member, lo)                                                    \
    Field {                                                                             \
        name,                                                                           \
            [](ExperimentConfig& c, const std::string& v) {                             \
                c.member = at_least(to_size(v), lo, name);                              \
            },                                                                          \
            [](const ExperimentConfig& c) { return std::to_string(c.member); }          \
    }
#define FIELD_ENUM(name, member, table)                                                 \
    Field {                                                                             \
        name, [](ExperimentConfig& c, const std::string& v) { c.member = to_enum(v, table); }, \
            [](const ExperimentConfig& c) { return from_enum(c.member, table); }        \
    }
#define FIELD_STRING(name, member)                                                      \
    Field {                                                                             \
        name, [](ExperimentConfig& c, const std::string& v) { c.member = v; },          \
            [](const ExperimentConfig& c) { return c.member; }                          \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        FIELD_ENUM("variant", algorithm.variant, kVariants),
        FIELD_ENUM("clustering_input", algorithm.clustering_input, kInputs),
        FIELD_ENUM("anchors", algorithm.anchors, kAnchors),
        FIELD_ENUM("alignment", algorithm.weight_mode, kWeights),
        FIELD_DOUBLE("gamma", algorithm.gamma, positive(to_double(v), "gamma")),
        FIELD_DOUBLE("lambda", algorithm.fixed_weight, non_negative(to_double(v), "lambda")),
        FIELD_ENUM("aggregation", algorithm.aggregation, kAggregation),
        FIELD_SIZE("T_s", algorithm.alignment_start, 0),
        FIELD_SIZE("E", algorithm.local_epochs, 0),
        FIELD_SIZE("s", algorithm.balanced_steps, 0),
        FIELD_SIZE("per_class_batch", algorithm.balanced_per_class, 1),
        FIELD_SIZE("batch_size", algorithm.batch_size, 1),
        FIELD_DOUBLE("eta_theta", algorithm.lr_extractor, non_negative(to_double(v), "eta_theta")),
        FIELD_DOUBLE("eta_phi", algorithm.lr_classifier, non_negative(to_double(v), "eta_phi")),
        FIELD_DOUBLE("eta", algorithm.lr_joint, non_negative(to_double(v), "eta")),
        FIELD_DOUBLE("momentum", algorithm.momentum, momentum_value(to_double(v))),
        FIELD_DOUBLE("weight_decay", algorithm.weight_decay,
                     non_negative(to_double(v), "weight_decay")),
        FIELD_DOUBLE("eps", algorithm.eps, positive(to_double(v), "eps")),
        FIELD_SIZE("min_samples", algorithm.min_samples, 1),
        FIELD_DOUBLE("tau", algorithm.temperature, positive(to_double(v), "tau")),
        FIELD_DOUBLE("participation", algorithm.participation,
                     unit_interval(to_double(v), true, "participation")),
        FIELD_ENUM("dataset", source, kSources),
        Field{"classes",
              [](ExperimentConfig& c, const std::string& v) {
                  c.classes = static_cast<int>(at_least(to_size(v), 2, "classes"));
              },
              [](const ExperimentConfig& c) { return std::to_string(c.classes); }},
        FIELD_SIZE("input_dim", input_dim, 1),
        FIELD_SIZE("train_per_class", train_per_class, 1),
        FIELD_SIZE("test_per_class", test_per_class, 1),
        FIELD_DOUBLE("separation", separation, non_negative(to_double(v), "separation")),
        FIELD_DOUBLE("noise", noise, non_negative(to_double(v), "noise")),
        FIELD_STRING("idx_train_images", idx_train_images),
        FIELD_STRING("idx_train_labels", idx_train_labels),
        FIELD_STRING("idx_test_images", idx_test_images),
        FIELD_STRING("idx_test_labels", idx_test_labels),
        FIELD_SIZE("hidden_dim", hidden_dim, 1),
        FIELD_SIZE("clients", clients, 1),
        FIELD_DOUBLE("alpha", alpha, positive(to_double(v), "alpha")),
        FIELD_SIZE("min_per_class", min_per_class, 0),
        FIELD_ENUM("drift", drift, kDrift),
        FIELD_DOUBLE("drift_fraction", drift_fraction, unit_interval(to_double(v), false, "drift_fraction")),
        Field{"swap_rules",
              [](ExperimentConfig& c, const std::string& v) { c.swap_rules = to_rules(v); },
              [](const ExperimentConfig& c) { return from_rules(c.swap_rules); }},
        FIELD_SIZE("rounds", rounds, 1),
        FIELD_SIZE("eval_interval", eval_interval, 1),
        Field{"seeds", [](ExperimentConfig& c, const std::string& v) { c.seeds = to_seeds(v); },
              [](const ExperimentConfig& c) { return from_seeds(c.seeds); }},
        FIELD_STRING("output_dir", output_dir),
        Field{"dump_distances",
              [](ExperimentConfig& c, const std::string& v) { c.dump_distances = to_bool(v); },
              [](const ExperimentConfig& c) {
                  return std::string(c.dump_distances ? "true" : "false");
              }},
        FIELD_SIZE("workers", workers, 1),
    };
    return table;
}

#undef FIELD_DOUBLE
#undef FIELD_SIZE
#undef FIELD_ENUM
#undef FIELD_STRING

const Field* find_field(const std::string& key) {
    for (const auto& f : fields()) {
        if (key == f.key) {
            return &f;
        }
    }
    return nullptr;
}

}  // namespace

void ExperimentConfig::validate() const {
    algorithm.validate();
    if (rounds < 1) {
        throw ConfigError("rounds must be >= 1");
    }
    if (seeds.empty()) {
        throw ConfigError("seeds must list at least one seed");
    }
    if (drift_fraction >= 1.0) {
        throw ConfigError("drift_fraction must lie in (0, 1)");
    }
    if (source == DatasetSource::idx &&
        (idx_train_images.empty() || idx_train_labels.empty() || idx_test_images.empty() ||
         idx_test_labels.empty())) {
        throw ConfigError("dataset=idx needs idx_train_images, idx_train_labels, "
                          "idx_test_images and idx_test_labels");
    }
    if (algorithm.clusters_classifiers() &&
        algorithm.clustering_input == ClusteringInput::balanced &&
        min_per_class < algorithm.balanced_per_class) {
        throw ConfigError("min_per_class (" + std::to_string(min_per_class) +
                          ") must be >= per_class_batch (" +
                          std::to_string(algorithm.balanced_per_class) +
                          ") for balanced classifier training");
    }
    if (source == DatasetSource::synthetic) {
        if (train_per_class < clients * min_per_class) {
            throw ConfigError("train_per_class (" + std::to_string(train_per_class) +
                              ") cannot give " + std::to_string(clients) + " clients " +
                              std::to_string(min_per_class) + " samples of every class");
        }
    }
    DriftSchedule schedule = build_drift_schedule(drift, rounds, drift_fraction, swap_rules);
    if (source == DatasetSource::synthetic) {
        schedule.validate(rounds, classes);
    }
}

void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value) {
    const Field* f = find_field(key);
    if (f == nullptr) {
        throw ConfigError("unknown key '" + key + "'");
    }
    try {
        f->set(config, value);
    } catch (const ConfigError& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig config;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value, got '" +
                              line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            set_config_value(config, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    config.validate();
    return config;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config_text(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string serialize_config(const ExperimentConfig& config) {
    std::string out;
    for (const auto& f : fields()) {
        out += f.key;
        out += '=';
        out += f.get(config);
        out += '\n';
    }
    return out;
}

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& f : fields()) {
        out.emplace_back(f.key);
    }
    return out;
}

std::string to_string(Variant v) { return from_enum(v, kVariants); }
std::string to_string(DriftPattern p) { return from_enum(p, kDrift); }

}  // namespace fedccfa
