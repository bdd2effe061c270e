#include "fedccfa/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <set>
#include <utility>

#include "fedccfa/error.hpp"

namespace fedccfa {
namespace {

std::vector<std::vector<std::size_t>> indices_by_class(const LabeledDataset& dataset) {
    std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(dataset.class_count));
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        out[static_cast<std::size_t>(dataset.labels[i])].push_back(i);
    }
    return out;
}

std::vector<double> dirichlet_draw(std::size_t k, double alpha, std::mt19937_64& rng) {
    std::gamma_distribution<double> gamma(alpha, 1.0);
    std::vector<double> p(k);
    double sum = 0.0;
    for (double& x : p) {
        x = gamma(rng);
        sum += x;
    }
    if (!(sum > 0.0)) {
        // every gamma variate underflowed (tiny alpha): the limit is a vertex
        std::uniform_int_distribution<std::size_t> pick(0, k - 1);
        std::fill(p.begin(), p.end(), 0.0);
        p[pick(rng)] = 1.0;
        return p;
    }
    for (double& x : p) {
        x /= sum;
    }
    return p;
}

std::uint32_t read_be32(std::istream& in, const std::string& what) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) {
        throw DataError("idx: truncated header in " + what);
    }
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
           (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

std::vector<unsigned char> read_payload(std::istream& in, std::size_t n, const std::string& what) {
    std::vector<unsigned char> buf(n);
    if (n > 0 && !in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n))) {
        throw DataError("idx: truncated payload in " + what);
    }
    return buf;
}

constexpr std::uint32_t kIdxImages = 0x00000803;
constexpr std::uint32_t kIdxLabels = 0x00000801;

}  // namespace

void LabeledDataset::validate() const {
    if (labels.empty()) {
        throw DataError("dataset is empty");
    }
    if (inputs.rows() != labels.size()) {
        throw DataError("dataset has " + std::to_string(inputs.rows()) + " inputs but " +
                        std::to_string(labels.size()) + " labels");
    }
    for (int y : labels) {
        if (y < 0 || y >= class_count) {
            throw DataError("label " + std::to_string(y) + " outside [0, " +
                            std::to_string(class_count) + ")");
        }
    }
}

std::vector<std::vector<std::size_t>> dirichlet_partition(const LabeledDataset& dataset,
                                                          const PartitionSpec& spec) {
    dataset.validate();
    if (spec.client_count < 1) {
        throw ConfigError("partition: client_count must be >= 1");
    }
    if (!(spec.alpha > 0.0)) {
        throw ConfigError("partition: dirichlet alpha must be > 0");
    }
    const std::size_t k = spec.client_count;
    auto by_class = indices_by_class(dataset);
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        if (by_class[c].size() < k * spec.min_per_class) {
            throw ConfigError("partition: class " + std::to_string(c) + " has " +
                              std::to_string(by_class[c].size()) + " samples, need " +
                              std::to_string(k * spec.min_per_class) + " for " +
                              std::to_string(k) + " clients x " +
                              std::to_string(spec.min_per_class) + " per class");
        }
    }

    std::mt19937_64 rng(spec.seed);
    // held[client][class] -> indices
    std::vector<std::vector<std::vector<std::size_t>>> held(
        k, std::vector<std::vector<std::size_t>>(by_class.size()));
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& idx = by_class[c];
        std::shuffle(idx.begin(), idx.end(), rng);
        const auto p = dirichlet_draw(k, spec.alpha, rng);
        const auto n = static_cast<double>(idx.size());
        double cum = 0.0;
        std::size_t start = 0;
        for (std::size_t j = 0; j < k; ++j) {
            cum += p[j];
            std::size_t end = j + 1 == k ? idx.size()
                                         : std::min(idx.size(), static_cast<std::size_t>(cum * n));
            end = std::max(end, start);
            held[j][c].assign(idx.begin() + static_cast<std::ptrdiff_t>(start),
                              idx.begin() + static_cast<std::ptrdiff_t>(end));
            start = end;
        }
    }

    // Repair: top up deficient clients from the richest holder of the class.
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        for (std::size_t j = 0; j < k; ++j) {
            while (held[j][c].size() < spec.min_per_class) {
                std::size_t donor = 0;
                for (std::size_t d = 1; d < k; ++d) {
                    if (held[d][c].size() > held[donor][c].size()) {
                        donor = d;
                    }
                }
                if (donor == j || held[donor][c].size() <= spec.min_per_class) {
                    throw ConfigError("partition: cannot satisfy min_per_class for class " +
                                      std::to_string(c));
                }
                held[j][c].push_back(held[donor][c].back());
                held[donor][c].pop_back();
            }
        }
    }

    std::vector<std::vector<std::size_t>> out(k);
    for (std::size_t j = 0; j < k; ++j) {
        for (auto& part : held[j]) {
            out[j].insert(out[j].end(), part.begin(), part.end());
        }
        std::sort(out[j].begin(), out[j].end());
    }
    return out;
}

bool ResidueRange::matches(std::size_t client_id) const {
    const auto r = static_cast<int>(client_id % static_cast<std::size_t>(modulus));
    return lo <= r && r <= hi;
}

std::vector<SwapRule> standard_swap_rules() {
    return {
        SwapRule{1, 2, ResidueRange{10, 0, 2}},
        SwapRule{3, 4, ResidueRange{10, 3, 5}},
        SwapRule{5, 6, ResidueRange{10, 6, 9}},
    };
}

void DriftSchedule::validate(std::size_t total_rounds, int classes) const {
    std::set<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i].round >= total_rounds) {
            throw ConfigError("drift event at round " + std::to_string(events[i].round) +
                              " is beyond the horizon of " + std::to_string(total_rounds));
        }
        if (i > 0 && events[i].round <= events[i - 1].round) {
            throw ConfigError("drift event rounds must be strictly increasing");
        }
        for (const auto& rule : events[i].rules) {
            if (rule.class_a == rule.class_b || rule.class_a < 0 || rule.class_b < 0 ||
                rule.class_a >= classes || rule.class_b >= classes) {
                throw ConfigError("swap rule (" + std::to_string(rule.class_a) + "," +
                                  std::to_string(rule.class_b) + ") is not a valid class pair");
            }
            if (rule.clients.modulus < 1 || rule.clients.lo > rule.clients.hi) {
                throw ConfigError("swap rule has an empty or invalid client predicate");
            }
            pairs.emplace(std::min(rule.class_a, rule.class_b), std::max(rule.class_a, rule.class_b));
        }
    }
    // identical-or-disjoint pairs keep every composed permutation an involution
    std::vector<int> seen(static_cast<std::size_t>(classes), 0);
    for (const auto& [a, b] : pairs) {
        if (seen[static_cast<std::size_t>(a)]++ || seen[static_cast<std::size_t>(b)]++) {
            throw ConfigError("swap rules must use pairwise disjoint class pairs");
        }
    }
}

DriftSchedule build_drift_schedule(DriftPattern pattern, std::size_t total_rounds,
                                   double drift_fraction, const std::vector<SwapRule>& rules) {
    if (total_rounds < 1) {
        throw ConfigError("drift schedule needs at least one round");
    }
    if (!(drift_fraction > 0.0) || drift_fraction >= 1.0) {
        throw ConfigError("drift_fraction must lie in (0, 1)");
    }
    DriftSchedule schedule{pattern, {}};
    // offsets relative to the first event, in percent
    auto at = [&](int percent) {
        const double r = static_cast<double>(total_rounds) * drift_fraction * percent / 100.0;
        return static_cast<std::size_t>(std::floor(r + 1e-9));
    };
    std::vector<DriftEvent> raw;
    switch (pattern) {
        case DriftPattern::none:
            break;
        case DriftPattern::sudden:
            raw.push_back({at(100), rules});
            break;
        case DriftPattern::incremental:
            for (std::size_t i = 0; i < rules.size(); ++i) {
                raw.push_back({at(100 + 10 * static_cast<int>(i)), {rules[i]}});
            }
            break;
        case DriftPattern::reoccurring:
            raw.push_back({at(100), rules});
            raw.push_back({at(150), rules});
            break;
    }
    for (auto& ev : raw) {
        if (ev.round >= total_rounds) {
            continue;
        }
        if (!schedule.events.empty() && schedule.events.back().round == ev.round) {
            auto& dst = schedule.events.back().rules;
            dst.insert(dst.end(), ev.rules.begin(), ev.rules.end());
        } else {
            schedule.events.push_back(std::move(ev));
        }
    }
    return schedule;
}

LabelPermutation identity_permutation(int classes) {
    LabelPermutation p(static_cast<std::size_t>(classes));
    std::iota(p.begin(), p.end(), 0);
    return p;
}

bool is_involution(const LabelPermutation& perm) {
    for (std::size_t i = 0; i < perm.size(); ++i) {
        const int j = perm[i];
        if (j < 0 || static_cast<std::size_t>(j) >= perm.size() ||
            perm[static_cast<std::size_t>(j)] != static_cast<int>(i)) {
            return false;
        }
    }
    return true;
}

ClientView apply_drift(ClientView view, const DriftSchedule& schedule, std::size_t round) {
    const auto classes = static_cast<int>(view.permutation.size());
    LabelPermutation perm = identity_permutation(classes);
    for (const auto& ev : schedule.events) {
        if (ev.round > round) {
            break;
        }
        for (const auto& rule : ev.rules) {
            if (!rule.clients.matches(view.client_id)) {
                continue;
            }
            // perm <- swap o perm
            for (int& y : perm) {
                if (y == rule.class_a) {
                    y = rule.class_b;
                } else if (y == rule.class_b) {
                    y = rule.class_a;
                }
            }
        }
    }
    view.permutation = std::move(perm);
    return view;
}

std::vector<int> relabel(const std::vector<int>& labels, const LabelPermutation& perm) {
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out[i] = perm[static_cast<std::size_t>(labels[i])];
    }
    return out;
}

std::vector<int> view_labels(const ClientView& view, const LabeledDataset& dataset) {
    std::vector<int> out;
    out.reserve(view.indices.size());
    for (std::size_t i : view.indices) {
        out.push_back(view.permutation[static_cast<std::size_t>(dataset.labels[i])]);
    }
    return out;
}

std::vector<std::size_t> label_histogram(const ClientView& view, const LabeledDataset& dataset) {
    std::vector<std::size_t> hist(static_cast<std::size_t>(dataset.class_count), 0);
    for (int y : view_labels(view, dataset)) {
        ++hist[static_cast<std::size_t>(y)];
    }
    return hist;
}

FeatureBatch sample_balanced_batch(const ClientView& view, const LabeledDataset& dataset,
                                   std::size_t per_class, std::mt19937_64& rng) {
    const auto classes = static_cast<std::size_t>(dataset.class_count);
    std::vector<std::vector<std::size_t>> pool(classes);
    const auto labels = view_labels(view, dataset);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        pool[static_cast<std::size_t>(labels[i])].push_back(view.indices[i]);
    }
    std::vector<std::size_t> rows;
    std::vector<int> batch_labels;
    rows.reserve(classes * per_class);
    for (std::size_t c = 0; c < classes; ++c) {
        auto& p = pool[c];
        if (p.size() < per_class) {
            throw DataError("client " + std::to_string(view.client_id) + " holds " +
                            std::to_string(p.size()) + " samples of class " + std::to_string(c) +
                            ", balanced batch needs " + std::to_string(per_class));
        }
        // partial Fisher-Yates
        for (std::size_t i = 0; i < per_class; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, p.size() - 1);
            std::swap(p[i], p[pick(rng)]);
            rows.push_back(p[i]);
            batch_labels.push_back(static_cast<int>(c));
        }
    }
    return FeatureBatch{select_rows(dataset.inputs, rows), std::move(batch_labels)};
}

double label_entropy(const ClientView& view, const LabeledDataset& dataset) {
    if (view.indices.empty()) {
        throw DataError("label_entropy: client view is empty");
    }
    const auto hist = label_histogram(view, dataset);
    const auto n = static_cast<double>(view.indices.size());
    double h = 0.0;
    for (std::size_t count : hist) {
        if (count == 0) {
            continue;
        }
        const double p = static_cast<double>(count) / n;
        h -= p * std::log(p);
    }
    return std::max(h, 0.0);
}

LabeledDataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                        int class_count) {
    std::ifstream img(images, std::ios::binary);
    if (!img) {
        throw IoError("cannot open " + images.string());
    }
    std::ifstream lab(labels, std::ios::binary);
    if (!lab) {
        throw IoError("cannot open " + labels.string());
    }
    const std::string iname = images.string();
    const std::string lname = labels.string();
    if (read_be32(img, iname) != kIdxImages) {
        throw DataError("idx: bad image magic in " + iname);
    }
    const std::uint32_t n_images = read_be32(img, iname);
    const std::uint32_t rows = read_be32(img, iname);
    const std::uint32_t cols = read_be32(img, iname);
    if (read_be32(lab, lname) != kIdxLabels) {
        throw DataError("idx: bad label magic in " + lname);
    }
    const std::uint32_t n_labels = read_be32(lab, lname);
    if (n_images != n_labels) {
        throw DataError("idx: " + std::to_string(n_images) + " images but " +
                        std::to_string(n_labels) + " labels");
    }
    const std::size_t dim = std::size_t{rows} * cols;
    const auto pixels = read_payload(img, std::size_t{n_images} * dim, iname);
    const auto raw_labels = read_payload(lab, n_labels, lname);

    LabeledDataset ds;
    ds.inputs = Matrix(n_images, dim);
    auto values = ds.inputs.values();
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        values[i] = static_cast<double>(pixels[i]) / 255.0;
    }
    ds.labels.assign(raw_labels.begin(), raw_labels.end());
    int inferred = 0;
    for (int y : ds.labels) {
        inferred = std::max(inferred, y + 1);
    }
    ds.class_count = class_count > 0 ? class_count : inferred;
    ds.validate();
    return ds;
}

Vector synthetic_center(const SyntheticSpec& spec, int cls) {
    Vector u(spec.input_dim, 0.0);
    if (spec.input_dim >= static_cast<std::size_t>(spec.classes)) {
        u[static_cast<std::size_t>(cls)] = 1.0;
    } else {
        // fixed directions, independent of the sample seed
        std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(cls));
        std::normal_distribution<double> g(0.0, 1.0);
        for (double& x : u) {
            x = g(rng);
        }
        const double n = norm(u);
        for (double& x : u) {
            x /= n;
        }
    }
    for (double& x : u) {
        x *= spec.separation;
    }
    return u;
}

LabeledDataset make_synthetic(const SyntheticSpec& spec) {
    if (spec.classes < 2 || spec.per_class < 1 || spec.input_dim < 1) {
        throw ConfigError("synthetic data needs >= 2 classes, >= 1 sample per class, input_dim >= 1");
    }
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> g(0.0, 1.0);
    LabeledDataset ds;
    ds.class_count = spec.classes;
    ds.inputs = Matrix(static_cast<std::size_t>(spec.classes) * spec.per_class, spec.input_dim);
    ds.labels.reserve(ds.inputs.rows());
    std::size_t row = 0;
    for (int c = 0; c < spec.classes; ++c) {
        const Vector center = synthetic_center(spec, c);
        for (std::size_t i = 0; i < spec.per_class; ++i, ++row) {
            auto x = ds.inputs.row(row);
            for (std::size_t d = 0; d < spec.input_dim; ++d) {
                x[d] = center[d] + (spec.noise > 0.0 ? spec.noise * g(rng) : 0.0);
            }
            ds.labels.push_back(c);
        }
    }
    return ds;
}

}  // namespace fedccfa
