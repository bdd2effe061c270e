#include "fedccfa/federation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "fedccfa/error.hpp"

namespace fedccfa {
namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::size_t kSamplingStream = std::numeric_limits<std::size_t>::max();
constexpr std::size_t kInitStream = std::numeric_limits<std::size_t>::max() - 1;

// The client's whole training slice, labelled under its current concept.
FeatureBatch gather(const LabeledDataset& train, const ClientView& view) {
    return FeatureBatch{select_rows(train.inputs, view.indices), view_labels(view, train)};
}

FeatureBatch slice(const FeatureBatch& data, std::span<const std::size_t> rows) {
    FeatureBatch out{select_rows(data.inputs, rows), {}};
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) {
        out.labels.push_back(data.labels[r]);
    }
    return out;
}

bool usable(const AnchorSet& anchors, std::size_t classes, std::size_t hidden) {
    if (anchors.class_count() != classes || !anchors.complete()) {
        return false;
    }
    return std::all_of(anchors.anchors.begin(), anchors.anchors.end(), [hidden](const auto& a) {
        return a->size() == hidden && norm(*a) > 0.0;
    });
}

struct TrainSpec {
    std::size_t epochs = 1;
    double learning_rate = 0.0;
    UpdateMask mask;
    double align_weight = 0.0;
    const AnchorSet* anchors = nullptr;
};

void train_epochs(ModelParams& params, const FeatureBatch& data, const TrainSpec& spec,
                  const AlgorithmConfig& config, std::mt19937_64& rng) {
    if (spec.epochs == 0) {
        return;
    }
    OptimizerState opt =
        OptimizerState::for_params(params, spec.learning_rate, config.momentum, config.weight_decay);
    std::vector<std::size_t> order(data.labels.size());
    for (std::size_t e = 0; e < spec.epochs; ++e) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            const FeatureBatch mb =
                slice(data, std::span<const std::size_t>(order).subspan(start, end - start));
            LossAndGrad g = task_loss_grad(params, mb, spec.mask.extractor, spec.mask.classifier);
            if (spec.align_weight > 0.0 && spec.anchors != nullptr) {
                const LossAndGrad a =
                    alignment_loss_grad(params, mb, *spec.anchors, config.temperature);
                axpy(g.grads, spec.align_weight, a.grads);
            }
            sgd_step(params, g.grads, opt, spec.mask);
        }
    }
}

void set_class_row(ClassifierBlock& clf, std::size_t cls, const Vector& row) {
    auto dst = clf.weights.row(cls);
    std::copy(row.begin(), row.end() - 1, dst.begin());
    clf.bias[cls] = row.back();
}

Vector class_row(const ClassifierBlock& clf, std::size_t cls) {
    auto r = clf.weights.row(cls);
    Vector out(r.begin(), r.end());
    out.push_back(clf.bias[cls]);
    return out;
}

}  // namespace

bool AlgorithmConfig::clusters_classifiers() const {
    return variant == Variant::fedccfa || variant == Variant::decoupled_clustering;
}

bool AlgorithmConfig::aligns_features() const {
    return variant == Variant::fedccfa && anchors != AnchorMode::off;
}

bool AlgorithmConfig::personal_classifiers() const { return variant != Variant::fedavg; }

void AlgorithmConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) {
            throw ConfigError(what);
        }
    };
    require(gamma > 0.0, "gamma must be > 0");
    require(fixed_weight >= 0.0, "lambda must be >= 0");
    require(balanced_per_class >= 1, "per_class_batch must be >= 1");
    require(batch_size >= 1, "batch_size must be >= 1");
    require(lr_extractor >= 0.0 && lr_classifier >= 0.0 && lr_joint >= 0.0,
            "learning rates must be >= 0");
    require(momentum >= 0.0 && momentum < 1.0, "momentum must lie in [0, 1)");
    require(weight_decay >= 0.0, "weight_decay must be >= 0");
    require(eps > 0.0, "eps must be > 0");
    require(min_samples >= 1, "min_samples must be >= 1");
    require(temperature > 0.0, "tau must be > 0");
    require(participation > 0.0 && participation <= 1.0, "participation must lie in (0, 1]");
}

ModelParams compose(const ExtractorBlock& extractor, const ClassifierBlock& classifier) {
    ModelParams p{extractor.weights, extractor.bias, classifier.weights, classifier.bias};
    p.validate();
    return p;
}

ExtractorBlock extractor_of(const ModelParams& params) {
    return {params.extractor_weights, params.extractor_bias};
}

ClassifierBlock classifier_of(const ModelParams& params) {
    return {params.classifier_weights, params.classifier_bias};
}

double frobenius_distance(const ExtractorBlock& a, const ExtractorBlock& b) {
    if (!a.weights.same_shape(b.weights) || a.bias.size() != b.bias.size()) {
        throw ContractError("frobenius_distance: shape mismatch");
    }
    double s = 0.0;
    auto wa = a.weights.values();
    auto wb = b.weights.values();
    for (std::size_t i = 0; i < wa.size(); ++i) {
        s += (wa[i] - wb[i]) * (wa[i] - wb[i]);
    }
    for (std::size_t i = 0; i < a.bias.size(); ++i) {
        s += (a.bias[i] - b.bias[i]) * (a.bias[i] - b.bias[i]);
    }
    return std::sqrt(s);
}

std::mt19937_64 client_rng(std::uint64_t master_seed, std::size_t client_id, std::size_t round) {
    const std::uint64_t s = splitmix(splitmix(splitmix(master_seed) ^ client_id) ^ round);
    return std::mt19937_64(s);
}

double alignment_weight(const AlgorithmConfig& config, double entropy, std::size_t round) {
    if (!config.aligns_features() || round < config.alignment_start) {
        return 0.0;
    }
    return config.weight_mode == WeightMode::adaptive ? entropy / config.gamma
                                                      : config.fixed_weight;
}

AnchorSet local_anchors(const ModelParams& params, const FeatureBatch& data, std::size_t classes) {
    const Matrix features = forward_extractor(params, data.inputs);
    std::vector<Vector> sums(classes, Vector(params.hidden_dim(), 0.0));
    std::vector<std::size_t> counts(classes, 0);
    for (std::size_t b = 0; b < data.labels.size(); ++b) {
        const auto c = static_cast<std::size_t>(data.labels[b]);
        auto z = features.row(b);
        for (std::size_t h = 0; h < z.size(); ++h) {
            sums[c][h] += z[h];
        }
        ++counts[c];
    }
    AnchorSet out(classes);
    for (std::size_t c = 0; c < classes; ++c) {
        if (counts[c] == 0) {
            continue;
        }
        for (double& v : sums[c]) {
            v /= static_cast<double>(counts[c]);
        }
        out.anchors[c] = std::move(sums[c]);
    }
    return out;
}

ClientUpdate client_round(const ClientState& client, const ServerState& server,
                          const AlgorithmConfig& config, const LabeledDataset& train,
                          std::size_t round, std::uint64_t master_seed) {
    if (client.view.indices.empty()) {
        throw DataError("client " + std::to_string(client.client_id) + " holds no data");
    }
    auto rng = client_rng(master_seed, client.client_id, round);
    const auto classes = static_cast<std::size_t>(train.class_count);
    const FeatureBatch local = gather(train, client.view);

    ClientUpdate up;
    up.client_id = client.client_id;
    up.sample_count = local.labels.size();
    up.class_counts = label_histogram(client.view, train);
    up.entropy = label_entropy(client.view, train);

    if (config.variant == Variant::fedavg) {
        ModelParams params = compose(server.extractor, server.global_classifier);
        train_epochs(params, local, {config.local_epochs, config.lr_joint, {true, true}}, config, rng);
        up.extractor = extractor_of(params);
        up.classifier = classifier_of(params);
        return up;
    }

    if (config.clusters_classifiers() && config.clustering_input == ClusteringInput::balanced) {
        ModelParams bal = compose(server.extractor, server.initial_classifier);
        const FeatureBatch batch =
            sample_balanced_batch(client.view, train, config.balanced_per_class, rng);
        OptimizerState opt = OptimizerState::for_params(bal, config.lr_classifier,
                                                        config.momentum, config.weight_decay);
        for (std::size_t i = 0; i < config.balanced_steps; ++i) {
            const LossAndGrad g = task_loss_grad(bal, batch, false, true);
            sgd_step(bal, g.grads, opt, {false, true});
        }
        up.balanced = classifier_of(bal);
    }

    ModelParams params =
        compose(server.extractor, client.classifier.value_or(server.initial_classifier));
    train_epochs(params, local, {1, config.lr_classifier, {false, true}}, config, rng);

    const AnchorSet* anchors = nullptr;
    if (config.aligns_features()) {
        anchors = config.anchors == AnchorMode::global ? &server.global_anchors : &client.anchors;
        if (!usable(*anchors, classes, params.hidden_dim())) {
            anchors = nullptr;
        }
    }
    up.alignment_weight = anchors ? alignment_weight(config, up.entropy, round) : 0.0;
    train_epochs(params, local,
                 {config.local_epochs, config.lr_extractor, {true, false}, up.alignment_weight, anchors},
                 config, rng);

    up.extractor = extractor_of(params);
    up.classifier = classifier_of(params);
    if (config.aligns_features()) {
        up.local_anchors = local_anchors(params, local, classes);
    }
    return up;
}

ExtractorBlock aggregate_extractors(const std::vector<ClientUpdate>& updates) {
    if (updates.empty()) {
        throw ContractError("aggregate_extractors: no updates");
    }
    std::vector<const ClientUpdate*> order;
    for (const auto& u : updates) {
        order.push_back(&u);
    }
    std::sort(order.begin(), order.end(),
              [](auto* a, auto* b) { return a->client_id < b->client_id; });
    double total = 0.0;
    for (auto* u : order) {
        total += static_cast<double>(u->sample_count);
    }
    if (!(total > 0.0)) {
        throw ContractError("aggregate_extractors: total sample count is zero");
    }
    // Averaging offsets from the first extractor keeps the mean of identical
    // extractors exactly equal to them.
    const ExtractorBlock& ref = order.front()->extractor;
    ExtractorBlock delta{Matrix(ref.weights.rows(), ref.weights.cols()),
                         Vector(ref.bias.size(), 0.0)};
    for (auto* u : order) {
        const double w = static_cast<double>(u->sample_count) / total;
        auto dst = delta.weights.values();
        auto src = u->extractor.weights.values();
        auto base = ref.weights.values();
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] += w * (src[i] - base[i]);
        }
        for (std::size_t i = 0; i < delta.bias.size(); ++i) {
            delta.bias[i] += w * (u->extractor.bias[i] - ref.bias[i]);
        }
    }
    ExtractorBlock out = ref;
    auto dst = out.weights.values();
    auto add = delta.weights.values();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] += add[i];
    }
    for (std::size_t i = 0; i < out.bias.size(); ++i) {
        out.bias[i] += delta.bias[i];
    }
    return out;
}

ClassifierBlock aggregate_global_classifier(const std::vector<ClientUpdate>& updates) {
    if (updates.empty()) {
        throw ContractError("aggregate_global_classifier: no updates");
    }
    // reuse the extractor reduction on the classifier blocks
    std::vector<ClientUpdate> shadow;
    shadow.reserve(updates.size());
    for (const auto& u : updates) {
        ClientUpdate s;
        s.client_id = u.client_id;
        s.sample_count = u.sample_count;
        s.extractor = {u.classifier.weights, u.classifier.bias};
        shadow.push_back(std::move(s));
    }
    ExtractorBlock e = aggregate_extractors(shadow);
    return {std::move(e.weights), std::move(e.bias)};
}

ClusteredClassifiers aggregate_classifiers(const std::vector<ClientUpdate>& updates,
                                           const ClusterAssignment& assignment,
                                           AggregationMode mode) {
    std::map<std::size_t, const ClientUpdate*> by_id;
    for (const auto& u : updates) {
        by_id[u.client_id] = &u;
    }
    ClusteredClassifiers out(assignment.per_class.size());
    for (std::size_t c = 0; c < assignment.per_class.size(); ++c) {
        for (const auto& block : assignment.per_class[c]) {
            if (block.empty()) {
                throw ContractError("aggregate_classifiers: empty cluster");
            }
            std::vector<double> weights;
            for (std::size_t id : block) {
                auto it = by_id.find(id);
                if (it == by_id.end()) {
                    throw ContractError("aggregate_classifiers: no update for client " +
                                        std::to_string(id));
                }
                weights.push_back(mode == AggregationMode::weighted
                                      ? static_cast<double>(it->second->class_counts.at(c))
                                      : 1.0);
            }
            double total = std::accumulate(weights.begin(), weights.end(), 0.0);
            if (!(total > 0.0)) {
                std::fill(weights.begin(), weights.end(), 1.0);
                total = static_cast<double>(weights.size());
            }
            const Vector ref = class_row(by_id[block.front()]->classifier, c);
            Vector delta(ref.size(), 0.0);
            for (std::size_t i = 0; i < block.size(); ++i) {
                const Vector row = class_row(by_id[block[i]]->classifier, c);
                for (std::size_t h = 0; h < row.size(); ++h) {
                    delta[h] += weights[i] * (row[h] - ref[h]);
                }
            }
            Vector mean = ref;
            for (std::size_t h = 0; h < mean.size(); ++h) {
                mean[h] += delta[h] / total;
            }
            out[c].push_back(std::move(mean));
        }
    }
    return out;
}

ClusteredAnchors aggregate_anchors(const std::vector<ClientUpdate>& updates,
                                   const ClusterAssignment& assignment) {
    std::map<std::size_t, const ClientUpdate*> by_id;
    for (const auto& u : updates) {
        by_id[u.client_id] = &u;
    }
    ClusteredAnchors out(assignment.per_class.size());
    for (std::size_t c = 0; c < assignment.per_class.size(); ++c) {
        for (const auto& block : assignment.per_class[c]) {
            Vector sum;
            std::size_t present = 0;
            for (std::size_t id : block) {
                auto it = by_id.find(id);
                if (it == by_id.end()) {
                    throw ContractError("aggregate_anchors: no update for client " +
                                        std::to_string(id));
                }
                const auto& anchors = it->second->local_anchors.anchors;
                if (c >= anchors.size() || !anchors[c]) {
                    continue;
                }
                if (sum.empty()) {
                    sum.assign(anchors[c]->size(), 0.0);
                }
                for (std::size_t h = 0; h < sum.size(); ++h) {
                    sum[h] += (*anchors[c])[h];
                }
                ++present;
            }
            if (present == 0) {
                out[c].emplace_back(std::nullopt);
                continue;
            }
            for (double& v : sum) {
                v /= static_cast<double>(present);
            }
            out[c].emplace_back(std::move(sum));
        }
    }
    return out;
}

ClusterAssignment oracle_assignment(const std::vector<const ClientState*>& clients,
                                    std::size_t classes) {
    ClusterAssignment out;
    for (auto* c : clients) {
        out.client_ids.push_back(c->client_id);
    }
    std::sort(out.client_ids.begin(), out.client_ids.end());
    for (std::size_t cls = 0; cls < classes; ++cls) {
        std::map<int, std::vector<std::size_t>> groups;
        for (auto* c : clients) {
            groups[c->view.permutation.at(cls)].push_back(c->client_id);
        }
        Partition p;
        for (auto& [key, members] : groups) {
            p.push_back(std::move(members));
        }
        out.per_class.push_back(canonical(std::move(p)));
    }
    return out;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

Simulation::Simulation(SimulationSetup setup) : setup_(std::move(setup)) {
    setup_.train.validate();
    setup_.test.validate();
    setup_.algorithm.validate();
    if (setup_.train.class_count != setup_.test.class_count ||
        setup_.train.input_dim() != setup_.test.input_dim()) {
        throw ConfigError("train and test sets disagree on classes or input width");
    }
    if (setup_.partition.empty()) {
        throw ConfigError("simulation needs at least one client");
    }
    if (setup_.hidden_dim < 1) {
        throw ConfigError("hidden_dim must be >= 1");
    }
    setup_.schedule.validate(setup_.total_rounds, setup_.train.class_count);

    const auto classes = static_cast<std::size_t>(setup_.train.class_count);
    auto rng = client_rng(setup_.seed, kInitStream, 0);
    const ModelParams init =
        ModelParams::random(setup_.train.input_dim(), setup_.hidden_dim, classes, rng);
    server_.extractor = extractor_of(init);
    server_.initial_classifier = classifier_of(init);
    server_.global_classifier = server_.initial_classifier;
    server_.global_anchors = AnchorSet(classes);

    for (std::size_t k = 0; k < setup_.partition.size(); ++k) {
        ClientState c;
        c.client_id = k;
        c.view = ClientView{k, setup_.partition[k], identity_permutation(setup_.train.class_count)};
        c.anchors = AnchorSet(classes);
        clients_.push_back(std::move(c));
    }
}

std::vector<std::size_t> Simulation::sample_clients(std::size_t round) const {
    const std::size_t k = clients_.size();
    const double want = std::ceil(setup_.algorithm.participation * static_cast<double>(k) - 1e-9);
    const std::size_t n = std::clamp<std::size_t>(static_cast<std::size_t>(want), 1, k);
    std::vector<std::size_t> ids(k);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    if (n < k) {
        auto rng = client_rng(setup_.seed, kSamplingStream, round);
        for (std::size_t i = 0; i < n; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, k - 1);
            std::swap(ids[i], ids[pick(rng)]);
        }
        ids.resize(n);
        std::sort(ids.begin(), ids.end());
    }
    return ids;
}

RoundMetrics Simulation::step(bool evaluate_after) {
    const std::size_t t = server_.round;
    const AlgorithmConfig& cfg = setup_.algorithm;
    const auto classes = static_cast<std::size_t>(setup_.train.class_count);

    for (auto& c : clients_) {
        c.view = apply_drift(std::move(c.view), setup_.schedule, t);
        if (!is_involution(c.view.permutation)) {
            throw InvariantError("label permutation of client " + std::to_string(c.client_id) +
                                 " is not an involution");
        }
    }

    RoundMetrics m;
    m.round = t;
    m.selected = sample_clients(t);

    std::vector<ClientUpdate> updates(m.selected.size());
    parallel_for(updates.size(), setup_.workers, [&](std::size_t i) {
        updates[i] = client_round(clients_[m.selected[i]], server_, cfg, setup_.train, t, setup_.seed);
    });

    const ExtractorBlock previous = server_.extractor;
    server_.extractor = aggregate_extractors(updates);
    m.extractor_delta_norm = frobenius_distance(server_.extractor, previous);

    if (cfg.variant == Variant::fedavg) {
        server_.global_classifier = aggregate_global_classifier(updates);
    } else {
        for (const auto& u : updates) {
            clients_[u.client_id].classifier = u.classifier;
        }
    }

    if (cfg.clusters_classifiers()) {
        std::vector<const ClientState*> members;
        for (std::size_t id : m.selected) {
            members.push_back(&clients_[id]);
        }
        const ClusterAssignment oracle = oracle_assignment(members, classes);
        ClusterAssignment assignment;
        if (cfg.clustering_input == ClusteringInput::oracle) {
            assignment = oracle;
        } else {
            ClassClassifierSet set;
            for (const auto& u : updates) {
                const ClassifierBlock& clf =
                    cfg.clustering_input == ClusteringInput::balanced ? *u.balanced : u.classifier;
                set.add(u.client_id, clf.weights, clf.bias);
            }
            ClusteringResult result = cluster_all_classes(set, cfg.eps, cfg.min_samples);
            m.distance_fallback = !result.matrices.empty() && result.matrices.front().fallback;
            if (on_distances) {
                on_distances(t, result.matrices);
            }
            assignment = std::move(result.assignment);
        }

        const ClusteredClassifiers merged = aggregate_classifiers(updates, assignment, cfg.aggregation);
        for (std::size_t c = 0; c < classes; ++c) {
            const Partition& p = assignment.per_class[c];
            for (std::size_t b = 0; b < p.size(); ++b) {
                for (std::size_t id : p[b]) {
                    set_class_row(*clients_[id].classifier, c, merged[c][b]);
                }
            }
        }

        if (cfg.aligns_features() && cfg.anchors == AnchorMode::clustered) {
            const ClusteredAnchors anchors = aggregate_anchors(updates, assignment);
            for (std::size_t c = 0; c < classes; ++c) {
                const Partition& p = assignment.per_class[c];
                for (std::size_t b = 0; b < p.size(); ++b) {
                    for (std::size_t id : p[b]) {
                        clients_[id].anchors.anchors[c] = anchors[c][b];
                    }
                }
            }
        }

        m.clustered = true;
        double ri_sum = 0.0;
        for (std::size_t c = 0; c < classes; ++c) {
            m.cluster_counts.push_back(assignment.per_class[c].size());
            m.class_rand_index.push_back(rand_index(assignment.per_class[c], oracle.per_class[c]));
            ri_sum += m.class_rand_index.back();
        }
        m.rand_index = ri_sum / static_cast<double>(classes);
    }

    if (cfg.aligns_features() && cfg.anchors == AnchorMode::global) {
        ClusterAssignment everyone;
        everyone.client_ids = m.selected;
        everyone.per_class.assign(classes, Partition{m.selected});
        const ClusteredAnchors anchors = aggregate_anchors(updates, everyone);
        for (std::size_t c = 0; c < classes; ++c) {
            server_.global_anchors.anchors[c] = anchors[c][0];
        }
    }

    for (const auto& u : updates) {
        m.alignment_weights.push_back(u.alignment_weight);
        m.entropies.push_back(u.entropy);
    }
    m.mean_alignment_weight =
        std::accumulate(m.alignment_weights.begin(), m.alignment_weights.end(), 0.0) /
        static_cast<double>(m.alignment_weights.size());

    ++server_.round;

    if (evaluate_after) {
        m.evaluated = true;
        m.client_accuracy = evaluate();
        m.mean_accuracy =
            std::accumulate(m.client_accuracy.begin(), m.client_accuracy.end(), 0.0) /
            static_cast<double>(m.client_accuracy.size());
    }
    return m;
}

std::vector<double> Simulation::evaluate() const {
    const LabeledDataset& test = setup_.test;
    const ModelParams shared = compose(server_.extractor, server_.initial_classifier);
    const Matrix features = forward_extractor(shared, test.inputs);
    std::vector<double> acc;
    acc.reserve(clients_.size());
    for (const auto& c : clients_) {
        const ClassifierBlock& clf = setup_.algorithm.variant == Variant::fedavg
                                         ? server_.global_classifier
                                         : c.classifier.value_or(server_.initial_classifier);
        const Matrix logits = matmul_transposed(features, clf.weights, clf.bias);
        const auto truth = relabel(test.labels, c.view.permutation);
        std::size_t correct = 0;
        for (std::size_t b = 0; b < logits.rows(); ++b) {
            auto row = logits.row(b);
            const auto pred = std::max_element(row.begin(), row.end()) - row.begin();
            correct += pred == truth[b] ? 1 : 0;
        }
        acc.push_back(static_cast<double>(correct) / static_cast<double>(logits.rows()));
    }
    return acc;
}

}  // namespace fedccfa
