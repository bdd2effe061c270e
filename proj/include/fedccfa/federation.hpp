#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "fedccfa/clustering.hpp"
#include "fedccfa/data.hpp"
#include "fedccfa/model.hpp"

namespace fedccfa {

enum class Variant { fedccfa, fedavg, decoupled, decoupled_clustering };
enum class ClusteringInput { balanced, local, oracle };
enum class AnchorMode { clustered, global, off };
enum class WeightMode { adaptive, fixed };
enum class AggregationMode { uniform, weighted };

struct AlgorithmConfig {
    Variant variant = Variant::fedccfa;
    ClusteringInput clustering_input = ClusteringInput::balanced;
    AnchorMode anchors = AnchorMode::clustered;
    WeightMode weight_mode = WeightMode::adaptive;
    double gamma = 20.0;         // adaptive weight = entropy / gamma
    double fixed_weight = 1.0;   // lambda for WeightMode::fixed
    AggregationMode aggregation = AggregationMode::uniform;
    std::size_t alignment_start = 20;  // T_s
    std::size_t local_epochs = 5;      // E
    std::size_t balanced_steps = 5;    // s
    std::size_t balanced_per_class = 5;
    std::size_t batch_size = 64;
    double lr_extractor = 0.01;
    double lr_classifier = 0.1;
    double lr_joint = 0.01;  // whole-model learning rate for fedavg
    double momentum = 0.9;
    double weight_decay = 1e-5;
    double eps = 0.1;
    std::size_t min_samples = 1;
    double temperature = 0.5;
    double participation = 1.0;

    bool clusters_classifiers() const;
    bool aligns_features() const;
    bool personal_classifiers() const;

    // Throws ConfigError on out-of-range values.
    void validate() const;

    friend bool operator==(const AlgorithmConfig&, const AlgorithmConfig&) = default;
};

struct ExtractorBlock {
    Matrix weights;
    Vector bias;
    friend bool operator==(const ExtractorBlock&, const ExtractorBlock&) = default;
};

struct ClassifierBlock {
    Matrix weights;
    Vector bias;
    friend bool operator==(const ClassifierBlock&, const ClassifierBlock&) = default;
};

ModelParams compose(const ExtractorBlock& extractor, const ClassifierBlock& classifier);
ExtractorBlock extractor_of(const ModelParams& params);
ClassifierBlock classifier_of(const ModelParams& params);

// Frobenius norm of (a - b) over weights and bias together.
double frobenius_distance(const ExtractorBlock& a, const ExtractorBlock& b);

struct ClientState {
    std::size_t client_id = 0;
    ClientView view;
    std::optional<ClassifierBlock> classifier;  // absent until first selected
    AnchorSet anchors;                          // last anchors received from the server
};

struct ServerState {
    ExtractorBlock extractor;
    ClassifierBlock initial_classifier;  // phi^(0), frozen
    ClassifierBlock global_classifier;   // fedavg only
    AnchorSet global_anchors;            // AnchorMode::global only
    std::size_t round = 0;
};

struct ClientUpdate {
    std::size_t client_id = 0;
    ExtractorBlock extractor;
    ClassifierBlock classifier;
    std::optional<ClassifierBlock> balanced;
    AnchorSet local_anchors;
    std::size_t sample_count = 0;
    std::vector<std::size_t> class_counts;
    double entropy = 0.0;
    double alignment_weight = 0.0;
};

/// Deterministic per-(seed, client, round) generator. Worker scheduling can
/// never change what a client draws.
std::mt19937_64 client_rng(std::uint64_t master_seed, std::size_t client_id, std::size_t round);

/// Alignment coefficient a client uses at `round`: 0 before alignment_start
/// or when alignment is disabled, entropy/gamma in adaptive mode, lambda in
/// fixed mode.
double alignment_weight(const AlgorithmConfig& config, double entropy, std::size_t round);

/// Per-class mean feature under the given extractor; a class with no
/// samples gets an absent anchor.
AnchorSet local_anchors(const ModelParams& params, const FeatureBatch& data, std::size_t classes);

/// One client's local work for a round.
///   fedccfa / decoupled_clustering: balanced classifier from phi^(0) for s
///     steps, then 1 epoch of the personal classifier, then E epochs of the
///     extractor on task + weight * alignment loss, then local anchors.
///   decoupled: personal classifier epoch, then extractor epochs.
///   fedavg: E epochs on the whole model.
ClientUpdate client_round(const ClientState& client, const ServerState& server,
                          const AlgorithmConfig& config, const LabeledDataset& train,
                          std::size_t round, std::uint64_t master_seed);

/// Sample-count weighted mean of extractors, summed in ascending client id.
ExtractorBlock aggregate_extractors(const std::vector<ClientUpdate>& updates);
ClassifierBlock aggregate_global_classifier(const std::vector<ClientUpdate>& updates);

// Cluster means of class classifier rows, indexed [class][block].
using ClusteredClassifiers = std::vector<std::vector<Vector>>;
// Cluster anchors, indexed [class][block]; absent if no member had the class.
using ClusteredAnchors = std::vector<std::vector<std::optional<Vector>>>;

ClusteredClassifiers aggregate_classifiers(const std::vector<ClientUpdate>& updates,
                                           const ClusterAssignment& assignment,
                                           AggregationMode mode);
ClusteredAnchors aggregate_anchors(const std::vector<ClientUpdate>& updates,
                                   const ClusterAssignment& assignment);

/// Ground-truth concept groups: for class c, clients with the same
/// permutation image of c share a block.
ClusterAssignment oracle_assignment(const std::vector<const ClientState*>& clients,
                                    std::size_t classes);

struct RoundMetrics {
    std::size_t round = 0;
    std::vector<std::size_t> selected;
    double extractor_delta_norm = 0.0;
    bool clustered = false;
    bool distance_fallback = false;
    std::vector<std::size_t> cluster_counts;    // per class, when clustered
    std::vector<double> class_rand_index;       // per class, when clustered
    std::optional<double> rand_index;           // mean over classes
    std::vector<double> alignment_weights;      // per selected client
    std::vector<double> entropies;              // per selected client
    double mean_alignment_weight = 0.0;
    bool evaluated = false;
    std::vector<double> client_accuracy;        // all clients
    double mean_accuracy = 0.0;
};

struct SimulationSetup {
    LabeledDataset train;
    LabeledDataset test;
    std::vector<std::vector<std::size_t>> partition;  // train indices per client
    DriftSchedule schedule;
    AlgorithmConfig algorithm;
    std::size_t hidden_dim = 32;
    std::size_t total_rounds = 200;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

/// Owns server and client state and advances one communication round at a
/// time. Client work inside a round may run on several threads; all
/// reductions happen afterwards in ascending client order, so results do not
/// depend on the worker count.
class Simulation {
public:
    explicit Simulation(SimulationSetup setup);

    // Runs round `round()` and advances the counter.
    RoundMetrics step(bool evaluate_after = true);

    // Generalized accuracy of every client on the whole test set.
    std::vector<double> evaluate() const;

    std::size_t round() const { return server_.round; }
    const ServerState& server() const { return server_; }
    const std::vector<ClientState>& clients() const { return clients_; }
    const SimulationSetup& setup() const { return setup_; }

    // Called with every round's per-class distance matrices.
    std::function<void(std::size_t round, const std::vector<DistanceMatrix>&)> on_distances;

private:
    std::vector<std::size_t> sample_clients(std::size_t round) const;

    SimulationSetup setup_;
    ServerState server_;
    std::vector<ClientState> clients_;
};

// Calls fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace fedccfa
