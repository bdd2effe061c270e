#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "fedccfa/matrix.hpp"
#include "fedccfa/model.hpp"

namespace fedccfa {

struct LabeledDataset {
    Matrix inputs;            // N x input_dim
    std::vector<int> labels;  // N, each in [0, class_count)
    int class_count = 0;

    std::size_t size() const { return labels.size(); }
    std::size_t input_dim() const { return inputs.cols(); }

    // Throws DataError on an empty set, a row/label mismatch or an out-of-range label.
    void validate() const;

    friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

struct PartitionSpec {
    std::size_t client_count = 20;
    double alpha = 0.5;
    std::size_t min_per_class = 5;
    std::uint64_t seed = 0;
};

/// Label-skewed split: the instances of every class are shared out according
/// to a Dir_K(alpha) draw, then a repair pass moves samples from the richest
/// holder of a class until each client owns at least min_per_class of it.
/// Returns one ascending index list per client; the lists are disjoint and
/// cover the dataset.
std::vector<std::vector<std::size_t>> dirichlet_partition(const LabeledDataset& dataset,
                                                          const PartitionSpec& spec);

// Clients with lo <= id % modulus <= hi.
struct ResidueRange {
    int modulus = 10;
    int lo = 0;
    int hi = 0;

    bool matches(std::size_t client_id) const;
    friend bool operator==(const ResidueRange&, const ResidueRange&) = default;
};

struct SwapRule {
    int class_a = 0;
    int class_b = 1;
    ResidueRange clients;

    friend bool operator==(const SwapRule&, const SwapRule&) = default;
};

// Pairs (1,2) for id%10 < 3, (3,4) for 3 <= id%10 <= 5, (5,6) for id%10 > 5.
std::vector<SwapRule> standard_swap_rules();

enum class DriftPattern { none, sudden, incremental, reoccurring };

struct DriftEvent {
    std::size_t round = 0;
    std::vector<SwapRule> rules;

    friend bool operator==(const DriftEvent&, const DriftEvent&) = default;
};

struct DriftSchedule {
    DriftPattern pattern = DriftPattern::none;
    std::vector<DriftEvent> events;

    // Rounds strictly increasing and below total_rounds; class ids below
    // `classes`; any two swap pairs are identical or disjoint.
    void validate(std::size_t total_rounds, int classes) const;
};

/// Places the events on a horizon of `total_rounds`. The first event sits at
/// floor(drift_fraction * T); later events keep their relative offsets of
/// 1.1x, 1.2x (incremental) and 1.5x (reoccurring) of that position, so the
/// default fraction 0.5 reproduces rounds 100/110/120/150 of a 200-round run.
/// Events that land on the same round are merged; events at or beyond T are
/// dropped.
DriftSchedule build_drift_schedule(DriftPattern pattern, std::size_t total_rounds,
                                   double drift_fraction = 0.5,
                                   const std::vector<SwapRule>& rules = standard_swap_rules());

using LabelPermutation = std::vector<int>;

LabelPermutation identity_permutation(int classes);
bool is_involution(const LabelPermutation& perm);

/// A client's slice of the training set together with the label permutation
/// its concept applies. The same permutation relabels the client's test view.
struct ClientView {
    std::size_t client_id = 0;
    std::vector<std::size_t> indices;
    LabelPermutation permutation;
};

/// Recomputes the active permutation at round t by composing, from identity,
/// every swap of every event at or before t whose predicate matches the client.
ClientView apply_drift(ClientView view, const DriftSchedule& schedule, std::size_t round);

std::vector<int> relabel(const std::vector<int>& labels, const LabelPermutation& perm);

// Labels of the view's samples under its current permutation.
std::vector<int> view_labels(const ClientView& view, const LabeledDataset& dataset);
std::vector<std::size_t> label_histogram(const ClientView& view, const LabeledDataset& dataset);

/// Exactly per_class samples of every class (current labels), drawn without
/// replacement. Throws DataError if some class has fewer samples.
FeatureBatch sample_balanced_batch(const ClientView& view, const LabeledDataset& dataset,
                                   std::size_t per_class, std::mt19937_64& rng);

/// Natural-log entropy of the view's empirical label distribution.
double label_entropy(const ClientView& view, const LabeledDataset& dataset);

/// Reads an IDX image file (magic 0x00000803, N x rows x cols bytes) and an
/// IDX label file (magic 0x00000801). Pixels are scaled to [0, 1]. With
/// class_count == 0 the count is inferred as max label + 1.
LabeledDataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                        int class_count = 0);

struct SyntheticSpec {
    int classes = 10;
    std::size_t input_dim = 20;
    std::size_t per_class = 100;
    double separation = 4.0;
    double noise = 1.0;
    std::uint64_t seed = 0;
};

/// Isotropic Gaussian blobs centred at separation * u_c. The unit directions
/// u_c depend only on (classes, input_dim), so train and test sets drawn with
/// different seeds share their class centres.
LabeledDataset make_synthetic(const SyntheticSpec& spec);

Vector synthetic_center(const SyntheticSpec& spec, int cls);

}  // namespace fedccfa
