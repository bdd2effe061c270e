#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "fedccfa/matrix.hpp"

namespace fedccfa {

/// Parameters of the one-hidden-layer ReLU perceptron. The hidden layer is
/// the feature extractor; the output layer is the linear classifier whose
/// row c (plus bias entry c) is the class classifier for class c.
struct ModelParams {
    Matrix extractor_weights;   // hidden_dim x input_dim
    Vector extractor_bias;      // hidden_dim
    Matrix classifier_weights;  // C x hidden_dim
    Vector classifier_bias;     // C

    static ModelParams zeros(std::size_t input_dim, std::size_t hidden_dim, std::size_t classes);

    // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every block.
    static ModelParams random(std::size_t input_dim, std::size_t hidden_dim, std::size_t classes,
                              std::mt19937_64& rng);

    std::size_t input_dim() const { return extractor_weights.cols(); }
    std::size_t hidden_dim() const { return extractor_weights.rows(); }
    std::size_t class_count() const { return classifier_weights.rows(); }

    bool same_shape(const ModelParams& other) const;
    bool all_finite() const;

    // Throws ContractError unless the four blocks agree with each other.
    void validate() const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Inputs with class labels in [0, C). Features are derived with
/// forward_extractor when needed.
struct FeatureBatch {
    Matrix inputs;
    std::vector<int> labels;
};

/// One optional anchor per class. An anchor is absent when no sample of that
/// class was available to compute it.
struct AnchorSet {
    std::vector<std::optional<Vector>> anchors;

    AnchorSet() = default;
    explicit AnchorSet(std::size_t classes) : anchors(classes) {}

    std::size_t class_count() const { return anchors.size(); }
    bool complete() const;

    friend bool operator==(const AnchorSet&, const AnchorSet&) = default;
};

struct LossAndGrad {
    double loss = 0.0;
    ModelParams grads;
};

struct UpdateMask {
    bool extractor = true;
    bool classifier = true;
};

struct OptimizerState {
    ModelParams velocity;
    double momentum = 0.9;
    double weight_decay = 1e-5;
    double learning_rate = 0.01;

    static OptimizerState for_params(const ModelParams& params, double learning_rate,
                                     double momentum, double weight_decay);
};

inline constexpr double kCosineFloor = 1e-12;

// u.v / max(|u||v|, kCosineFloor)
double cosine_similarity(std::span<const double> u, std::span<const double> v);

Matrix forward_extractor(const ModelParams& params, const Matrix& inputs);
Matrix forward_classifier(const ModelParams& params, const Matrix& features);

/// Mean softmax cross-entropy over the batch. Gradients of a frozen block are
/// exactly zero. Throws ContractError when both flags are false.
LossAndGrad task_loss_grad(const ModelParams& params, const FeatureBatch& batch,
                           bool train_extractor, bool train_classifier);

/// Mean contrastive anchor loss: for a sample with label c,
///   -log( exp(sim(z, A_c)/tau) / sum_i exp(sim(z, A_i)/tau) ),
/// with sim the cosine similarity and z the extracted feature. Anchors are
/// constants, so only the extractor blocks of `grads` are populated.
LossAndGrad alignment_loss_grad(const ModelParams& params, const FeatureBatch& batch,
                                const AnchorSet& anchors, double temperature);

/// v <- momentum*v + (g + weight_decay*p); p <- p - lr*v, for masked blocks.
/// Throws InvariantError if an updated parameter is not finite.
void sgd_step(ModelParams& params, const ModelParams& grads, OptimizerState& state,
              UpdateMask mask);

// params += scale * other, block-wise.
void axpy(ModelParams& params, double scale, const ModelParams& other);

std::vector<int> predict(const ModelParams& params, const Matrix& inputs);

}  // namespace fedccfa
