#include "fedccfa/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedccfa/error.hpp"

namespace fedccfa {
namespace {

bool finite(std::span<const double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

void fill_uniform(std::span<double> xs, double bound, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& x : xs) {
        x = dist(rng);
    }
}

void check_batch(const ModelParams& params, const FeatureBatch& batch) {
    if (batch.labels.empty() || batch.inputs.rows() != batch.labels.size()) {
        throw ContractError("batch: need at least one sample and one label per input row");
    }
    if (batch.inputs.cols() != params.input_dim()) {
        throw ContractError("batch: input width " + std::to_string(batch.inputs.cols()) +
                            " != input_dim " + std::to_string(params.input_dim()));
    }
    const auto classes = static_cast<int>(params.class_count());
    for (int y : batch.labels) {
        if (y < 0 || y >= classes) {
            throw ContractError("batch: label " + std::to_string(y) + " out of range");
        }
    }
}

// Backpropagates d(loss)/d(features) through the ReLU into the extractor.
void extractor_backward(const Matrix& inputs, const Matrix& preact, const Matrix& dfeatures,
                        ModelParams& grads) {
    const std::size_t hidden = preact.cols();
    for (std::size_t b = 0; b < preact.rows(); ++b) {
        auto x = inputs.row(b);
        for (std::size_t h = 0; h < hidden; ++h) {
            if (preact(b, h) <= 0.0) {
                continue;
            }
            const double d = dfeatures(b, h);
            if (d == 0.0) {
                continue;
            }
            grads.extractor_bias[h] += d;
            auto gw = grads.extractor_weights.row(h);
            for (std::size_t i = 0; i < x.size(); ++i) {
                gw[i] += d * x[i];
            }
        }
    }
}

Matrix relu(Matrix m) {
    for (double& v : m.values()) {
        v = v > 0.0 ? v : 0.0;
    }
    return m;
}

template <typename F>
void for_blocks(ModelParams& p, const ModelParams& q, UpdateMask mask, F&& f) {
    if (mask.extractor) {
        f(p.extractor_weights.values(), q.extractor_weights.values());
        f(std::span<double>(p.extractor_bias), std::span<const double>(q.extractor_bias));
    }
    if (mask.classifier) {
        f(p.classifier_weights.values(), q.classifier_weights.values());
        f(std::span<double>(p.classifier_bias), std::span<const double>(q.classifier_bias));
    }
}

}  // namespace

ModelParams ModelParams::zeros(std::size_t input_dim, std::size_t hidden_dim, std::size_t classes) {
    return ModelParams{Matrix(hidden_dim, input_dim), Vector(hidden_dim, 0.0),
                       Matrix(classes, hidden_dim), Vector(classes, 0.0)};
}

ModelParams ModelParams::random(std::size_t input_dim, std::size_t hidden_dim,
                                std::size_t classes, std::mt19937_64& rng) {
    ModelParams p = zeros(input_dim, hidden_dim, classes);
    const double b1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
    const double b2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    fill_uniform(p.extractor_weights.values(), b1, rng);
    fill_uniform(p.extractor_bias, b1, rng);
    fill_uniform(p.classifier_weights.values(), b2, rng);
    fill_uniform(p.classifier_bias, b2, rng);
    return p;
}

bool ModelParams::same_shape(const ModelParams& other) const {
    return extractor_weights.same_shape(other.extractor_weights) &&
           extractor_bias.size() == other.extractor_bias.size() &&
           classifier_weights.same_shape(other.classifier_weights) &&
           classifier_bias.size() == other.classifier_bias.size();
}

bool ModelParams::all_finite() const {
    return finite(extractor_weights.values()) && finite(extractor_bias) &&
           finite(classifier_weights.values()) && finite(classifier_bias);
}

void ModelParams::validate() const {
    if (extractor_bias.size() != extractor_weights.rows() ||
        classifier_weights.cols() != extractor_weights.rows() ||
        classifier_bias.size() != classifier_weights.rows()) {
        throw ContractError("model parameters have inconsistent block shapes");
    }
}

bool AnchorSet::complete() const {
    return std::all_of(anchors.begin(), anchors.end(), [](const auto& a) { return a.has_value(); });
}

OptimizerState OptimizerState::for_params(const ModelParams& params, double learning_rate,
                                          double momentum, double weight_decay) {
    ModelParams velocity =
        ModelParams::zeros(params.input_dim(), params.hidden_dim(), params.class_count());
    return OptimizerState{std::move(velocity), momentum, weight_decay, learning_rate};
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    const double denom = std::max(norm(u) * norm(v), kCosineFloor);
    return dot(u, v) / denom;
}

Matrix forward_extractor(const ModelParams& params, const Matrix& inputs) {
    if (inputs.cols() != params.input_dim()) {
        throw ContractError("forward_extractor: input width " + std::to_string(inputs.cols()) +
                            " != input_dim " + std::to_string(params.input_dim()));
    }
    return relu(matmul_transposed(inputs, params.extractor_weights, params.extractor_bias));
}

Matrix forward_classifier(const ModelParams& params, const Matrix& features) {
    if (features.cols() != params.hidden_dim()) {
        throw ContractError("forward_classifier: feature width " +
                            std::to_string(features.cols()) + " != hidden_dim " +
                            std::to_string(params.hidden_dim()));
    }
    return matmul_transposed(features, params.classifier_weights, params.classifier_bias);
}

LossAndGrad task_loss_grad(const ModelParams& params, const FeatureBatch& batch,
                           bool train_extractor, bool train_classifier) {
    if (!train_extractor && !train_classifier) {
        throw ContractError("task_loss_grad: at least one block must be trainable");
    }
    params.validate();
    check_batch(params, batch);

    const std::size_t n = batch.labels.size();
    const std::size_t classes = params.class_count();
    const Matrix preact =
        matmul_transposed(batch.inputs, params.extractor_weights, params.extractor_bias);
    const Matrix features = relu(preact);
    const Matrix logits = forward_classifier(params, features);

    LossAndGrad out{0.0, ModelParams::zeros(params.input_dim(), params.hidden_dim(), classes)};
    Matrix dlogits(n, classes);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t b = 0; b < n; ++b) {
        auto row = logits.row(b);
        const double mx = *std::max_element(row.begin(), row.end());
        double sum = 0.0;
        for (double v : row) {
            sum += std::exp(v - mx);
        }
        const double lse = mx + std::log(sum);
        const auto y = static_cast<std::size_t>(batch.labels[b]);
        out.loss += (lse - row[y]) * inv_n;
        for (std::size_t c = 0; c < classes; ++c) {
            const double p = std::exp(row[c] - lse);
            dlogits(b, c) = (p - (c == y ? 1.0 : 0.0)) * inv_n;
        }
    }

    if (train_classifier) {
        for (std::size_t b = 0; b < n; ++b) {
            auto z = features.row(b);
            for (std::size_t c = 0; c < classes; ++c) {
                const double d = dlogits(b, c);
                out.grads.classifier_bias[c] += d;
                auto gw = out.grads.classifier_weights.row(c);
                for (std::size_t h = 0; h < z.size(); ++h) {
                    gw[h] += d * z[h];
                }
            }
        }
    }

    if (train_extractor) {
        Matrix dfeatures(n, params.hidden_dim());
        for (std::size_t b = 0; b < n; ++b) {
            auto dz = dfeatures.row(b);
            for (std::size_t c = 0; c < classes; ++c) {
                const double d = dlogits(b, c);
                auto w = params.classifier_weights.row(c);
                for (std::size_t h = 0; h < dz.size(); ++h) {
                    dz[h] += d * w[h];
                }
            }
        }
        extractor_backward(batch.inputs, preact, dfeatures, out.grads);
    }
    return out;
}

LossAndGrad alignment_loss_grad(const ModelParams& params, const FeatureBatch& batch,
                                const AnchorSet& anchors, double temperature) {
    params.validate();
    check_batch(params, batch);
    if (!(temperature > 0.0)) {
        throw ContractError("alignment_loss_grad: temperature must be positive");
    }
    const std::size_t classes = params.class_count();
    const std::size_t hidden = params.hidden_dim();
    if (anchors.class_count() != classes || !anchors.complete()) {
        throw ContractError("alignment_loss_grad: need one anchor for each of the " +
                            std::to_string(classes) + " classes");
    }
    std::vector<double> anchor_norms(classes);
    for (std::size_t c = 0; c < classes; ++c) {
        const Vector& a = *anchors.anchors[c];
        if (a.size() != hidden) {
            throw ContractError("alignment_loss_grad: anchor width != hidden_dim");
        }
        anchor_norms[c] = norm(a);
        if (anchor_norms[c] == 0.0) {
            throw DegenerateSimilarityError("anchor for class " + std::to_string(c) +
                                            " has zero norm");
        }
    }

    const std::size_t n = batch.labels.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    const Matrix preact =
        matmul_transposed(batch.inputs, params.extractor_weights, params.extractor_bias);
    const Matrix features = relu(preact);

    LossAndGrad out{0.0, ModelParams::zeros(params.input_dim(), hidden, classes)};
    Matrix dfeatures(n, hidden);
    std::vector<double> sims(classes);
    std::vector<double> denoms(classes);
    for (std::size_t b = 0; b < n; ++b) {
        auto z = features.row(b);
        const double znorm = norm(z);
        for (std::size_t c = 0; c < classes; ++c) {
            denoms[c] = std::max(znorm * anchor_norms[c], kCosineFloor);
            sims[c] = dot(z, *anchors.anchors[c]) / denoms[c];
        }
        double mx = sims[0] / temperature;
        for (double s : sims) {
            mx = std::max(mx, s / temperature);
        }
        double sum = 0.0;
        for (double s : sims) {
            sum += std::exp(s / temperature - mx);
        }
        const double lse = mx + std::log(sum);
        const auto y = static_cast<std::size_t>(batch.labels[b]);
        out.loss += (lse - sims[y] / temperature) * inv_n;

        auto dz = dfeatures.row(b);
        for (std::size_t c = 0; c < classes; ++c) {
            const double q = std::exp(sims[c] / temperature - lse);
            const double dsim = (q - (c == y ? 1.0 : 0.0)) / temperature * inv_n;
            const Vector& a = *anchors.anchors[c];
            const bool guarded = znorm * anchor_norms[c] <= kCosineFloor;
            // d sim / dz = a/(|z||a|) - sim * z/|z|^2 on the unguarded branch.
            for (std::size_t h = 0; h < hidden; ++h) {
                double g = a[h] / denoms[c];
                if (!guarded) {
                    g -= sims[c] * z[h] / (znorm * znorm);
                }
                dz[h] += dsim * g;
            }
        }
    }
    extractor_backward(batch.inputs, preact, dfeatures, out.grads);
    return out;
}

void sgd_step(ModelParams& params, const ModelParams& grads, OptimizerState& state,
              UpdateMask mask) {
    if (!params.same_shape(grads) || !params.same_shape(state.velocity)) {
        throw ContractError("sgd_step: parameter, gradient and velocity shapes differ");
    }
    const double m = state.momentum;
    const double wd = state.weight_decay;
    const double lr = state.learning_rate;
    // velocity first, then parameters
    ModelParams& v = state.velocity;
    auto update = [&](std::span<double> p, std::span<const double> g, std::span<double> vel) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            vel[i] = m * vel[i] + (g[i] + wd * p[i]);
            p[i] -= lr * vel[i];
        }
    };
    if (mask.extractor) {
        update(params.extractor_weights.values(), grads.extractor_weights.values(),
               v.extractor_weights.values());
        update(params.extractor_bias, grads.extractor_bias, v.extractor_bias);
    }
    if (mask.classifier) {
        update(params.classifier_weights.values(), grads.classifier_weights.values(),
               v.classifier_weights.values());
        update(params.classifier_bias, grads.classifier_bias, v.classifier_bias);
    }
    if (!params.all_finite()) {
        throw InvariantError("sgd_step produced a non-finite parameter");
    }
}

void axpy(ModelParams& params, double scale, const ModelParams& other) {
    if (!params.same_shape(other)) {
        throw ContractError("axpy: shape mismatch");
    }
    for_blocks(params, other, UpdateMask{}, [scale](std::span<double> p, std::span<const double> q) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] += scale * q[i];
        }
    });
}

std::vector<int> predict(const ModelParams& params, const Matrix& inputs) {
    const Matrix logits = forward_classifier(params, forward_extractor(params, inputs));
    std::vector<int> out(logits.rows());
    for (std::size_t b = 0; b < logits.rows(); ++b) {
        auto row = logits.row(b);
        out[b] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return out;
}

}  // namespace fedccfa
