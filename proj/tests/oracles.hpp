#pragma once

// Test-only reference computations. Nothing here calls into the code paths
// it is used to check: plain scalar loops, finite differences, union-find.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "fedccfa/model.hpp"

namespace fedccfa::oracle {

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

// features[b][h] by explicit triple loop
inline std::vector<std::vector<double>> features(const ModelParams& p, const Matrix& x) {
    std::vector<std::vector<double>> z(x.rows(), std::vector<double>(p.hidden_dim()));
    for (std::size_t b = 0; b < x.rows(); ++b) {
        for (std::size_t h = 0; h < p.hidden_dim(); ++h) {
            double s = p.extractor_bias[h];
            for (std::size_t i = 0; i < x.cols(); ++i) {
                s += x(b, i) * p.extractor_weights(h, i);
            }
            z[b][h] = relu(s);
        }
    }
    return z;
}

inline std::vector<std::vector<double>> logits(const ModelParams& p,
                                               const std::vector<std::vector<double>>& z) {
    std::vector<std::vector<double>> out(z.size(), std::vector<double>(p.class_count()));
    for (std::size_t b = 0; b < z.size(); ++b) {
        for (std::size_t c = 0; c < p.class_count(); ++c) {
            double s = p.classifier_bias[c];
            for (std::size_t h = 0; h < p.hidden_dim(); ++h) {
                s += z[b][h] * p.classifier_weights(c, h);
            }
            out[b][c] = s;
        }
    }
    return out;
}

inline double neg_log_softmax(const std::vector<double>& scores, std::size_t target) {
    double mx = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (double s : scores) {
        sum += std::exp(s - mx);
    }
    return mx + std::log(sum) - scores[target];
}

inline double task_loss(const ModelParams& p, const FeatureBatch& batch) {
    const auto l = logits(p, features(p, batch.inputs));
    double loss = 0.0;
    for (std::size_t b = 0; b < l.size(); ++b) {
        loss += neg_log_softmax(l[b], static_cast<std::size_t>(batch.labels[b]));
    }
    return loss / static_cast<double>(l.size());
}

inline double cosine(const std::vector<double>& u, const std::vector<double>& v) {
    double uv = 0, uu = 0, vv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        uv += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    return uv / std::max(std::sqrt(uu) * std::sqrt(vv), 1e-12);
}

inline double alignment_loss(const ModelParams& p, const FeatureBatch& batch,
                             const AnchorSet& anchors, double tau) {
    const auto z = features(p, batch.inputs);
    double loss = 0.0;
    for (std::size_t b = 0; b < z.size(); ++b) {
        std::vector<double> s;
        for (const auto& a : anchors.anchors) {
            s.push_back(cosine(z[b], *a) / tau);
        }
        loss += neg_log_softmax(s, static_cast<std::size_t>(batch.labels[b]));
    }
    return loss / static_cast<double>(z.size());
}

// Visits every scalar parameter of p (extractor first, then classifier).
inline void for_each_param(ModelParams& p, const std::function<void(double&, bool)>& f) {
    for (double& v : p.extractor_weights.values()) f(v, true);
    for (double& v : p.extractor_bias) f(v, true);
    for (double& v : p.classifier_weights.values()) f(v, false);
    for (double& v : p.classifier_bias) f(v, false);
}

// Central finite differences of `loss` over every parameter, flattened in
// for_each_param order.
inline std::vector<double> finite_difference(ModelParams p,
                                             const std::function<double(const ModelParams&)>& loss,
                                             double step = 1e-5) {
    std::vector<double> out;
    std::vector<double*> slots;
    for_each_param(p, [&](double& v, bool) { slots.push_back(&v); });
    for (double* v : slots) {
        const double keep = *v;
        *v = keep + step;
        const double up = loss(p);
        *v = keep - step;
        const double down = loss(p);
        *v = keep;
        out.push_back((up - down) / (2.0 * step));
    }
    return out;
}

inline std::vector<double> flatten(ModelParams p) {
    std::vector<double> out;
    for_each_param(p, [&](double& v, bool) { out.push_back(v); });
    return out;
}

inline double relative_error(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

// Smallest |pre-activation| over the batch; finite differences are only
// trustworthy away from the ReLU kink.
inline double min_abs_preactivation(const ModelParams& p, const Matrix& x) {
    double m = INFINITY;
    for (std::size_t b = 0; b < x.rows(); ++b) {
        for (std::size_t h = 0; h < p.hidden_dim(); ++h) {
            double s = p.extractor_bias[h];
            for (std::size_t i = 0; i < x.cols(); ++i) {
                s += x(b, i) * p.extractor_weights(h, i);
            }
            m = std::min(m, std::abs(s));
        }
    }
    return m;
}

inline FeatureBatch random_batch(std::size_t n, std::size_t dim, std::size_t classes,
                                 std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<int> y(0, static_cast<int>(classes) - 1);
    FeatureBatch b{Matrix(n, dim), {}};
    for (double& v : b.inputs.values()) v = g(rng);
    for (std::size_t i = 0; i < n; ++i) b.labels.push_back(y(rng));
    return b;
}

// Connected components of the graph with an edge wherever d(i, j) <= eps,
// as sorted blocks of indices.
inline std::vector<std::vector<std::size_t>> union_find_components(
    const std::vector<std::vector<double>>& d, double eps) {
    const std::size_t n = d.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (d[i][j] <= eps) {
                parent[find(i)] = find(j);
            }
        }
    }
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) {
        groups[find(i)].push_back(i);
    }
    std::vector<std::vector<std::size_t>> out;
    for (auto& [root, members] : groups) {
        out.push_back(members);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace fedccfa::oracle
