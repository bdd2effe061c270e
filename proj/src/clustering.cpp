#include "fedccfa/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>

#include "fedccfa/error.hpp"

namespace fedccfa {

void ClassClassifierSet::add(std::size_t client_id, const Matrix& weights,
                             std::span<const double> bias) {
    if (bias.size() != weights.rows()) {
        throw ContractError("class classifier: bias length != class count");
    }
    if (!classifiers.empty() && (classifiers.front().rows() != weights.rows() ||
                                 classifiers.front().cols() != weights.cols() + 1)) {
        throw ContractError("class classifier: every client must share one shape");
    }
    Matrix m(weights.rows(), weights.cols() + 1);
    for (std::size_t c = 0; c < weights.rows(); ++c) {
        auto src = weights.row(c);
        auto dst = m.row(c);
        std::copy(src.begin(), src.end(), dst.begin());
        dst[weights.cols()] = bias[c];
    }
    client_ids.push_back(client_id);
    classifiers.push_back(std::move(m));
}

std::size_t ClusterAssignment::block_of(std::size_t cls, std::size_t client_id) const {
    const Partition& p = per_class.at(cls);
    for (std::size_t b = 0; b < p.size(); ++b) {
        if (std::binary_search(p[b].begin(), p[b].end(), client_id)) {
            return b;
        }
    }
    throw ContractError("client " + std::to_string(client_id) + " missing from class " +
                        std::to_string(cls) + " partition");
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
    return 1.0 - cosine_similarity(u, v);
}

DistanceMatrix madd_matrix(std::span<const std::size_t> client_ids,
                           const std::vector<Vector>& vectors) {
    const std::size_t n = vectors.size();
    if (client_ids.size() != n) {
        throw ContractError("madd_matrix: one id per vector required");
    }
    DistanceMatrix out{{client_ids.begin(), client_ids.end()}, Matrix(n, n), n < 3};
    Matrix cos(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            cos(i, j) = cos(j, i) = cosine_distance(vectors[i], vectors[j]);
        }
    }
    if (out.fallback) {
        out.values = cos;
        return out;
    }
    const double scale = 1.0 / static_cast<double>(n - 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t q = 0; q < n; ++q) {
                if (q != i && q != j) {
                    s += std::abs(cos(i, q) - cos(j, q));
                }
            }
            out.values(i, j) = out.values(j, i) = s * scale;
        }
    }
    return out;
}

DistanceMatrix madd_matrix(const ClassClassifierSet& set, std::size_t cls) {
    if (cls >= set.class_count()) {
        throw ContractError("madd_matrix: class index out of range");
    }
    std::vector<Vector> vectors;
    vectors.reserve(set.client_count());
    for (const auto& m : set.classifiers) {
        auto r = m.row(cls);
        vectors.emplace_back(r.begin(), r.end());
    }
    return madd_matrix(set.client_ids, vectors);
}

Partition canonical(Partition p) {
    for (auto& block : p) {
        std::sort(block.begin(), block.end());
    }
    std::sort(p.begin(), p.end());
    return p;
}

Partition dbscan(const DistanceMatrix& matrix, double eps, std::size_t min_samples) {
    const std::size_t n = matrix.size();
    if (matrix.values.rows() != n || matrix.values.cols() != n) {
        throw ContractError("dbscan: distance matrix is not n x n");
    }
    if (!(eps > 0.0) || min_samples < 1) {
        throw ContractError("dbscan: need eps > 0 and min_samples >= 1");
    }
    constexpr int kUnvisited = -2;
    constexpr int kNoise = -1;
    std::vector<int> label(n, kUnvisited);
    auto neighbours = [&](std::size_t p) {
        std::vector<std::size_t> out;
        for (std::size_t q = 0; q < n; ++q) {
            if (matrix.values(p, q) <= eps) {
                out.push_back(q);
            }
        }
        return out;
    };

    int cluster = 0;
    for (std::size_t p = 0; p < n; ++p) {
        if (label[p] != kUnvisited) {
            continue;
        }
        auto seeds = neighbours(p);
        if (seeds.size() < min_samples) {
            label[p] = kNoise;
            continue;
        }
        label[p] = cluster;
        std::deque<std::size_t> queue(seeds.begin(), seeds.end());
        while (!queue.empty()) {
            const std::size_t q = queue.front();
            queue.pop_front();
            if (label[q] == kNoise) {
                label[q] = cluster;  // border point
            }
            if (label[q] != kUnvisited) {
                continue;
            }
            label[q] = cluster;
            auto more = neighbours(q);
            if (more.size() >= min_samples) {
                queue.insert(queue.end(), more.begin(), more.end());
            }
        }
        ++cluster;
    }

    Partition out(static_cast<std::size_t>(cluster));
    for (std::size_t p = 0; p < n; ++p) {
        if (label[p] == kNoise) {
            out.push_back({matrix.client_ids[p]});
        } else {
            out[static_cast<std::size_t>(label[p])].push_back(matrix.client_ids[p]);
        }
    }
    return canonical(std::move(out));
}

ClusteringResult cluster_all_classes(const ClassClassifierSet& set, double eps,
                                     std::size_t min_samples) {
    ClusteringResult out;
    out.assignment.client_ids = set.client_ids;
    std::sort(out.assignment.client_ids.begin(), out.assignment.client_ids.end());
    for (std::size_t c = 0; c < set.class_count(); ++c) {
        out.matrices.push_back(madd_matrix(set, c));
        out.assignment.per_class.push_back(dbscan(out.matrices.back(), eps, min_samples));
    }
    return out;
}

double rand_index(const Partition& a, const Partition& b) {
    std::map<std::size_t, std::size_t> la;
    std::map<std::size_t, std::size_t> lb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (auto id : a[i]) {
            la[id] = i;
        }
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        for (auto id : b[i]) {
            lb[id] = i;
        }
    }
    if (la.size() != lb.size()) {
        throw ContractError("rand_index: partitions cover different sets");
    }
    std::vector<std::pair<std::size_t, std::size_t>> labels;
    for (const auto& [id, block] : la) {
        auto it = lb.find(id);
        if (it == lb.end()) {
            throw ContractError("rand_index: partitions cover different sets");
        }
        labels.emplace_back(block, it->second);
    }
    const std::size_t n = labels.size();
    if (n < 2) {
        return 1.0;
    }
    std::size_t agree = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool same_a = labels[i].first == labels[j].first;
            const bool same_b = labels[i].second == labels[j].second;
            agree += same_a == same_b ? 1 : 0;
        }
    }
    return static_cast<double>(agree) / static_cast<double>(n * (n - 1) / 2);
}

void write_distance_csv(const std::filesystem::path& path, const DistanceMatrix& matrix) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        out << (i ? "," : "") << matrix.client_ids[i];
    }
    out << '\n';
    char buf[64];
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        for (std::size_t j = 0; j < matrix.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.6f", matrix.values(i, j));
            out << (j ? "," : "") << buf;
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

}  // namespace fedccfa
