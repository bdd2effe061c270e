#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "fedccfa/matrix.hpp"
#include "fedccfa/model.hpp"

namespace fedccfa {

/// Per-client class classifiers: row c of each matrix is the classifier
/// weight row for class c followed by its bias entry.
struct ClassClassifierSet {
    std::vector<std::size_t> client_ids;
    std::vector<Matrix> classifiers;  // one C x (hidden_dim + 1) matrix per client

    std::size_t client_count() const { return client_ids.size(); }
    std::size_t class_count() const { return classifiers.empty() ? 0 : classifiers.front().rows(); }

    void add(std::size_t client_id, const Matrix& weights, std::span<const double> bias);
};

struct DistanceMatrix {
    std::vector<std::size_t> client_ids;
    Matrix values;
    // Set when fewer than three clients forced plain pairwise cosine distances.
    bool fallback = false;

    std::size_t size() const { return client_ids.size(); }
};

// Blocks of client ids; each block ascending, blocks ordered by first member.
using Partition = std::vector<std::vector<std::size_t>>;

struct ClusterAssignment {
    std::vector<std::size_t> client_ids;
    std::vector<Partition> per_class;

    // Index of the block of `per_class[cls]` that contains client_id.
    std::size_t block_of(std::size_t cls, std::size_t client_id) const;
};

struct ClusteringResult {
    ClusterAssignment assignment;
    std::vector<DistanceMatrix> matrices;  // one per class
};

// 1 - cos(u, v) with the denominator floored at kCosineFloor.
double cosine_distance(std::span<const double> u, std::span<const double> v);

/// Mean absolute difference of cosine-distance profiles:
///   D(i, j) = 1/(n-2) * sum_{q != i, j} |cos(v_i, v_q) - cos(v_j, v_q)|
/// For n < 3 the profile is undefined and the plain cosine distance is used
/// instead (fallback = true).
DistanceMatrix madd_matrix(std::span<const std::size_t> client_ids,
                           const std::vector<Vector>& vectors);
DistanceMatrix madd_matrix(const ClassClassifierSet& set, std::size_t cls);

/// Density-based clustering over a precomputed distance matrix with the
/// neighbourhood test d <= eps. Noise points come back as singleton blocks.
Partition dbscan(const DistanceMatrix& matrix, double eps, std::size_t min_samples);

ClusteringResult cluster_all_classes(const ClassClassifierSet& set, double eps,
                                     std::size_t min_samples);

// Sorts members and blocks into canonical order.
Partition canonical(Partition p);

/// Fraction of unordered pairs on which two partitions of the same id set
/// agree. 1.0 for fewer than two elements.
double rand_index(const Partition& a, const Partition& b);

/// CSV with a header row of client ids followed by one row per client,
/// values printed with six decimals.
void write_distance_csv(const std::filesystem::path& path, const DistanceMatrix& matrix);

}  // namespace fedccfa
