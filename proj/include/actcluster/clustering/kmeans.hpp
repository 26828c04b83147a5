#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace actc {

struct KMeansResult {
    std::vector<int> labels;
    Eigen::MatrixXd centers;  // [K, D]
    double inertia = 0.0;
    int iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding; the best of `n_init` runs by
/// inertia. An emptied cluster is re-seeded with the point of the largest
/// cluster that lies farthest from its center. Points are rows.
KMeansResult kmeans(const Eigen::Ref<const Eigen::MatrixXd>& points, int k, int n_init, std::uint64_t seed,
                    int max_iterations = 300);

}  // namespace actc
