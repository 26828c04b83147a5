#pragma once

#include <Eigen/Core>

namespace actc {

using IndexMatrix = Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Exact k nearest neighbours of every row, self excluded. Row i lists
/// neighbours by increasing Euclidean distance, ties by smaller index.
struct KnnGraph {
    IndexMatrix indices;                                                       // [N, k]
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> distances;  // [N, k]

    Eigen::Index points() const { return indices.rows(); }
    Eigen::Index k() const { return indices.cols(); }
};

/// Brute force, O(N^2 D). Requires N > k >= 1.
KnnGraph knn_graph(const Eigen::Ref<const Eigen::MatrixXd>& points, Eigen::Index k);

}  // namespace actc
