#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "actcluster/dimreduce/knn.hpp"

namespace actc {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct FuzzyGraph {
    SparseMatrix weights;      // [N, N], symmetric, entries in (0, 1]
    Eigen::VectorXd rho;       // distance to the nearest non-identical neighbour
    Eigen::VectorXd sigma;     // smoothing bandwidth
    Eigen::VectorXd residual;  // |sum_j exp(-max(0, d_ij - rho_i) / sigma_i) - log2(k)|

    Eigen::Index points() const { return weights.rows(); }
};

/// Smooth-kNN bandwidths by bisection (at most 64 steps), directed
/// memberships exp(-max(0, d - rho) / sigma), then the fuzzy union
/// w + w^T - w o w^T. Zero entries are dropped.
FuzzyGraph fuzzy_simplicial_set(const KnnGraph& knn);

/// Directed memberships before symmetrization, [N, k] aligned with knn.indices.
Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> directed_memberships(
    const KnnGraph& knn, const Eigen::VectorXd& rho, const Eigen::VectorXd& sigma);

}  // namespace actc
