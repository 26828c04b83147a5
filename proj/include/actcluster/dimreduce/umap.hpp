#pragma once

#include <Eigen/Core>

#include "actcluster/dimreduce/fuzzy_set.hpp"
#include "actcluster/dimreduce/knn.hpp"
#include "actcluster/dimreduce/layout.hpp"

namespace actc {

struct UmapResult {
    Eigen::MatrixXd embedding;  // [N, n_components]
    FuzzyGraph graph;
    double a = 0.0;
    double b = 0.0;
    bool spectral_init = true;  // false when the random fallback was used
};

/// kNN graph, fuzzy simplicial set, spectral initialization and layout
/// optimization. Requires N > n_neighbors.
UmapResult umap(const Eigen::Ref<const Eigen::MatrixXd>& points, const UmapConfig& config);

}  // namespace actc
