#pragma once

#include <cstdint>
#include <utility>

#include <Eigen/Core>

#include "actcluster/dimreduce/fuzzy_set.hpp"

namespace actc {

struct UmapConfig {
    Eigen::Index n_neighbors = 60;
    double min_dist = 0.0;
    double spread = 1.0;
    Eigen::Index n_components = 2;
    int epochs = 200;
    int negative_sample_rate = 5;
    double learning_rate = 1.0;
    double repulsion_strength = 1.0;
    std::uint64_t seed = 0;
};

/// Least-squares fit of 1 / (1 + a x^(2b)) to the target curve
/// (1 below min_dist, exp(-(x - min_dist) / spread) above) on 300 points
/// spanning [0, 3 spread]. Levenberg-Marquardt from a = b = 1.
std::pair<double, double> fit_ab(double spread, double min_dist);

/// Eigenvectors 1..dim of the symmetric normalized Laplacian, scaled so the
/// largest absolute coordinate is 10. Disconnected graphs are laid out per
/// component, components side by side. Returns false (and leaves `out`
/// untouched) on numerical failure.
bool spectral_layout(const SparseMatrix& graph, Eigen::Index dim, std::uint64_t seed, Eigen::MatrixXd& out);

/// Uniform random coordinates in [-10, 10].
Eigen::MatrixXd random_layout(Eigen::Index n, Eigen::Index dim, std::uint64_t seed);

/// Negative-sampling SGD on the fuzzy graph, edges visited sequentially in
/// row-major order so the result is a pure function of the inputs.
Eigen::MatrixXd optimize_layout(const SparseMatrix& graph, Eigen::MatrixXd initial, const UmapConfig& config,
                                double a, double b);

}  // namespace actc
