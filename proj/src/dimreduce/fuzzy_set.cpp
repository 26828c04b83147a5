#include "actcluster/dimreduce/fuzzy_set.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace actc {

namespace {

constexpr double kTolerance = 1e-5;
constexpr double kMinScale = 1e-3;

double membership(double d, double rho, double sigma)
{
    const double excess = d - rho;
    if (excess <= 0.0) return 1.0;
    if (sigma <= 0.0) return 0.0;
    return std::exp(-excess / sigma);
}

}  // namespace

Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> directed_memberships(
    const KnnGraph& knn, const Eigen::VectorXd& rho, const Eigen::VectorXd& sigma)
{
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w(knn.points(), knn.k());
    for (Eigen::Index i = 0; i < knn.points(); ++i)
        for (Eigen::Index j = 0; j < knn.k(); ++j) w(i, j) = membership(knn.distances(i, j), rho[i], sigma[i]);
    return w;
}

FuzzyGraph fuzzy_simplicial_set(const KnnGraph& knn)
{
    const Eigen::Index n = knn.points();
    const Eigen::Index k = knn.k();
    const double target = std::log2(static_cast<double>(k));
    const double global_mean = n > 0 ? knn.distances.mean() : 0.0;

    FuzzyGraph g;
    g.rho.setZero(n);
    g.sigma.setZero(n);
    g.residual.setZero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto row = knn.distances.row(i);
        double rho = 0.0;
        for (Eigen::Index j = 0; j < k; ++j) {
            if (row[j] > 0.0) {
                rho = row[j];
                break;
            }
        }
        auto mass = [&](double sigma) {
            double s = 0.0;
            for (Eigen::Index j = 0; j < k; ++j) s += membership(row[j], rho, sigma);
            return s;
        };

        // mass(sigma) increases with sigma; bisect, doubling the upper bound until bracketed
        double lo = 0.0;
        double hi = std::numeric_limits<double>::infinity();
        double mid = 1.0;
        double best = mid;
        double best_residual = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 64; ++it) {
            const double r = mass(mid) - target;
            if (std::abs(r) < best_residual) {
                best_residual = std::abs(r);
                best = mid;
            }
            if (std::abs(r) < 1e-3 * kTolerance) break;
            if (r > 0.0) {
                hi = mid;
                mid = 0.5 * (lo + hi);
            } else {
                lo = mid;
                mid = std::isinf(hi) ? 2.0 * mid : 0.5 * (lo + hi);
            }
        }
        double sigma = best;
        const double mean_i = row.mean();
        if (rho > 0.0) sigma = std::max(sigma, kMinScale * mean_i);
        else sigma = std::max(sigma, kMinScale * global_mean);
        g.rho[i] = rho;
        g.sigma[i] = sigma;
        g.residual[i] = std::abs(mass(sigma) - target);
    }

    const auto w = directed_memberships(knn, g.rho, g.sigma);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n * k));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < k; ++j) triplets.emplace_back(i, knn.indices(i, j), w(i, j));
    SparseMatrix directed(n, n);
    directed.setFromTriplets(triplets.begin(), triplets.end());
    const SparseMatrix transposed = directed.transpose();
    g.weights = SparseMatrix(directed + transposed) - SparseMatrix(directed.cwiseProduct(transposed));
    g.weights.prune(0.0);
    g.weights.makeCompressed();
    return g;
}

}  // namespace actc
