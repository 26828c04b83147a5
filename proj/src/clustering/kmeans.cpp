#include "actcluster/clustering/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "actcluster/numerics/random.hpp"

namespace actc {

namespace {

Eigen::MatrixXd plus_plus_seeds(const Eigen::Ref<const Eigen::MatrixXd>& x, int k, Rng& rng)
{
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd centers(k, x.cols());
    centers.row(0) = x.row(static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(n))));
    Eigen::VectorXd d2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = d2.sum();
        Eigen::Index pick = 0;
        if (total > 0.0) {
            double r = uniform01(rng) * total;
            pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                r -= d2[i];
                if (r < 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(n)));
        }
        centers.row(c) = x.row(pick);
        d2 = d2.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }
    return centers;
}

KMeansResult lloyd(const Eigen::Ref<const Eigen::MatrixXd>& x, Eigen::MatrixXd centers, int max_iterations)
{
    const Eigen::Index n = x.rows();
    const int k = static_cast<int>(centers.rows());
    KMeansResult r;
    r.labels.assign(static_cast<std::size_t>(n), -1);
    Eigen::VectorXd dist(n);
    for (int it = 0; it < max_iterations; ++it) {
        r.iterations = it + 1;
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::Index best = 0;
            dist[i] = (centers.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&best);
            if (r.labels[static_cast<std::size_t>(i)] != static_cast<int>(best)) {
                r.labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
                changed = true;
            }
        }
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
        Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int l = r.labels[static_cast<std::size_t>(i)];
            sums.row(l) += x.row(i);
            ++counts[l];
        }
        bool repaired = false;
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                centers.row(c) = sums.row(c) / counts[c];
                continue;
            }
            // split the largest cluster: its farthest member seeds the empty one
            Eigen::Index largest = 0;
            counts.maxCoeff(&largest);
            Eigen::Index far = -1;
            double far_d = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (r.labels[static_cast<std::size_t>(i)] != static_cast<int>(largest)) continue;
                const double d = (x.row(i) - sums.row(largest) / counts[largest]).squaredNorm();
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            centers.row(c) = x.row(far);
            r.labels[static_cast<std::size_t>(far)] = c;
            --counts[largest];
            sums.row(largest) -= x.row(far);
            ++counts[c];
            sums.row(c) = x.row(far);
            repaired = true;
        }
        if (!changed && !repaired) break;
    }
    r.inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        r.inertia += (x.row(i) - centers.row(r.labels[static_cast<std::size_t>(i)])).squaredNorm();
    }
    r.centers = std::move(centers);
    return r;
}

}  // namespace

KMeansResult kmeans(const Eigen::Ref<const Eigen::MatrixXd>& points, int k, int n_init, std::uint64_t seed,
                    int max_iterations)
{
    if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
    if (points.rows() < k) {
        throw std::invalid_argument("kmeans: " + std::to_string(points.rows()) + " points cannot form "
                                    + std::to_string(k) + " clusters");
    }
    if (!points.allFinite()) throw std::invalid_argument("kmeans: non-finite input");
    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int run = 0; run < std::max(1, n_init); ++run) {
        Rng rng(derive_seed(seed, seed_stream::clustering, static_cast<std::uint64_t>(run)));
        KMeansResult r = lloyd(points, plus_plus_seeds(points, k, rng), max_iterations);
        if (r.inertia < best.inertia) best = std::move(r);
    }
    return best;
}

}  // namespace actc
