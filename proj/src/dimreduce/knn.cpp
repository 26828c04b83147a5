#include "actcluster/dimreduce/knn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace actc {

KnnGraph knn_graph(const Eigen::Ref<const Eigen::MatrixXd>& points, Eigen::Index k)
{
    const Eigen::Index n = points.rows();
    if (k < 1) throw std::invalid_argument("knn_graph: k must be positive");
    if (n <= k) {
        throw std::invalid_argument("knn_graph: " + std::to_string(n) + " points cannot have " + std::to_string(k)
                                    + " neighbours each");
    }
    KnnGraph g;
    g.indices.resize(n, k);
    g.distances.resize(n, k);

    std::vector<std::pair<double, Eigen::Index>> candidates(static_cast<std::size_t>(n - 1));
    Eigen::VectorXd d2(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d2 = (points.rowwise() - points.row(i)).rowwise().squaredNorm();
        std::size_t c = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i) candidates[c++] = {d2[j], j};
        }
        std::partial_sort(candidates.begin(), candidates.begin() + k, candidates.end());
        for (Eigen::Index r = 0; r < k; ++r) {
            g.indices(i, r) = candidates[static_cast<std::size_t>(r)].second;
            g.distances(i, r) = std::sqrt(candidates[static_cast<std::size_t>(r)].first);
        }
    }
    return g;
}

}  // namespace actc
