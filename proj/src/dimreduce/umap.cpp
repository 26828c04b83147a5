#include "actcluster/dimreduce/umap.hpp"

#include <stdexcept>
#include <tuple>

#include "actcluster/numerics/random.hpp"

namespace actc {

UmapResult umap(const Eigen::Ref<const Eigen::MatrixXd>& points, const UmapConfig& config)
{
    if (config.n_components < 1) throw std::invalid_argument("umap: need at least one output dimension");
    UmapResult r;
    std::tie(r.a, r.b) = fit_ab(config.spread, config.min_dist);
    r.graph = fuzzy_simplicial_set(knn_graph(points, config.n_neighbors));

    const Eigen::Index n = points.rows();
    Eigen::MatrixXd init;
    r.spectral_init = spectral_layout(r.graph.weights, config.n_components, derive_seed(config.seed, seed_stream::umap, 0), init);
    if (!r.spectral_init) init = random_layout(n, config.n_components, derive_seed(config.seed, seed_stream::umap, 1));

    // small jitter breaks exact ties, then each axis is stretched onto [0, 10]
    Rng rng(derive_seed(config.seed, seed_stream::umap, 3));
    for (Eigen::Index i = 0; i < init.size(); ++i) init.data()[i] += 1e-4 * standard_normal(rng);
    for (Eigen::Index d = 0; d < init.cols(); ++d) {
        const double lo = init.col(d).minCoeff();
        const double range = init.col(d).maxCoeff() - lo;
        if (range > 0.0) init.col(d) = (10.0 / range) * (init.col(d).array() - lo);
    }
    r.embedding = optimize_layout(r.graph.weights, std::move(init), config, r.a, r.b);
    return r;
}

}  // namespace actc
