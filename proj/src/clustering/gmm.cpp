#include "actcluster/clustering/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

#include "actcluster/clustering/kmeans.hpp"
#include "actcluster/numerics/random.hpp"

namespace actc {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

// Cholesky factor of cov, adding growing multiples of the ridge until it succeeds.
Eigen::LLT<Eigen::MatrixXd> robust_cholesky(const Eigen::MatrixXd& cov, double ridge, Eigen::MatrixXd* regularized,
                                            bool* ridged = nullptr)
{
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success && cov.allFinite()) {
        if (regularized) *regularized = cov;
        return llt;
    }
    if (ridged) *ridged = true;
    const Eigen::Index d = cov.rows();
    double r = ridge > 0.0 ? ridge : 1e-6;
    Eigen::MatrixXd base = cov.allFinite() ? cov : Eigen::MatrixXd::Zero(d, d);
    for (int attempt = 0; attempt < 40; ++attempt, r *= 10.0) {
        Eigen::MatrixXd c = base + r * Eigen::MatrixXd::Identity(d, d);
        llt.compute(c);
        if (llt.info() == Eigen::Success) {
            if (regularized) *regularized = std::move(c);
            return llt;
        }
    }
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
    llt.compute(id);
    if (regularized) *regularized = std::move(id);
    return llt;
}

}  // namespace

Eigen::VectorXd row_log_sum_exp(const Eigen::MatrixXd& m)
{
    Eigen::VectorXd out(m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double mx = m.row(i).maxCoeff();
        if (!std::isfinite(mx)) {
            out[i] = mx;
            continue;
        }
        out[i] = mx + std::log((m.row(i).array() - mx).exp().sum());
    }
    return out;
}

Eigen::MatrixXd gaussian_log_densities(const Eigen::Ref<const Eigen::MatrixXd>& points, const Eigen::MatrixXd& means,
                                       const std::vector<Eigen::MatrixXd>& covariances, double ridge)
{
    const Eigen::Index n = points.rows();
    const Eigen::Index d = points.cols();
    const Eigen::Index k = means.rows();
    if (means.cols() != d || static_cast<Eigen::Index>(covariances.size()) != k) {
        throw std::invalid_argument("gaussian_log_densities: model does not match point dimension "
                                    + std::to_string(d));
    }
    Eigen::MatrixXd out(n, k);
    for (Eigen::Index c = 0; c < k; ++c) {
        const auto llt = robust_cholesky(covariances[static_cast<std::size_t>(c)], ridge, nullptr);
        const Eigen::MatrixXd l = llt.matrixL();
        const double log_det = 2.0 * l.diagonal().array().log().sum();
        Eigen::MatrixXd centred = (points.rowwise() - means.row(c)).transpose();  // [D, N]
        l.triangularView<Eigen::Lower>().solveInPlace(centred);
        out.col(c) = (-0.5 * (static_cast<double>(d) * kLog2Pi + log_det)) * Eigen::VectorXd::Ones(n)
                     - 0.5 * centred.colwise().squaredNorm().transpose();
    }
    return out;
}

namespace {

Eigen::MatrixXd weighted_log_densities(const GmmModel& model, const Eigen::Ref<const Eigen::MatrixXd>& points)
{
    Eigen::MatrixXd logp = gaussian_log_densities(points, model.means, model.covariances);
    for (int c = 0; c < model.components(); ++c) {
        const double w = model.weights[c];
        logp.col(c).array() += w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity();
    }
    return logp;
}

// Responsibilities and mean log-likelihood in one pass.
double e_step(const GmmModel& model, const Eigen::Ref<const Eigen::MatrixXd>& points, Eigen::MatrixXd& resp)
{
    resp = weighted_log_densities(model, points);
    const Eigen::VectorXd lse = row_log_sum_exp(resp);
    resp.colwise() -= lse;
    resp = resp.array().exp().matrix();
    return lse.mean();
}

}  // namespace

Eigen::MatrixXd gmm_responsibilities(const GmmModel& model, const Eigen::Ref<const Eigen::MatrixXd>& points)
{
    Eigen::MatrixXd resp;
    e_step(model, points, resp);
    return resp;
}

double gmm_mean_log_likelihood(const GmmModel& model, const Eigen::Ref<const Eigen::MatrixXd>& points)
{
    return row_log_sum_exp(weighted_log_densities(model, points)).mean();
}

GmmModel gmm_m_step(const Eigen::Ref<const Eigen::MatrixXd>& points, const Eigen::MatrixXd& resp,
                    const GmmModel* previous, double ridge, bool* regularized)
{
    if (regularized) *regularized = false;
    const Eigen::Index n = points.rows();
    const Eigen::Index d = points.cols();
    const Eigen::Index k = resp.cols();
    GmmModel m;
    m.weights.resize(k);
    m.means.resize(k, d);
    m.covariances.resize(static_cast<std::size_t>(k));
    const Eigen::VectorXd nk = resp.colwise().sum().transpose();
    for (Eigen::Index c = 0; c < k; ++c) {
        m.weights[c] = nk[c] / static_cast<double>(n);
        if (nk[c] <= 1e-300) {
            if (previous) {
                m.means.row(c) = previous->means.row(c);
                m.covariances[static_cast<std::size_t>(c)] = previous->covariances[static_cast<std::size_t>(c)];
            } else {
                m.means.row(c) = points.colwise().mean();
                m.covariances[static_cast<std::size_t>(c)] = Eigen::MatrixXd::Identity(d, d);
            }
            continue;
        }
        m.means.row(c) = (resp.col(c).transpose() * points) / nk[c];
        const Eigen::MatrixXd centred = points.rowwise() - m.means.row(c);
        Eigen::MatrixXd cov = (centred.array().colwise() * resp.col(c).array()).matrix().transpose() * centred / nk[c];
        cov = 0.5 * (cov + cov.transpose());
        robust_cholesky(cov, ridge, &m.covariances[static_cast<std::size_t>(c)], regularized);
    }
    m.weights /= m.weights.sum();
    return m;
}

GmmFit gmm_em(const Eigen::Ref<const Eigen::MatrixXd>& points, GmmModel init, const GmmConfig& config)
{
    GmmFit fit;
    fit.model = std::move(init);
    double prev = -std::numeric_limits<double>::infinity();
    for (int step = 1; step <= std::max(1, config.max_steps); ++step) {
        const double ll = e_step(fit.model, points, fit.responsibilities);
        fit.log_likelihood.push_back(ll);
        fit.steps = step;
        if (step > 1 && ll - prev < config.tol) {
            fit.converged = true;
            return fit;
        }
        if (step == config.max_steps) break;
        bool singular = false;
        GmmModel next = gmm_m_step(points, fit.responsibilities, &fit.model, config.ridge, &singular);
        // a component collapsing onto too few points makes the likelihood
        // unbounded; a ridged update is no longer an EM step, so stop here
        if (singular) {
            fit.degenerate = true;
            return fit;
        }
        fit.model = std::move(next);
        prev = ll;
    }
    return fit;
}

GmmFit gmm_fit(const Eigen::Ref<const Eigen::MatrixXd>& points, const GmmConfig& config, std::uint64_t seed)
{
    const int k = config.components;
    if (k < 1) throw std::invalid_argument("gmm_fit: need at least one component");
    if (points.rows() < k) {
        throw std::invalid_argument("gmm_fit: " + std::to_string(points.rows()) + " points cannot fit "
                                    + std::to_string(k) + " components");
    }
    GmmFit best;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (int run = 0; run < std::max(1, config.n_init); ++run) {
        const auto km = kmeans(points, k, 1, derive_seed(seed, seed_stream::clustering, 1000 + static_cast<std::uint64_t>(run)));
        Eigen::MatrixXd hard = Eigen::MatrixXd::Zero(points.rows(), k);
        for (Eigen::Index i = 0; i < points.rows(); ++i) hard(i, km.labels[static_cast<std::size_t>(i)]) = 1.0;
        GmmModel init = gmm_m_step(points, hard, nullptr, config.ridge);
        GmmFit fit = gmm_em(points, std::move(init), config);
        const double ll = fit.log_likelihood.back();
        if (run == 0 || ll > best_ll) {
            best_ll = ll;
            best = std::move(fit);
        }
    }
    return best;
}

}  // namespace actc
