#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace actc {

/// Full-covariance Gaussian mixture; points are rows of an [N, D] matrix.
struct GmmModel {
    Eigen::VectorXd weights;                   // [K], sums to 1
    Eigen::MatrixXd means;                     // [K, D]
    std::vector<Eigen::MatrixXd> covariances;  // K x [D, D], SPD

    int components() const { return static_cast<int>(means.rows()); }
    Eigen::Index dims() const { return means.cols(); }
};

struct GmmConfig {
    int components = 2;
    double tol = 1e-3;     // on the mean per-point log-likelihood
    int max_steps = 100;
    int n_init = 5;
    double ridge = 1e-6;   // added to a covariance whose Cholesky factorization fails
};

struct GmmFit {
    GmmModel model;
    Eigen::MatrixXd responsibilities;  // [N, K] under `model`
    std::vector<double> log_likelihood;  // mean per-point log-likelihood of each successive model
    int steps = 0;
    bool converged = false;
    bool degenerate = false;  // stopped because an update needed a ridged covariance
};

/// log N(x_i | mu_k, Sigma_k) for every point and component, [N, K].
/// A covariance that is not positive definite gets ridge * I added until
/// it factorizes (the stored model is not modified).
Eigen::MatrixXd gaussian_log_densities(const Eigen::Ref<const Eigen::MatrixXd>& points,
                                       const Eigen::MatrixXd& means,
                                       const std::vector<Eigen::MatrixXd>& covariances, double ridge = 1e-6);

/// Posterior component probabilities, rows sum to 1.
Eigen::MatrixXd gmm_responsibilities(const GmmModel& model, const Eigen::Ref<const Eigen::MatrixXd>& points);
double gmm_mean_log_likelihood(const GmmModel& model, const Eigen::Ref<const Eigen::MatrixXd>& points);

/// Weighted moment estimates (the M-step). Components whose total
/// responsibility vanishes keep their previous mean and covariance. A
/// singular covariance gets the ridge and sets `*regularized`.
GmmModel gmm_m_step(const Eigen::Ref<const Eigen::MatrixXd>& points, const Eigen::MatrixXd& responsibilities,
                    const GmmModel* previous, double ridge, bool* regularized = nullptr);

/// EM from a given starting model until the mean log-likelihood improves
/// by less than `tol`, `max_steps` models have been evaluated, or an update
/// would need a ridged covariance (the model before it is kept).
GmmFit gmm_em(const Eigen::Ref<const Eigen::MatrixXd>& points, GmmModel init, const GmmConfig& config);

/// Best of `n_init` k-means-initialized EM runs by final log-likelihood.
GmmFit gmm_fit(const Eigen::Ref<const Eigen::MatrixXd>& points, const GmmConfig& config, std::uint64_t seed);

/// Row-wise log-sum-exp of an [N, K] matrix; -inf entries are allowed.
Eigen::VectorXd row_log_sum_exp(const Eigen::MatrixXd& m);

}  // namespace actc
