#include "actcluster/clustering/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace actc {

ClusterAssignment assignment_from_posteriors(Eigen::MatrixXd posteriors)
{
    ClusterAssignment a;
    const Eigen::Index n = posteriors.rows();
    a.labels.resize(static_cast<std::size_t>(n));
    a.confidence.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index best = 0;
        a.confidence[static_cast<std::size_t>(i)] = posteriors.row(i).maxCoeff(&best);
        a.labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    a.posteriors = std::move(posteriors);
    return a;
}

Eigen::MatrixXd build_transitions(int k, double p, TransitionSemantics semantics)
{
    if (k < 2) throw std::invalid_argument("build_transitions: need at least 2 states");
    if (!std::isfinite(p)) throw std::invalid_argument("build_transitions: non-finite self-transition");
    p = std::clamp(p, 1e-6, 1.0 - 1e-6);
    const double diagonal = semantics == TransitionSemantics::self ? p : 1.0 - p;
    const double off = (1.0 - diagonal) / (k - 1);

    Eigen::MatrixXd a = Eigen::MatrixXd::Constant(k, k, off);
    auto row_sum = [&](int i) {
        double s = 0.0;
        for (int j = 0; j < k; ++j) s += a(i, j);
        return s;
    };
    for (int i = 0; i < k; ++i) {
        // try the diagonal and its neighbours, nearest first
        bool exact = false;
        double up = diagonal, down = diagonal;
        for (int step = 0; step < 64 && !exact; ++step) {
            for (double d : {up, down}) {
                a(i, i) = d;
                if (row_sum(i) == 1.0) {
                    exact = true;
                    break;
                }
            }
            up = std::nextafter(up, 2.0);
            down = std::nextafter(down, 0.0);
        }
        if (exact) continue;
        // the partial sums skip over 1; the last entry of the row is added
        // last, so solving for it lands exactly
        a(i, i) = diagonal;
        double head = 0.0;
        for (int j = 0; j + 1 < k; ++j) head += a(i, j);
        double last = 1.0 - head;
        for (int attempt = 0; attempt < 64 && head + last != 1.0; ++attempt) {
            last = std::nextafter(last, head + last < 1.0 ? 2.0 : 0.0);
        }
        a(i, k - 1) = last;
    }
    return a;
}

double estimate_self_transition(std::span<const int> labels, std::span<const Span> chains,
                                std::optional<double> override_value)
{
    if (override_value) return *override_value;
    std::size_t pairs = 0;
    std::size_t same = 0;
    for (const Span& c : chains) {
        for (Index t = c.begin + 1; t < c.end; ++t) {
            ++pairs;
            if (labels[static_cast<std::size_t>(t)] == labels[static_cast<std::size_t>(t - 1)]) ++same;
        }
    }
    if (pairs == 0) {
        throw std::invalid_argument("estimate_self_transition: fewer than 2 consecutive labels and no override");
    }
    return static_cast<double>(same) / static_cast<double>(pairs);
}

double estimate_self_transition(std::span<const int> labels, std::optional<double> override_value)
{
    const Span whole{0, static_cast<Index>(labels.size())};
    return estimate_self_transition(labels, std::span<const Span>(&whole, 1), override_value);
}

ForwardBackward forward_backward(const Eigen::MatrixXd& transitions, const Eigen::VectorXd& initial,
                                 const Eigen::MatrixXd& log_emissions, std::span<const Span> chains)
{
    const Eigen::Index n = log_emissions.rows();
    const Eigen::Index k = log_emissions.cols();
    if (transitions.rows() != k || transitions.cols() != k || initial.size() != k) {
        throw std::invalid_argument("forward_backward: model has " + std::to_string(transitions.rows())
                                    + " states, emissions have " + std::to_string(k));
    }
    ForwardBackward fb;
    fb.posteriors.setZero(n, k);
    Eigen::MatrixXd alpha(n, k);
    Eigen::MatrixXd emit(n, k);
    Eigen::VectorXd scale(n);
    Eigen::VectorXd beta(k);
    Eigen::VectorXd next(k);
    const Eigen::MatrixXd at = transitions.transpose();

    for (const Span& c : chains) {
        if (c.begin < 0 || c.end > n || c.end <= c.begin) throw std::invalid_argument("forward_backward: bad chain");
        for (Index t = c.begin; t < c.end; ++t) {
            const double m = log_emissions.row(t).maxCoeff();
            emit.row(t) = (log_emissions.row(t).array() - m).exp();
            if (t == c.begin) alpha.row(t) = initial.transpose().cwiseProduct(emit.row(t));
            else alpha.row(t) = (at * alpha.row(t - 1).transpose()).transpose().cwiseProduct(emit.row(t));
            scale[t] = alpha.row(t).sum();
            alpha.row(t) /= scale[t];
            fb.log_likelihood += std::log(scale[t]) + m;
        }
        beta.setOnes();
        for (Index t = c.end - 1; t >= c.begin; --t) {
            if (t < c.end - 1) {
                next = emit.row(t + 1).transpose().cwiseProduct(beta);
                beta = transitions * next / scale[t + 1];
            }
            Eigen::RowVectorXd g = alpha.row(t).cwiseProduct(beta.transpose());
            fb.posteriors.row(t) = g / g.sum();
        }
    }
    return fb;
}

ForwardBackward forward_backward(const HmmModel& model, const Eigen::Ref<const Eigen::MatrixXd>& points,
                                 std::span<const Span> chains)
{
    return forward_backward(model.transitions, model.initial,
                            gaussian_log_densities(points, model.means, model.covariances), chains);
}

HmmFit hmm_em(const Eigen::Ref<const Eigen::MatrixXd>& points, std::span<const Span> chains, HmmModel init,
              const HmmConfig& config)
{
    HmmFit fit;
    fit.model = std::move(init);
    const double n = static_cast<double>(points.rows());
    double prev = -std::numeric_limits<double>::infinity();
    ForwardBackward fb;
    for (int step = 0; step <= std::max(0, config.em_steps); ++step) {
        fb = forward_backward(fit.model, points, chains);
        const double ll = fb.log_likelihood / n;
        fit.log_likelihood.push_back(ll);
        if (step > 0 && ll - prev < config.tol) break;
        if (step == config.em_steps) break;
        GmmModel emissions{Eigen::VectorXd::Ones(fit.model.states()), fit.model.means, fit.model.covariances};
        bool singular = false;
        GmmModel updated = gmm_m_step(points, fb.posteriors, &emissions, config.init.ridge, &singular);
        if (singular) break;  // collapsing state, see gmm_em
        fit.model.means = std::move(updated.means);
        fit.model.covariances = std::move(updated.covariances);
        prev = ll;
    }
    fit.assignment = assignment_from_posteriors(std::move(fb.posteriors));
    return fit;
}

HmmFit hmm_fit_and_decode(const Eigen::Ref<const Eigen::MatrixXd>& points, std::span<const Span> chains,
                          const Eigen::MatrixXd& transitions, const HmmConfig& config, std::uint64_t seed)
{
    const int k = config.states;
    if (transitions.rows() != k || transitions.cols() != k) {
        throw std::invalid_argument("hmm_fit_and_decode: transition matrix does not have " + std::to_string(k)
                                    + " states");
    }
    GmmConfig gcfg = config.init;
    gcfg.components = k;
    const GmmFit gmm = gmm_fit(points, gcfg, seed);

    HmmModel init;
    init.transitions = transitions;
    init.initial = Eigen::VectorXd::Constant(k, 1.0 / k);
    init.means = gmm.model.means;
    init.covariances = gmm.model.covariances;
    return hmm_em(points, chains, std::move(init), config);
}

}  // namespace actc
