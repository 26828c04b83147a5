#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "actcluster/clustering/gmm.hpp"
#include "actcluster/data/recording.hpp"

namespace actc {

/// Per-window hard labels c(x) with the posterior probability p(x) of the
/// chosen label, plus the full posterior matrix.
struct ClusterAssignment {
    std::vector<int> labels;
    std::vector<double> confidence;
    Eigen::MatrixXd posteriors;  // [N, K], rows sum to 1
};

/// Picks the arg-max label of each posterior row (first index on ties).
ClusterAssignment assignment_from_posteriors(Eigen::MatrixXd posteriors);

/// How the self-transition probability p maps onto the diagonal of A.
/// `self` puts p on the diagonal (p is the chance the activity continues);
/// `paper_verbatim` puts 1 - p on the diagonal and p / (K - 1) elsewhere.
enum class TransitionSemantics { self, paper_verbatim };

/// K x K transition matrix with a constant diagonal d and constant
/// off-diagonal (1 - d) / (K - 1). p is clamped to [1e-6, 1 - 1e-6]. The
/// diagonal is nudged by a few ulps (or, when no nudge works, the last entry
/// of the row is solved for) so that every row, summed left to right, is exactly 1.
Eigen::MatrixXd build_transitions(int k, double p, TransitionSemantics semantics = TransitionSemantics::self);

/// Fraction of consecutive label pairs that share a label, counted within
/// each chain. The override, when given, is returned unchanged.
double estimate_self_transition(std::span<const int> labels, std::span<const Span> chains,
                                std::optional<double> override_value = std::nullopt);
double estimate_self_transition(std::span<const int> labels, std::optional<double> override_value = std::nullopt);

struct HmmModel {
    Eigen::MatrixXd transitions;               // [K, K], fixed
    Eigen::VectorXd initial;                   // [K], uniform
    Eigen::MatrixXd means;                     // [K, D]
    std::vector<Eigen::MatrixXd> covariances;  // K x [D, D]

    int states() const { return static_cast<int>(transitions.rows()); }
};

struct ForwardBackward {
    Eigen::MatrixXd posteriors;  // [N, K]
    double log_likelihood = 0.0;  // summed over chains
};

/// Scaled forward-backward over independent chains, given per-point log
/// emission densities [N, K]. Each chain starts from `initial`.
ForwardBackward forward_backward(const Eigen::MatrixXd& transitions, const Eigen::VectorXd& initial,
                                 const Eigen::MatrixXd& log_emissions, std::span<const Span> chains);

ForwardBackward forward_backward(const HmmModel& model, const Eigen::Ref<const Eigen::MatrixXd>& points,
                                 std::span<const Span> chains);

struct HmmConfig {
    int states = 2;
    int em_steps = 10;
    double tol = 1e-3;  // on the mean per-point log-likelihood
    GmmConfig init;     // emission initialization; `components` is overridden by `states`
};

struct HmmFit {
    HmmModel model;
    ClusterAssignment assignment;
    std::vector<double> log_likelihood;  // mean per point, one entry per evaluated model
};

/// Emission-only EM from a given model: transitions and the initial
/// distribution stay fixed. Stops, keeping the current model, when an update
/// would need a ridged covariance.
HmmFit hmm_em(const Eigen::Ref<const Eigen::MatrixXd>& points, std::span<const Span> chains, HmmModel init,
              const HmmConfig& config);

/// Emissions initialized from a GMM fit, refined by emission-only EM, and
/// decoded with forward-backward posteriors. Points must be in temporal
/// order; `chains` marks the independent sequences.
HmmFit hmm_fit_and_decode(const Eigen::Ref<const Eigen::MatrixXd>& points, std::span<const Span> chains,
                          const Eigen::MatrixXd& transitions, const HmmConfig& config, std::uint64_t seed);

}  // namespace actc
