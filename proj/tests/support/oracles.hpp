#pragma once

// Slow, obviously-correct reference computations used to check the library.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "actcluster/numerics/tensor.hpp"

namespace actc::oracle {

/// ARI from the four pair counts, visiting every pair once.
inline double ari_pairs(std::span<const int> truth, std::span<const int> pred)
{
    double both = 0, only_truth = 0, only_pred = 0, neither = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        for (std::size_t j = i + 1; j < truth.size(); ++j) {
            const bool t = truth[i] == truth[j];
            const bool p = pred[i] == pred[j];
            if (t && p) both += 1;
            else if (t) only_truth += 1;
            else if (p) only_pred += 1;
            else neither += 1;
        }
    }
    const double denom = (both + only_truth) * (only_truth + neither) + (both + only_pred) * (only_pred + neither);
    if (denom == 0.0) return 0.0;
    return 2.0 * (both * neither - only_truth * only_pred) / denom;
}

/// 2 I(U;V) / (H(U) + H(V)) straight from the joint frequencies.
inline double nmi_entropy(std::span<const int> truth, std::span<const int> pred)
{
    // count first and divide once, so a single-cluster partition has p exactly 1
    const double n = static_cast<double>(truth.size());
    std::map<int, double> pu, pv;
    std::map<std::pair<int, int>, double> joint;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        pu[pred[i]] += 1.0;
        pv[truth[i]] += 1.0;
        joint[{pred[i], truth[i]}] += 1.0;
    }
    for (auto& [k, p] : pu) p /= n;
    for (auto& [k, p] : pv) p /= n;
    for (auto& [k, p] : joint) p /= n;
    double hu = 0, hv = 0, mi = 0;
    for (auto [k, p] : pu) hu -= p * std::log(p);
    for (auto [k, p] : pv) hv -= p * std::log(p);
    for (auto [key, p] : joint) mi += p * std::log(p / (pu[key.first] * pv[key.second]));
    if (hu + hv <= 0.0) return 0.0;
    return 2.0 * mi / (hu + hv);
}

/// Best accuracy over every bijection of label ids, by enumeration.
inline double brute_force_accuracy(std::span<const int> truth, std::span<const int> pred)
{
    int k = 0;
    for (int l : truth) k = std::max(k, l + 1);
    for (int l : pred) k = std::max(k, l + 1);
    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t best = 0;
    do {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) hits += perm[static_cast<std::size_t>(pred[i])] == truth[i];
        best = std::max(best, hits);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(truth.size());
}

/// Best total score of a square matrix over all permutations.
inline double brute_force_assignment_score(const Eigen::MatrixXd& score)
{
    std::vector<int> perm(static_cast<std::size_t>(score.rows()));
    std::iota(perm.begin(), perm.end(), 0);
    double best = -1e300;
    do {
        double s = 0;
        for (std::size_t r = 0; r < perm.size(); ++r) s += score(static_cast<Index>(r), perm[r]);
        best = std::max(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

struct PathSums {
    Eigen::MatrixXd posteriors;  // [T, K]
    double log_likelihood = 0.0;
};

/// Sums the joint probability of every K^T state path of one chain.
inline PathSums enumerate_paths(const Eigen::MatrixXd& transitions, const Eigen::VectorXd& initial,
                                const Eigen::MatrixXd& log_emissions)
{
    const Index t_len = log_emissions.rows();
    const Index k = log_emissions.cols();
    const double shift = log_emissions.maxCoeff();
    PathSums out;
    out.posteriors.setZero(t_len, k);
    std::vector<Index> path(static_cast<std::size_t>(t_len), 0);
    double total = 0.0;
    while (true) {
        double p = initial[path[0]] * std::exp(log_emissions(0, path[0]) - shift);
        for (Index t = 1; t < t_len; ++t) {
            p *= transitions(path[static_cast<std::size_t>(t - 1)], path[static_cast<std::size_t>(t)])
                 * std::exp(log_emissions(t, path[static_cast<std::size_t>(t)]) - shift);
        }
        total += p;
        for (Index t = 0; t < t_len; ++t) out.posteriors(t, path[static_cast<std::size_t>(t)]) += p;
        Index pos = 0;
        while (pos < t_len && ++path[static_cast<std::size_t>(pos)] == k) path[static_cast<std::size_t>(pos++)] = 0;
        if (pos == t_len) break;
    }
    out.posteriors /= total;
    out.log_likelihood = std::log(total) + static_cast<double>(t_len) * shift;
    return out;
}

/// Per-point modal label over covering windows by explicit tallies.
inline std::vector<int> vote_per_point(std::span<const int> window_labels, std::span<const Index> starts,
                                       Index window_length, Index points)
{
    std::vector<int> out(static_cast<std::size_t>(points), -1);
    for (Index t = 0; t < points; ++t) {
        std::map<int, int> tally;
        for (std::size_t w = 0; w < starts.size(); ++w) {
            if (starts[w] <= t && t < starts[w] + window_length) ++tally[window_labels[w]];
        }
        int best = -1, best_count = 0;
        for (auto [label, count] : tally) {  // ascending labels: strict > keeps the smallest on ties
            if (count > best_count) {
                best = label;
                best_count = count;
            }
        }
        out[static_cast<std::size_t>(t)] = best;
    }
    return out;
}

}  // namespace actc::oracle
