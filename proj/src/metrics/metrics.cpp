#include "actcluster/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "actcluster/metrics/hungarian.hpp"

namespace actc {

namespace {

double choose2(double x)
{
    return 0.5 * x * (x - 1.0);
}

void check_pair(std::span<const int> truth, std::span<const int> predicted)
{
    if (truth.size() != predicted.size()) throw std::invalid_argument("label and prediction lengths differ");
    if (truth.empty()) throw std::invalid_argument("metrics of an empty labeling");
}

}  // namespace

ContingencyTable contingency_from_counts(Eigen::MatrixXd counts)
{
    ContingencyTable t;
    t.cluster_totals = counts.rowwise().sum();
    t.class_totals = counts.colwise().sum().transpose();
    t.total = counts.sum();
    t.counts = std::move(counts);
    return t;
}

ContingencyTable contingency(std::span<const int> truth, std::span<const int> predicted, int min_classes,
                             int min_clusters)
{
    if (truth.size() != predicted.size()) throw std::invalid_argument("label and prediction lengths differ");
    int classes = min_classes;
    int clusters = min_clusters;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || predicted[i] < 0) throw std::invalid_argument("negative label in contingency table");
        classes = std::max(classes, truth[i] + 1);
        clusters = std::max(clusters, predicted[i] + 1);
    }
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(clusters, classes);
    for (std::size_t i = 0; i < truth.size(); ++i) counts(predicted[i], truth[i]) += 1.0;
    return contingency_from_counts(std::move(counts));
}

std::vector<int> align_labels(const ContingencyTable& table)
{
    std::vector<int> mapping = lexicographic_best_assignment(table.counts);
    mapping.resize(static_cast<std::size_t>(table.clusters()));
    return mapping;
}

std::vector<int> apply_alignment(std::span<const int> predicted, std::span<const int> mapping)
{
    std::vector<int> out(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const int p = predicted[i];
        if (p < 0 || static_cast<std::size_t>(p) >= mapping.size()) {
            throw std::invalid_argument("prediction outside the alignment map");
        }
        out[i] = mapping[static_cast<std::size_t>(p)];
    }
    return out;
}

double accuracy(std::span<const int> truth, std::span<const int> predicted)
{
    check_pair(truth, predicted);
    const ContingencyTable t = contingency(truth, predicted);
    const auto mapping = align_labels(t);
    double matched = 0.0;
    for (int i = 0; i < t.clusters(); ++i) {
        const int j = mapping[static_cast<std::size_t>(i)];
        if (j < t.classes()) matched += t.counts(i, j);
    }
    return matched / t.total;
}

double macro_f1(std::span<const int> truth, std::span<const int> aligned)
{
    check_pair(truth, aligned);
    const ContingencyTable t = contingency(truth, aligned);
    const int classes = std::max(t.classes(), t.clusters());
    double sum = 0.0;
    for (int c = 0; c < classes; ++c) {
        const double tp = c < t.clusters() && c < t.classes() ? t.counts(c, c) : 0.0;
        const double support = c < t.classes() ? t.class_totals[c] : 0.0;
        const double predicted = c < t.clusters() ? t.cluster_totals[c] : 0.0;
        if (support == 0.0) continue;  // zero-support classes contribute 0
        const double denom = support + predicted;
        sum += denom > 0.0 ? 2.0 * tp / denom : 0.0;
    }
    return sum / classes;
}

double ari(const ContingencyTable& t)
{
    if (t.total < 2.0) return 0.0;
    double sum_ij = 0.0;
    for (Eigen::Index i = 0; i < t.counts.rows(); ++i)
        for (Eigen::Index j = 0; j < t.counts.cols(); ++j) sum_ij += choose2(t.counts(i, j));
    double sum_i = 0.0;
    for (Eigen::Index i = 0; i < t.cluster_totals.size(); ++i) sum_i += choose2(t.cluster_totals[i]);
    double sum_j = 0.0;
    for (Eigen::Index j = 0; j < t.class_totals.size(); ++j) sum_j += choose2(t.class_totals[j]);
    const double expected = sum_i * sum_j / choose2(t.total);
    const double denom = 0.5 * (sum_i + sum_j) - expected;
    if (denom == 0.0) return 0.0;
    return (sum_ij - expected) / denom;
}

double nmi(const ContingencyTable& t)
{
    if (t.total <= 0.0) return 0.0;
    const double n = t.total;
    double mutual = 0.0;
    for (Eigen::Index i = 0; i < t.counts.rows(); ++i) {
        for (Eigen::Index j = 0; j < t.counts.cols(); ++j) {
            const double nij = t.counts(i, j);
            if (nij > 0.0) mutual += nij * std::log(n * nij / (t.cluster_totals[i] * t.class_totals[j]));
        }
    }
    double entropy = 0.0;
    for (Eigen::Index i = 0; i < t.cluster_totals.size(); ++i) {
        const double ni = t.cluster_totals[i];
        if (ni > 0.0) entropy -= ni * std::log(ni / n);
    }
    for (Eigen::Index j = 0; j < t.class_totals.size(); ++j) {
        const double nj = t.class_totals[j];
        if (nj > 0.0) entropy -= nj * std::log(nj / n);
    }
    if (entropy <= 0.0) return 0.0;
    return std::clamp(2.0 * mutual / entropy, 0.0, 1.0);
}

MetricValues evaluate_labels(std::span<const int> truth, std::span<const int> predicted)
{
    check_pair(truth, predicted);
    const ContingencyTable t = contingency(truth, predicted);
    const auto mapping = align_labels(t);
    const auto aligned = apply_alignment(predicted, mapping);
    MetricValues m;
    m.acc = accuracy(truth, predicted);
    m.f1 = macro_f1(truth, aligned);
    m.ari = ari(t);
    m.nmi = nmi(t);
    return m;
}

MetricValues aggregate_subject_dependent(std::span<const MetricValues> per_subject, std::span<const double> weights)
{
    if (per_subject.size() != weights.size()) throw std::invalid_argument("one weight per subject required");
    if (per_subject.empty()) throw std::invalid_argument("aggregation needs at least one subject");
    double total = 0.0;
    MetricValues m;
    for (std::size_t s = 0; s < per_subject.size(); ++s) {
        const double w = weights[s];
        if (w < 0.0) throw std::invalid_argument("negative subject weight");
        total += w;
        m.acc += w * per_subject[s].acc;
        m.nmi += w * per_subject[s].nmi;
        m.ari += w * per_subject[s].ari;
        m.f1 += w * per_subject[s].f1;
    }
    if (total <= 0.0) throw std::invalid_argument("subject weights sum to zero");
    m.acc /= total;
    m.nmi /= total;
    m.ari /= total;
    m.f1 /= total;
    return m;
}

std::string to_string(SubjectSetting s)
{
    return s == SubjectSetting::dependent ? "dependent" : "independent";
}

std::string to_string(Granularity g)
{
    return g == Granularity::window ? "window" : "point";
}

}  // namespace actc
