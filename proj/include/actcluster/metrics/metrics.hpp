#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace actc {

/// counts(i, j) = number of points in predicted cluster i and true class j.
struct ContingencyTable {
    Eigen::MatrixXd counts;
    Eigen::VectorXd cluster_totals;  // n_i
    Eigen::VectorXd class_totals;    // n_j
    double total = 0.0;              // n

    int clusters() const { return static_cast<int>(counts.rows()); }
    int classes() const { return static_cast<int>(counts.cols()); }
};

/// Builds the table; sizes grow to cover the largest label seen when the
/// given minimum sizes are smaller. Labels must be non-negative.
ContingencyTable contingency(std::span<const int> truth, std::span<const int> predicted, int min_classes = 0,
                             int min_clusters = 0);
ContingencyTable contingency_from_counts(Eigen::MatrixXd counts);

/// Cluster -> class map maximizing matched points, lexicographically
/// smallest among optima. Clusters beyond the class count map to padding
/// ids >= classes().
std::vector<int> align_labels(const ContingencyTable& table);

/// Relabels predictions through a cluster -> class map.
std::vector<int> apply_alignment(std::span<const int> predicted, std::span<const int> mapping);

/// Fraction of points matched after the accuracy-maximizing alignment.
double accuracy(std::span<const int> truth, std::span<const int> predicted);

/// Unweighted mean of per-class F1 over every class id that occurs in
/// either argument; classes without true support score 0. `aligned` must
/// already be expressed in class ids.
double macro_f1(std::span<const int> truth, std::span<const int> aligned);

/// Adjusted Rand index from pair counts; 0 when the denominator vanishes.
double ari(const ContingencyTable& table);

/// 2 I(U;V) / (H(U) + H(V)) with 0 log 0 = 0; 0 when both entropies vanish.
double nmi(const ContingencyTable& table);

struct MetricValues {
    double acc = 0.0;
    double nmi = 0.0;
    double ari = 0.0;
    double f1 = 0.0;
};

/// All four metrics for one labeling.
MetricValues evaluate_labels(std::span<const int> truth, std::span<const int> predicted);

/// Weighted arithmetic mean of each metric; throws on zero total weight.
MetricValues aggregate_subject_dependent(std::span<const MetricValues> per_subject, std::span<const double> weights);

enum class SubjectSetting { dependent, independent };
enum class Granularity { window, point };

std::string to_string(SubjectSetting s);
std::string to_string(Granularity g);

struct SubjectMetrics {
    std::string subject;
    double weight = 0.0;  // windows or time points, per granularity
    MetricValues metrics;
};

struct Timing {
    double train = 0.0;
    double umap = 0.0;
    double cluster = 0.0;
    double total = 0.0;
    double per_point = 0.0;
};

/// The four reported quantities, tagged with the evaluation setting.
struct MetricsReport {
    std::string dataset;
    SubjectSetting subject = SubjectSetting::dependent;
    Granularity granularity = Granularity::window;
    MetricValues metrics;
    ContingencyTable contingency;  // pooled over subjects
    std::vector<SubjectMetrics> per_subject;
    Timing timing;
};

}  // namespace actc
