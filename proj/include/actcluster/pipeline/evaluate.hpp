#pragma once

#include <string>
#include <vector>

#include "actcluster/data/recording.hpp"
#include "actcluster/metrics/metrics.hpp"
#include "actcluster/pipeline/pipeline.hpp"

namespace actc {

/// One clustered window, for CSV export.
struct WindowAssignment {
    std::string subject;
    Index start = 0;
    int label = 0;
    double confidence = 0.0;
};

/// Final embedding of one pipeline run (one per subject when subject-dependent).
struct EmbeddingDump {
    std::vector<WindowAssignment> windows;
    Eigen::MatrixXd points;
};

struct RunRecord {
    PipelineConfig config;  // as given; `effective` holds what actually ran
    PipelineConfig effective;
    std::string dataset;
    std::vector<MetricsReport> reports;  // one per requested granularity
    Timing timing;
    std::vector<std::string> warnings;
    std::vector<WindowAssignment> assignments;
    std::vector<EmbeddingDump> embeddings;
    std::vector<IterationLog> iterations;
};

/// Runs the pipeline under `config.setting`: subject-dependent clusters each
/// subject on its own (normalized per subject) and averages metrics weighted
/// by windows or covered time points; subject-independent clusters the pooled
/// data once. Window-wise and point-wise metrics are both computed and the
/// ones named by `config.granularity` are reported.
RunRecord evaluate(const PipelineConfig& config, const Dataset& data);

/// Both settings under the given config; reports ordered
/// (sdep, window), (sdep, point), (sindep, window), (sindep, point).
RunRecord evaluate_table2(const PipelineConfig& config, const Dataset& data);

}  // namespace actc
