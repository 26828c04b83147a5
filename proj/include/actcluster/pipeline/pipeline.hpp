#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "actcluster/clustering/hmm.hpp"
#include "actcluster/data/windows.hpp"
#include "actcluster/pipeline/config.hpp"
#include "actcluster/pipeline/masks.hpp"

namespace actc {

/// Wall-clock seconds per phase. Encoding counts as training.
struct PhaseTiming {
    double train = 0.0;
    double reduce = 0.0;
    double cluster = 0.0;

    PhaseTiming& operator+=(const PhaseTiming& o);
};

struct IterationLog {
    int repetition = 0;
    int iteration = 0;
    std::size_t mask = 0;
    std::size_t semi_mask = 0;
    bool fallback = false;
    double final_loss = 0.0;  // last epoch, 0 when no training ran
};

/// Window -> most recent confident label, with |Final| after each repetition.
struct FinalTable {
    std::vector<int> labels;  // -1 = absent
    std::vector<std::size_t> sizes;

    std::size_t size() const;
};

struct InnerResult {
    ClusterAssignment assignment;  // clustering of the last iteration
    MaskState masks;               // after the last iteration
    Eigen::MatrixXd embedding;     // the space that was clustered
};

/// Everything a single pipeline run accumulates besides its labels.
struct RunLog {
    PhaseTiming timing;
    std::vector<IterationLog> iterations;
    std::vector<std::string> warnings;
    bool keep_labels = false;                 // record c(x) of every iteration
    std::vector<std::vector<int>> labels;     // filled when keep_labels is set
};

/// Counter space for the seeds of repetition r, iteration i.
std::uint64_t seed_counter(int repetition, int iteration);

/// Relabels `labels` (and permutes posterior columns) so they agree as much
/// as possible with `reference` on the windows where reference >= 0.
void align_to_reference(ClusterAssignment& assignment, std::span<const int> reference, int classes);

/// One repetition: `inner_iterations` rounds of embed -> reduce -> cluster ->
/// masks -> pseudo-label training. The encoder is re-initialized on entry
/// (and every iteration with `reinit_encoder`).
InnerResult run_inner_loop(const PipelineConfig& config, const WindowSet& windows, std::uint64_t seed,
                           int repetition, RunLog& log);

struct PipelineResult {
    std::vector<int> labels;  // Final[x], else the last repetition's c(x)
    std::vector<double> confidence;
    FinalTable final_table;
    int repetitions = 0;
    bool cap_reached = false;
    Eigen::MatrixXd embedding;
    RunLog log;
};

/// Repeats the inner loop while |Final| strictly increases, at most
/// `max_outer` times.
PipelineResult run_outer_loop(const PipelineConfig& config, const WindowSet& windows, std::uint64_t seed);

/// The pipeline without UMAP or label filtering. Windows must use step 100.
PipelineResult run_baseline(const PipelineConfig& config, const WindowSet& windows, std::uint64_t seed);

}  // namespace actc
