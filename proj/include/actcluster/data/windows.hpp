#pragma once

#include <span>
#include <string>
#include <vector>

#include "actcluster/data/recording.hpp"
#include "actcluster/numerics/tensor.hpp"

namespace actc {

/// Windows per contiguous span: floor((T - W) / step) + 1, or 0 when T < W.
Index window_count(Index span_length, Index window_length, Index step);

/// Modal label; ties go to the smallest class index.
int majority_window_label(std::span<const int> labels);

struct WindowRef {
    std::size_t subject = 0;  // index into WindowSet::subject_ids
    Index start = 0;          // offset into that subject's retained time points
    std::size_t span = 0;     // index of the contiguous span the window lies in
};

/// Overlapping fixed-length windows over z-normalized recordings. Windows
/// are ordered by (subject, start) and never cross a span boundary. The
/// window tensors are materialized on demand through gather().
struct WindowSet {
    Index window_length = 0;
    Index step = 0;
    Index channels = 0;
    int classes = 0;
    std::vector<std::string> subject_ids;
    std::vector<Eigen::MatrixXd> signals;         // normalized, per subject [T, C]
    std::vector<std::vector<int>> point_labels;  // per subject [T]
    std::vector<WindowRef> windows;
    std::vector<int> labels;                      // majority label per window
    NormStats normalization;

    Index size() const { return static_cast<Index>(windows.size()); }

    /// Stacks the selected windows into a [B, C, W] tensor.
    Tensor gather(std::span<const Index> indices) const;
    Tensor gather_range(Index first, Index count) const;

    /// Maximal runs [begin, end) of window indices that are temporally
    /// consecutive (same subject and span).
    std::vector<Span> chains() const;

    /// Number of distinct time points covered by at least one window.
    Index covered_points() const;
};

/// Per-channel mean/std of the windowed data, each time point weighted by
/// the number of windows covering it.
NormStats windowed_normalization(const Dataset& dataset, Index window_length, Index step);

/// Builds windows over every recording in `dataset`. When `stats` is null
/// the normalization is computed from the windowed data itself.
WindowSet make_windows(const Dataset& dataset, Index window_length, Index step, const NormStats* stats = nullptr);

}  // namespace actc
