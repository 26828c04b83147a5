#pragma once

#include <span>
#include <vector>

#include "actcluster/data/windows.hpp"

namespace actc {

/// Per-time-point prediction for one subject: the modal label over every
/// window that covers the point, ties to the smallest label, -1 where no
/// window covers the point. `starts` are window offsets, all of `window_length`.
std::vector<int> pointwise_labels(std::span<const int> window_predictions, std::span<const Index> starts,
                                  Index window_length, Index points);

/// Point-wise true and predicted labels over the covered points of a window
/// set, concatenated in (subject, time) order.
struct PointLabels {
    std::vector<int> truth;
    std::vector<int> predicted;
    std::vector<Index> per_subject;  // covered points per subject
};

PointLabels pointwise_from_windows(const WindowSet& windows, std::span<const int> window_predictions);

}  // namespace actc
