#include "actcluster/metrics/pointwise.hpp"

#include <algorithm>
#include <stdexcept>

namespace actc {

std::vector<int> pointwise_labels(std::span<const int> window_predictions, std::span<const Index> starts,
                                  Index window_length, Index points)
{
    if (window_predictions.size() != starts.size()) throw std::invalid_argument("one start offset per window required");
    int labels = 0;
    for (int p : window_predictions) {
        if (p < 0) throw std::invalid_argument("negative window prediction");
        labels = std::max(labels, p + 1);
    }
    // votes[t * labels + c]; windows are few enough relative to T * K
    std::vector<Index> votes(static_cast<std::size_t>(points * labels), 0);
    for (std::size_t w = 0; w < starts.size(); ++w) {
        const Index begin = starts[w];
        if (begin < 0 || begin + window_length > points) throw std::invalid_argument("window outside the recording");
        for (Index t = begin; t < begin + window_length; ++t) ++votes[static_cast<std::size_t>(t * labels + window_predictions[w])];
    }
    std::vector<int> out(static_cast<std::size_t>(points), -1);
    for (Index t = 0; t < points; ++t) {
        Index best = 0;
        for (int c = 0; c < labels; ++c) {
            const Index v = votes[static_cast<std::size_t>(t * labels + c)];
            if (v > best) {
                best = v;
                out[static_cast<std::size_t>(t)] = c;
            }
        }
    }
    return out;
}

PointLabels pointwise_from_windows(const WindowSet& windows, std::span<const int> window_predictions)
{
    if (static_cast<Index>(window_predictions.size()) != windows.size()) {
        throw std::invalid_argument("one prediction per window required");
    }
    PointLabels out;
    std::size_t w = 0;
    for (std::size_t s = 0; s < windows.subject_ids.size(); ++s) {
        std::vector<Index> starts;
        std::vector<int> preds;
        for (; w < windows.windows.size() && windows.windows[w].subject == s; ++w) {
            starts.push_back(windows.windows[w].start);
            preds.push_back(window_predictions[w]);
        }
        const auto& truth = windows.point_labels[s];
        const auto points = pointwise_labels(preds, starts, windows.window_length, static_cast<Index>(truth.size()));
        Index covered = 0;
        for (std::size_t t = 0; t < points.size(); ++t) {
            if (points[t] < 0) continue;
            out.truth.push_back(truth[t]);
            out.predicted.push_back(points[t]);
            ++covered;
        }
        out.per_subject.push_back(covered);
    }
    return out;
}

}  // namespace actc
