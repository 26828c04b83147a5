#include "actcluster/data/windows.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace actc {

Index window_count(Index span_length, Index window_length, Index step)
{
    if (window_length < 1 || step < 1) throw std::invalid_argument("window length and step must be >= 1");
    if (span_length < window_length) return 0;
    return (span_length - window_length) / step + 1;
}

int majority_window_label(std::span<const int> labels)
{
    if (labels.empty()) throw std::invalid_argument("majority label of an empty window");
    int max_label = 0;
    for (int l : labels) {
        if (l < 0) throw std::invalid_argument("negative label in window");
        max_label = std::max(max_label, l);
    }
    std::vector<Index> counts(static_cast<std::size_t>(max_label) + 1, 0);
    for (int l : labels) ++counts[static_cast<std::size_t>(l)];
    // max_element returns the first maximum, i.e. the smallest label on ties
    return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

namespace {

// Number of windows covering each time point of a recording.
std::vector<Index> coverage(const SensorRecording& r, Index w, Index step)
{
    std::vector<Index> diff(static_cast<std::size_t>(r.length()) + 1, 0);
    for (const Span& s : r.spans) {
        const Index n = window_count(s.length(), w, step);
        for (Index k = 0; k < n; ++k) {
            const Index start = s.begin + k * step;
            ++diff[static_cast<std::size_t>(start)];
            --diff[static_cast<std::size_t>(start + w)];
        }
    }
    std::vector<Index> cover(static_cast<std::size_t>(r.length()));
    Index running = 0;
    for (Index t = 0; t < r.length(); ++t) {
        running += diff[static_cast<std::size_t>(t)];
        cover[static_cast<std::size_t>(t)] = running;
    }
    return cover;
}

}  // namespace

NormStats windowed_normalization(const Dataset& dataset, Index window_length, Index step)
{
    Index channels = dataset.recordings.empty() ? 0 : dataset.recordings.front().channels();
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(channels);
    double weight = 0.0;
    std::vector<std::vector<Index>> covers;
    for (const auto& r : dataset.recordings) {
        covers.push_back(coverage(r, window_length, step));
        for (Index t = 0; t < r.length(); ++t) {
            const double c = static_cast<double>(covers.back()[static_cast<std::size_t>(t)]);
            if (c == 0) continue;
            sum += c * r.signal.row(t).transpose();
            weight += c;
        }
    }
    NormStats stats{Eigen::VectorXd::Zero(channels), Eigen::VectorXd::Ones(channels)};
    if (weight == 0.0) return stats;
    stats.mean = sum / weight;
    Eigen::VectorXd ss = Eigen::VectorXd::Zero(channels);
    for (std::size_t i = 0; i < dataset.recordings.size(); ++i) {
        const auto& r = dataset.recordings[i];
        for (Index t = 0; t < r.length(); ++t) {
            const double c = static_cast<double>(covers[i][static_cast<std::size_t>(t)]);
            if (c == 0) continue;
            ss += c * (r.signal.row(t).transpose() - stats.mean).cwiseAbs2();
        }
    }
    stats.std = (ss / weight).cwiseSqrt();
    for (Index c = 0; c < channels; ++c) {
        if (!(stats.std[c] > 0.0)) stats.std[c] = 1.0;
    }
    return stats;
}

WindowSet make_windows(const Dataset& dataset, Index window_length, Index step, const NormStats* stats)
{
    if (window_length < 1 || step < 1) throw std::invalid_argument("window length and step must be >= 1");
    WindowSet ws;
    ws.window_length = window_length;
    ws.step = step;
    ws.classes = static_cast<int>(dataset.label_names.size());
    ws.channels = dataset.recordings.empty() ? static_cast<Index>(dataset.channel_names.size())
                                             : dataset.recordings.front().channels();
    ws.normalization = stats ? *stats : windowed_normalization(dataset, window_length, step);
    if (ws.normalization.mean.size() != ws.channels || ws.normalization.std.size() != ws.channels) {
        throw std::invalid_argument("normalization statistics do not match channel count");
    }

    for (const auto& r : dataset.recordings) {
        validate(r);
        if (r.channels() != ws.channels) throw std::invalid_argument("recordings disagree on channel count");
        const std::size_t subject = ws.subject_ids.size();
        ws.subject_ids.push_back(r.subject_id);
        Eigen::MatrixXd normalized =
            (r.signal.rowwise() - ws.normalization.mean.transpose()).array().rowwise()
            / ws.normalization.std.transpose().array();
        ws.signals.push_back(std::move(normalized));
        ws.point_labels.push_back(r.labels);
        for (int l : r.labels) ws.classes = std::max(ws.classes, l + 1);
        for (std::size_t s = 0; s < r.spans.size(); ++s) {
            const Span& span = r.spans[s];
            const Index n = window_count(span.length(), window_length, step);
            for (Index k = 0; k < n; ++k) {
                const Index start = span.begin + k * step;
                ws.windows.push_back({subject, start, s});
                ws.labels.push_back(majority_window_label(
                    std::span<const int>(r.labels).subspan(static_cast<std::size_t>(start),
                                                           static_cast<std::size_t>(window_length))));
            }
        }
    }
    return ws;
}

Tensor WindowSet::gather(std::span<const Index> indices) const
{
    const Index b = static_cast<Index>(indices.size());
    Tensor out({b, channels, window_length});
    for (Index i = 0; i < b; ++i) {
        const WindowRef& ref = windows.at(static_cast<std::size_t>(indices[static_cast<std::size_t>(i)]));
        const Eigen::MatrixXd& sig = signals[ref.subject];
        for (Index c = 0; c < channels; ++c) {
            double* dst = out.data().data() + (i * channels + c) * window_length;
            for (Index t = 0; t < window_length; ++t) dst[t] = sig(ref.start + t, c);
        }
    }
    return out;
}

Tensor WindowSet::gather_range(Index first, Index count) const
{
    std::vector<Index> idx(static_cast<std::size_t>(count));
    for (Index i = 0; i < count; ++i) idx[static_cast<std::size_t>(i)] = first + i;
    return gather(idx);
}

std::vector<Span> WindowSet::chains() const
{
    std::vector<Span> out;
    for (Index i = 0; i < size(); ++i) {
        const auto& w = windows[static_cast<std::size_t>(i)];
        const bool continues = i > 0 && windows[static_cast<std::size_t>(i - 1)].subject == w.subject
                               && windows[static_cast<std::size_t>(i - 1)].span == w.span;
        if (continues) out.back().end = i + 1;
        else out.push_back({i, i + 1});
    }
    return out;
}

Index WindowSet::covered_points() const
{
    Index total = 0;
    std::vector<std::vector<char>> seen(signals.size());
    for (std::size_t s = 0; s < signals.size(); ++s) seen[s].assign(static_cast<std::size_t>(signals[s].rows()), 0);
    for (const auto& w : windows) {
        for (Index t = w.start; t < w.start + window_length; ++t) {
            char& flag = seen[w.subject][static_cast<std::size_t>(t)];
            if (!flag) {
                flag = 1;
                ++total;
            }
        }
    }
    return total;
}

}  // namespace actc
