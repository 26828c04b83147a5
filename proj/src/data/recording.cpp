#include "actcluster/data/recording.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace actc {

void validate(const SensorRecording& r)
{
    const Index t = r.signal.rows();
    if (static_cast<Index>(r.labels.size()) != t) {
        throw std::invalid_argument("recording '" + r.subject_id + "': " + std::to_string(r.labels.size())
                                    + " labels for " + std::to_string(t) + " time points");
    }
    if (!r.timestamps.empty() && static_cast<Index>(r.timestamps.size()) != t) {
        throw std::invalid_argument("recording '" + r.subject_id + "': timestamp count differs from length");
    }
    Index cursor = 0;
    for (const Span& s : r.spans) {
        if (s.begin != cursor || s.end <= s.begin || s.end > t) {
            throw std::invalid_argument("recording '" + r.subject_id + "': spans must tile [0, T) in order");
        }
        cursor = s.end;
    }
    if (cursor != t) throw std::invalid_argument("recording '" + r.subject_id + "': spans do not cover all points");
    for (int l : r.labels) {
        if (l < 0) throw std::invalid_argument("recording '" + r.subject_id + "': negative label");
    }
}

Index Dataset::total_points() const
{
    Index n = 0;
    for (const auto& r : recordings) n += r.length();
    return n;
}

DatasetSpec describe(const Dataset& dataset)
{
    DatasetSpec spec;
    spec.name = dataset.name;
    std::set<int> seen;
    for (const auto& r : dataset.recordings) {
        spec.subjects.push_back(r.subject_id);
        seen.insert(r.labels.begin(), r.labels.end());
        if (spec.channels == 0) spec.channels = r.channels();
        else if (spec.channels != r.channels()) throw std::invalid_argument("recordings disagree on channel count");
    }
    spec.classes = static_cast<int>(std::max<std::size_t>(seen.size(), dataset.label_names.size()));
    if (spec.classes < 2) {
        throw std::invalid_argument("dataset '" + dataset.name + "' has " + std::to_string(spec.classes)
                                    + " classes; at least 2 are required");
    }
    return spec;
}

Dataset subset_subject(const Dataset& dataset, std::size_t recording_index)
{
    Dataset out;
    out.name = dataset.name;
    out.label_names = dataset.label_names;
    out.channel_names = dataset.channel_names;
    out.recordings.push_back(dataset.recordings.at(recording_index));
    return out;
}

}  // namespace actc
