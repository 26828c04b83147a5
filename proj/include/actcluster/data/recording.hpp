#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace actc {

using Index = Eigen::Index;

/// Half-open run [begin, end) of consecutive retained time points.
struct Span {
    Index begin = 0;
    Index end = 0;

    Index length() const { return end - begin; }
    bool operator==(const Span&) const = default;
};

/// One subject's multichannel signal. Time points with missing values or
/// labels are already removed; `spans` records where those removals (or a
/// change of subject in the source file) broke contiguity.
struct SensorRecording {
    std::string subject_id;
    double sample_rate_hz = 0.0;  // 0 when unknown
    Eigen::MatrixXd signal;       // [T, C], one row per time point
    std::vector<int> labels;      // [T], dense class indices
    std::vector<double> timestamps;
    std::vector<Span> spans;

    Index length() const { return signal.rows(); }
    Index channels() const { return signal.cols(); }
};

/// Checks the SensorRecording invariants; throws std::invalid_argument.
void validate(const SensorRecording& recording);

struct Dataset {
    std::string name;
    std::vector<std::string> label_names;    // index -> original label
    std::vector<std::string> channel_names;
    std::vector<SensorRecording> recordings;  // one per subject

    Index total_points() const;
};

struct NormStats {
    Eigen::VectorXd mean;  // per channel
    Eigen::VectorXd std;   // per channel
};

struct DatasetSpec {
    std::string name;
    int classes = 0;
    std::vector<std::string> subjects;
    Index channels = 0;
    NormStats normalization;
};

/// Summary of a dataset; throws if it has fewer than two classes.
/// Normalization statistics are left empty; they depend on the windowing.
DatasetSpec describe(const Dataset& dataset);

/// Restricts a dataset to one subject, keeping the label vocabulary.
Dataset subset_subject(const Dataset& dataset, std::size_t recording_index);

}  // namespace actc
