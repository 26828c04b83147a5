#pragma once

#include <cstdint>
#include <vector>

#include "actcluster/data/recording.hpp"

namespace actc {

struct SyntheticConfig {
    int classes = 3;
    int subjects = 2;
    Index channels = 3;
    Index span_length = 1500;   // time points per activity segment
    int spans_per_subject = 0;  // 0 = one segment per class
    double sample_rate_hz = 50.0;
    // Round frequencies such as 1 Hz at 50 Hz make a step-5 window advance by
    // an exact tenth of a cycle, so windows collapse onto a few phases and the
    // kNN graph splits each class into islands. These values avoid that.
    double base_frequency_hz = 1.3;  // class 0
    double frequency_step_hz = 2.1;  // between consecutive classes, shrunk to stay below 0.4 * rate
    double subject_offset_scale = 0.0;
    double noise_sigma = 0.1;
    std::uint64_t seed = 0;
};

/// Activity frequency in Hz for class k: base + k * step, with the step
/// shrunk when needed so every class stays at or below 0.4 of the sample rate.
double synthetic_frequency(const SyntheticConfig& config, int k);

/// Each activity segment of class k emits sin(2 pi f_k t + phase) per
/// channel, plus a constant per-(subject, channel) offset and Gaussian noise.
/// Segments cycle through shuffled class orders so every class appears.
/// Subject s has offset scale * (s - (S - 1) / 2 + u), u ~ U(-1/4, 1/4), so
/// any two subjects' offsets differ by at least scale / 2 per channel.
Dataset generate_synthetic(const SyntheticConfig& config);

}  // namespace actc
