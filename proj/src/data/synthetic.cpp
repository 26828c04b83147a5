#include "actcluster/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "actcluster/numerics/random.hpp"

namespace actc {

double synthetic_frequency(const SyntheticConfig& config, int k)
{
    const double top = 0.4 * config.sample_rate_hz;
    const double room = (top - config.base_frequency_hz) / std::max(1, config.classes - 1);
    return config.base_frequency_hz + std::min(config.frequency_step_hz, room) * k;
}

Dataset generate_synthetic(const SyntheticConfig& config)
{
    if (config.classes < 2) throw std::invalid_argument("synthetic data needs at least 2 classes");
    if (config.subjects < 1 || config.channels < 1 || config.span_length < 1) {
        throw std::invalid_argument("synthetic subjects, channels and span length must be positive");
    }
    if (!(config.sample_rate_hz > 0.0)) throw std::invalid_argument("sample rate must be positive");
    if (!(config.base_frequency_hz > 0.0 && config.frequency_step_hz > 0.0
          && config.base_frequency_hz < 0.4 * config.sample_rate_hz)) {
        throw std::invalid_argument("synthetic frequencies must be positive and below 0.4 of the sample rate");
    }

    Dataset ds;
    ds.name = "synthetic";
    for (int k = 0; k < config.classes; ++k) ds.label_names.push_back("class" + std::to_string(k));
    for (Index c = 0; c < config.channels; ++c) ds.channel_names.push_back("c" + std::to_string(c));

    const int segments = config.spans_per_subject > 0 ? config.spans_per_subject : config.classes;
    const double two_pi = 6.283185307179586;
    for (int s = 0; s < config.subjects; ++s) {
        Rng rng(derive_seed(config.seed, seed_stream::synthetic, static_cast<std::uint64_t>(s)));
        Eigen::VectorXd offset(config.channels);
        for (Index c = 0; c < config.channels; ++c) {
            const double centred = s - 0.5 * (config.subjects - 1);
            offset[c] = config.subject_offset_scale * (centred + uniform(rng, -0.25, 0.25));
        }

        std::vector<int> order;
        std::vector<int> perm(static_cast<std::size_t>(config.classes));
        while (static_cast<int>(order.size()) < segments) {
            std::iota(perm.begin(), perm.end(), 0);
            shuffle(perm.begin(), perm.end(), rng);
            order.insert(order.end(), perm.begin(), perm.end());
        }
        order.resize(static_cast<std::size_t>(segments));

        SensorRecording r;
        r.subject_id = "s" + std::to_string(s);
        r.sample_rate_hz = config.sample_rate_hz;
        const Index total = config.span_length * segments;
        r.signal.resize(total, config.channels);
        r.labels.resize(static_cast<std::size_t>(total));
        r.timestamps.resize(static_cast<std::size_t>(total));
        for (int seg = 0; seg < segments; ++seg) {
            const int k = order[static_cast<std::size_t>(seg)];
            const double f = synthetic_frequency(config, k);
            Eigen::VectorXd phase(config.channels);
            for (Index c = 0; c < config.channels; ++c) phase[c] = uniform(rng, 0.0, two_pi);
            for (Index i = 0; i < config.span_length; ++i) {
                const Index t = seg * config.span_length + i;
                const double time = static_cast<double>(t) / config.sample_rate_hz;
                for (Index c = 0; c < config.channels; ++c) {
                    r.signal(t, c) = std::sin(two_pi * f * time + phase[c]) + offset[c]
                                     + config.noise_sigma * standard_normal(rng);
                }
                r.labels[static_cast<std::size_t>(t)] = k;
                r.timestamps[static_cast<std::size_t>(t)] = time;
            }
        }
        r.spans.push_back({0, total});
        ds.recordings.push_back(std::move(r));
    }
    return ds;
}

}  // namespace actc
