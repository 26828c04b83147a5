#include "actcluster/pipeline/masks.hpp"

#include <algorithm>
#include <stdexcept>

namespace actc {

std::size_t MaskState::mask_size() const
{
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

std::size_t MaskState::semi_mask_size() const
{
    return static_cast<std::size_t>(std::count(semi_mask.begin(), semi_mask.end(), std::uint8_t{1}));
}

MaskState update_masks(const MaskState& state, std::span<const int> labels, std::span<const double> confidences,
                       double threshold, MaskSemantics semantics)
{
    const std::size_t n = labels.size();
    if (confidences.size() != n) throw std::invalid_argument("update_masks: one confidence per label required");
    const bool first = state.iteration == 0;
    if (!first && state.previous.size() != n) throw std::invalid_argument("update_masks: window count changed");

    MaskState next;
    next.iteration = state.iteration + 1;
    next.previous.assign(labels.begin(), labels.end());
    next.mask.assign(n, 0);
    next.semi_mask.assign(n, 0);
    next.flipped = first ? std::vector<std::uint8_t>(n, 0) : state.flipped;
    next.weights.assign(n, 0.0);

    for (std::size_t x = 0; x < n; ++x) {
        const bool changed = !first && labels[x] != state.previous[x];
        if (changed) next.flipped[x] = 1;
        const bool good = confidences[x] >= threshold && !changed;
        if (semantics == MaskSemantics::loss) {
            next.mask[x] = good;
            next.semi_mask[x] = good && !next.flipped[x];
            next.weights[x] = next.semi_mask[x] ? 2.0 : next.mask[x] ? 1.0 : 0.0;
        } else {
            next.mask[x] = good && (first || state.mask[x]);
            next.semi_mask[x] = good;
            next.weights[x] = next.mask[x] ? 1.0 : next.semi_mask[x] ? 0.5 : 0.0;
        }
    }
    if (std::all_of(next.weights.begin(), next.weights.end(), [](double w) { return w == 0.0; })) {
        std::fill(next.weights.begin(), next.weights.end(), 1.0);
        next.fallback = true;
    }
    return next;
}

}  // namespace actc
