#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "actcluster/pipeline/config.hpp"

namespace actc {

/// Label-filtering state carried across inner iterations.
///
/// Under `loss` semantics `mask` is M_j (confident and unchanged since the
/// previous iteration) and `semi_mask` is S_j (members of M_j whose label has
/// never changed), so semi_mask is a subset of mask. Under `algorithm1` the
/// roles follow the pseudocode: `mask` only ever loses members, `semi_mask`
/// is the current confident-and-consistent set, and mask is a subset of
/// semi_mask.
struct MaskState {
    int iteration = 0;  // iterations absorbed so far
    std::vector<int> previous;
    std::vector<std::uint8_t> mask;
    std::vector<std::uint8_t> semi_mask;
    std::vector<std::uint8_t> flipped;  // label changed at some iteration so far
    std::vector<double> weights;
    bool fallback = false;  // no window qualified; weights are all 1

    std::size_t mask_size() const;
    std::size_t semi_mask_size() const;
};

/// Absorbs iteration `state.iteration + 1`. `labels` must already be aligned
/// with the previous iteration's cluster ids.
MaskState update_masks(const MaskState& state, std::span<const int> labels, std::span<const double> confidences,
                       double threshold, MaskSemantics semantics = MaskSemantics::loss);

}  // namespace actc
