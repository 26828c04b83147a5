#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "actcluster/clustering/gmm.hpp"
#include "actcluster/clustering/hmm.hpp"
#include "actcluster/dimreduce/layout.hpp"
#include "actcluster/encoder/trainer.hpp"

namespace actc {

/// `loss`: weights 2 on S_j, 1 on M_j \ S_j. `algorithm1`: the pseudocode's
/// sticky Mask at 1 and SemiMask \ Mask at 0.5.
enum class MaskSemantics { loss, algorithm1 };
enum class DimReduce { umap, none, mlp };
enum class Clusterer { hmm, gmm };
enum class EvalSetting { sdep, sindep };
enum class GranularityChoice { window, point, both };

struct PipelineConfig {
    std::string data_path;
    int classes = 0;  // 0 = number of classes in the data
    Index window_length = 512;
    Index step = 5;
    int inner_iterations = 10;
    int max_outer = 10;
    double threshold = 0.95;
    EvalSetting setting = EvalSetting::sdep;
    GranularityChoice granularity = GranularityChoice::both;

    bool no_filter = false;
    DimReduce dimreduce = DimReduce::umap;
    Clusterer clusterer = Clusterer::hmm;
    bool baseline = false;
    bool reinit_encoder = false;  // also re-initialize at every inner iteration
    MaskSemantics mask_semantics = MaskSemantics::loss;
    TransitionSemantics transition_semantics = TransitionSemantics::self;
    std::optional<double> self_transition = 0.99;  // nullopt = estimate from labels

    TrainConfig train;
    UmapConfig umap;
    GmmConfig gmm;
    int hmm_em_steps = 10;
    double hmm_tol = 1e-3;
    int threads = 1;
    std::uint64_t seed = 0;
};

/// Throws std::invalid_argument naming the first bad field.
void validate(const PipelineConfig& config);

/// The pared-down variant: no UMAP, no label filtering, step 100.
PipelineConfig baseline_config(PipelineConfig config);

/// Applies `baseline` when set; otherwise returns the config unchanged.
PipelineConfig effective_config(const PipelineConfig& config);

std::string to_string(MaskSemantics v);
std::string to_string(DimReduce v);
std::string to_string(Clusterer v);
std::string to_string(EvalSetting v);
std::string to_string(GranularityChoice v);
std::string to_string(TransitionSemantics v);

MaskSemantics parse_mask_semantics(const std::string& s);
DimReduce parse_dimreduce(const std::string& s);
Clusterer parse_clusterer(const std::string& s);
EvalSetting parse_setting(const std::string& s);
GranularityChoice parse_granularity(const std::string& s);
TransitionSemantics parse_transition_semantics(const std::string& s);

}  // namespace actc
