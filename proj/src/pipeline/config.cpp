#include "actcluster/pipeline/config.hpp"

#include <stdexcept>

namespace actc {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why)
{
    throw std::invalid_argument("config " + field + ": " + why);
}

template <typename E, std::size_t N>
E parse_enum(const std::string& s, const char* field, const std::pair<const char*, E> (&names)[N])
{
    for (const auto& [name, value] : names)
        if (s == name) return value;
    std::string options;
    for (const auto& entry : names) options += std::string(options.empty() ? "" : "|") + entry.first;
    bad(field, "'" + s + "' is not one of " + options);
}

}  // namespace

void validate(const PipelineConfig& c)
{
    if (c.classes < 0) bad("k", "must be >= 2 (or 0 to take it from the data)");
    if (c.classes == 1) bad("k", "must be >= 2");
    if (c.window_length < 1) bad("window_length", "must be positive");
    if (c.step < 1) bad("step", "must be positive");
    if (c.inner_iterations < 1) bad("inner_iterations", "must be >= 1");
    if (c.max_outer < 1) bad("max_outer", "must be >= 1");
    if (!(c.threshold > 0.0 && c.threshold < 1.0)) bad("threshold", "must lie in (0, 1)");
    if (c.self_transition && !(*c.self_transition > 0.0 && *c.self_transition < 1.0 + 1e-12)) {
        bad("self_transition", "must lie in (0, 1]");
    }
    if (c.train.epochs < 1) bad("epochs", "must be >= 1");
    if (c.train.batch_size < 2) bad("batch_size", "must be >= 2 (batchnorm needs batch statistics)");
    if (c.umap.n_neighbors < 1) bad("n_neighbors", "must be positive");
    if (c.threads < 1) bad("threads", "must be >= 1");
}

PipelineConfig baseline_config(PipelineConfig c)
{
    c.dimreduce = DimReduce::none;
    c.no_filter = true;
    c.step = 100;
    c.baseline = false;
    return c;
}

PipelineConfig effective_config(const PipelineConfig& c)
{
    return c.baseline ? baseline_config(c) : c;
}

namespace {

const std::pair<const char*, MaskSemantics> kMask[] = {{"loss", MaskSemantics::loss},
                                                       {"algorithm1", MaskSemantics::algorithm1}};
const std::pair<const char*, DimReduce> kDim[] = {
    {"umap", DimReduce::umap}, {"none", DimReduce::none}, {"mlp", DimReduce::mlp}};
const std::pair<const char*, Clusterer> kClust[] = {{"hmm", Clusterer::hmm}, {"gmm", Clusterer::gmm}};
const std::pair<const char*, EvalSetting> kSetting[] = {{"sdep", EvalSetting::sdep}, {"sindep", EvalSetting::sindep}};
const std::pair<const char*, GranularityChoice> kGran[] = {{"window", GranularityChoice::window},
                                                          {"point", GranularityChoice::point},
                                                          {"both", GranularityChoice::both}};
const std::pair<const char*, TransitionSemantics> kTrans[] = {{"self", TransitionSemantics::self},
                                                              {"paper-verbatim", TransitionSemantics::paper_verbatim}};

template <typename E, std::size_t N>
std::string name_of(E v, const std::pair<const char*, E> (&names)[N])
{
    for (const auto& [name, value] : names)
        if (v == value) return name;
    return "?";
}

}  // namespace

std::string to_string(MaskSemantics v) { return name_of(v, kMask); }
std::string to_string(DimReduce v) { return name_of(v, kDim); }
std::string to_string(Clusterer v) { return name_of(v, kClust); }
std::string to_string(EvalSetting v) { return name_of(v, kSetting); }
std::string to_string(GranularityChoice v) { return name_of(v, kGran); }
std::string to_string(TransitionSemantics v) { return name_of(v, kTrans); }

MaskSemantics parse_mask_semantics(const std::string& s) { return parse_enum(s, "mask_semantics", kMask); }
DimReduce parse_dimreduce(const std::string& s) { return parse_enum(s, "dimreduce", kDim); }
Clusterer parse_clusterer(const std::string& s) { return parse_enum(s, "clusterer", kClust); }
EvalSetting parse_setting(const std::string& s) { return parse_enum(s, "setting", kSetting); }
GranularityChoice parse_granularity(const std::string& s) { return parse_enum(s, "granularity", kGran); }
TransitionSemantics parse_transition_semantics(const std::string& s)
{
    return parse_enum(s, "transition_semantics", kTrans);
}

}  // namespace actc
