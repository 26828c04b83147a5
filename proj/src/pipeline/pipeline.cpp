#include "actcluster/pipeline/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "actcluster/dimreduce/umap.hpp"
#include "actcluster/metrics/hungarian.hpp"
#include "actcluster/numerics/random.hpp"

namespace actc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int class_count(const PipelineConfig& config, const WindowSet& windows)
{
    return config.classes > 0 ? config.classes : windows.classes;
}

ClusterAssignment cluster(const PipelineConfig& config, const Eigen::MatrixXd& points, const WindowSet& windows,
                          const Eigen::MatrixXd& transitions, int k, std::uint64_t seed)
{
    GmmConfig gcfg = config.gmm;
    gcfg.components = k;
    if (config.clusterer == Clusterer::gmm) {
        GmmFit fit = gmm_fit(points, gcfg, seed);
        return assignment_from_posteriors(std::move(fit.responsibilities));
    }
    HmmConfig hcfg;
    hcfg.states = k;
    hcfg.em_steps = config.hmm_em_steps;
    hcfg.tol = config.hmm_tol;
    hcfg.init = gcfg;
    const auto chains = windows.chains();
    return hmm_fit_and_decode(points, chains, transitions, hcfg, seed).assignment;
}

}  // namespace

PhaseTiming& PhaseTiming::operator+=(const PhaseTiming& o)
{
    train += o.train;
    reduce += o.reduce;
    cluster += o.cluster;
    return *this;
}

std::size_t FinalTable::size() const
{
    return static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](int l) { return l >= 0; }));
}

std::uint64_t seed_counter(int repetition, int iteration)
{
    return static_cast<std::uint64_t>(repetition) * 1000u + static_cast<std::uint64_t>(iteration);
}

void align_to_reference(ClusterAssignment& a, std::span<const int> reference, int classes)
{
    if (reference.size() != a.labels.size()) throw std::invalid_argument("align_to_reference: length mismatch");
    Eigen::MatrixXd agree = Eigen::MatrixXd::Zero(classes, classes);
    for (std::size_t x = 0; x < reference.size(); ++x) {
        if (reference[x] >= 0) agree(a.labels[x], reference[x]) += 1.0;
    }
    const auto map = lexicographic_best_assignment(agree);
    for (int& l : a.labels) l = map[static_cast<std::size_t>(l)];
    if (a.posteriors.cols() == classes) {
        Eigen::MatrixXd permuted(a.posteriors.rows(), classes);
        for (int c = 0; c < classes; ++c) permuted.col(map[static_cast<std::size_t>(c)]) = a.posteriors.col(c);
        a.posteriors = std::move(permuted);
    }
}

InnerResult run_inner_loop(const PipelineConfig& config, const WindowSet& windows, std::uint64_t seed,
                           int repetition, RunLog& log)
{
    const int k = class_count(config, windows);
    const Index n = windows.size();
    if (n < k) {
        throw std::invalid_argument("pipeline: " + std::to_string(n) + " windows cannot form " + std::to_string(k)
                                    + " clusters");
    }

    EncoderConfig ecfg;
    ecfg.window_length = windows.window_length;
    Encoder encoder(ecfg, windows.channels, derive_seed(seed, seed_stream::encoder_init, seed_counter(repetition, 0)));
    const bool mlp_reducer = config.dimreduce == DimReduce::mlp;
    Mlp reducer;
    if (mlp_reducer) reducer = Mlp({ecfg.latent_dim, 256, 2}, derive_seed(seed, seed_stream::encoder_init, seed_counter(repetition, 500)));

    const double p_self = estimate_self_transition(windows.labels, windows.chains(), config.self_transition);
    const Eigen::MatrixXd transitions = build_transitions(k, p_self, config.transition_semantics);

    InnerResult out;
    for (int i = 1; i <= config.inner_iterations; ++i) {
        const std::uint64_t counter = seed_counter(repetition, i);
        if (config.reinit_encoder && i > 1) {
            encoder.reinitialize(derive_seed(seed, seed_stream::encoder_init, counter));
            if (mlp_reducer) reducer = Mlp({ecfg.latent_dim, 256, 2}, derive_seed(seed, seed_stream::encoder_init, counter + 500));
        }

        auto t0 = Clock::now();
        Eigen::MatrixXd latent = embed(encoder, mlp_reducer ? &reducer : nullptr, windows, config.train.batch_size);
        log.timing.train += seconds_since(t0);

        t0 = Clock::now();
        if (config.dimreduce == DimReduce::umap) {
            UmapConfig ucfg = config.umap;
            ucfg.seed = derive_seed(seed, seed_stream::umap, counter);
            ucfg.n_neighbors = std::min<Index>(ucfg.n_neighbors, n - 1);
            out.embedding = umap(latent, ucfg).embedding;
        } else {
            out.embedding = std::move(latent);
        }
        log.timing.reduce += seconds_since(t0);

        t0 = Clock::now();
        out.assignment = cluster(config, out.embedding, windows, transitions, k, derive_seed(seed, seed_stream::clustering, counter));
        if (i > 1) align_to_reference(out.assignment, out.masks.previous, k);
        out.masks = update_masks(out.masks, out.assignment.labels, out.assignment.confidence, config.threshold,
                                 config.mask_semantics);
        log.timing.cluster += seconds_since(t0);

        if (log.keep_labels) log.labels.push_back(out.assignment.labels);
        IterationLog entry{repetition, i, out.masks.mask_size(), out.masks.semi_mask_size(), out.masks.fallback, 0.0};
        if (out.masks.fallback && !config.no_filter) {
            log.warnings.push_back("repetition " + std::to_string(repetition + 1) + ", iteration " + std::to_string(i)
                                   + ": no window passed the label filter; training on all windows");
        }

        // the last iteration's training would never be observed: the next
        // repetition starts from a fresh encoder
        if (i < config.inner_iterations) {
            t0 = Clock::now();
            std::vector<double> weights = config.no_filter ? std::vector<double>(static_cast<std::size_t>(n), 1.0)
                                                           : out.masks.weights;
            Mlp head = make_classifier_head(mlp_reducer ? 2 : ecfg.latent_dim, k,
                                            derive_seed(seed, seed_stream::head_init, counter));
            PseudoLabelModel model{&encoder, mlp_reducer ? &reducer : nullptr, &head};
            const TrainStats stats = pseudo_label_train(model, windows, out.assignment.labels, weights, config.train,
                                                        derive_seed(seed, seed_stream::shuffle, counter));
            if (!stats.epoch_loss.empty()) entry.final_loss = stats.epoch_loss.back();
            log.timing.train += seconds_since(t0);
        }
        log.iterations.push_back(entry);
    }
    return out;
}

PipelineResult run_outer_loop(const PipelineConfig& config, const WindowSet& windows, std::uint64_t seed)
{
    validate(config);
    const int k = class_count(config, windows);
    const auto n = static_cast<std::size_t>(windows.size());
    PipelineResult result;
    result.final_table.labels.assign(n, -1);
    InnerResult last;
    std::size_t size = 0;
    for (int rep = 0; rep < config.max_outer; ++rep) {
        last = run_inner_loop(config, windows, seed, rep, result.log);
        if (size > 0) align_to_reference(last.assignment, result.final_table.labels, k);
        for (std::size_t x = 0; x < n; ++x) {
            if (last.masks.mask[x]) result.final_table.labels[x] = last.assignment.labels[x];
        }
        const std::size_t grown = result.final_table.size();
        result.final_table.sizes.push_back(grown);
        result.repetitions = rep + 1;
        if (grown <= size) break;
        size = grown;
        if (rep + 1 == config.max_outer) {
            result.cap_reached = true;
            result.log.warnings.push_back("outer loop stopped at the cap of " + std::to_string(config.max_outer)
                                          + " repetitions while |Final| was still growing");
        }
    }
    result.labels.resize(n);
    for (std::size_t x = 0; x < n; ++x) {
        const int f = result.final_table.labels[x];
        result.labels[x] = f >= 0 ? f : last.assignment.labels[x];
    }
    result.confidence = std::move(last.assignment.confidence);
    result.embedding = std::move(last.embedding);
    return result;
}

PipelineResult run_baseline(const PipelineConfig& config, const WindowSet& windows, std::uint64_t seed)
{
    if (windows.step != 100) {
        throw std::invalid_argument("baseline: windows must use step 100, got " + std::to_string(windows.step));
    }
    return run_outer_loop(baseline_config(config), windows, seed);
}

}  // namespace actc
