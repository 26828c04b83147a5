// Command-line front end: run, table2, synth, adapt-wisdm.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "actcluster/data/canonical.hpp"
#include "actcluster/data/synthetic.hpp"
#include "actcluster/data/wisdm.hpp"
#include "actcluster/pipeline/report.hpp"

namespace {

struct RunOptions {
    actc::PipelineConfig config;
    std::string setting = "sdep";
    std::string granularity = "both";
    std::string mask_semantics = "loss";
    std::string transition_semantics = "self";
    std::string dimreduce = "umap";
    std::string self_transition = "0.99";
    bool no_umap = false;
    bool gmm = false;
    std::string out;
    std::string assignments;
    std::string embedding;
};

void add_pipeline_flags(CLI::App* app, RunOptions& o)
{
    auto& c = o.config;
    app->set_config("--config", "", "flat key = value file; command-line flags take precedence");
    app->add_option("--data", c.data_path, "canonical dataset file")->required()->check(CLI::ExistingFile);
    app->add_option("--k", c.classes, "number of clusters (default: classes in the data)");
    app->add_option("--step", c.step, "window step")->capture_default_str();
    app->add_option("--window", c.window_length, "window length")->capture_default_str();
    app->add_option("--seed", c.seed, "master seed")->capture_default_str();
    app->add_option("--iterations", c.inner_iterations, "inner iterations per repetition")->capture_default_str();
    app->add_option("--max-outer", c.max_outer, "cap on outer repetitions")->capture_default_str();
    app->add_option("--threshold", c.threshold, "confidence threshold")->capture_default_str();
    app->add_option("--epochs", c.train.epochs, "training epochs per iteration")->capture_default_str();
    app->add_option("--batch-size", c.train.batch_size, "training batch size")->capture_default_str();
    app->add_option("--threads", c.threads, "subjects clustered concurrently")->capture_default_str();
    app->add_option("--granularity", o.granularity, "window|point|both")->capture_default_str();
    app->add_option("--mask-semantics", o.mask_semantics, "loss|algorithm1")->capture_default_str();
    app->add_option("--transition-semantics", o.transition_semantics, "self|paper-verbatim")->capture_default_str();
    app->add_option("--dimreduce", o.dimreduce, "umap|none|mlp")->capture_default_str();
    app->add_option("--self-transition", o.self_transition, "HMM self-transition p, or 'labels' to estimate it")
        ->capture_default_str();
    app->add_flag("--no-umap", o.no_umap, "cluster the 32-d latents directly");
    app->add_flag("--no-filter", c.no_filter, "train on every window at weight 1");
    app->add_flag("--gmm", o.gmm, "cluster with a GMM instead of the HMM");
    app->add_flag("--baseline", c.baseline, "no UMAP, no filtering, step 100");
    app->add_flag("--reinit-encoder", c.reinit_encoder, "re-initialize the encoder every inner iteration");
    app->add_option("--assignments", o.assignments, "write per-window assignments CSV");
    app->add_option("--dump-embedding", o.embedding, "write the final clustered embedding CSV");
}

actc::PipelineConfig finish(RunOptions& o)
{
    actc::PipelineConfig c = o.config;
    c.setting = actc::parse_setting(o.setting);
    c.granularity = actc::parse_granularity(o.granularity);
    c.mask_semantics = actc::parse_mask_semantics(o.mask_semantics);
    c.transition_semantics = actc::parse_transition_semantics(o.transition_semantics);
    c.dimreduce = o.no_umap ? actc::DimReduce::none : actc::parse_dimreduce(o.dimreduce);
    if (o.gmm) c.clusterer = actc::Clusterer::gmm;
    if (o.self_transition == "labels") c.self_transition.reset();
    else c.self_transition = std::stod(o.self_transition);
    actc::validate(c);
    return c;
}

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

template <typename Fn>
void write_file(const std::string& path, Fn fn)
{
    if (path.empty()) return;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    fn(f);
}

void print_warnings(const actc::RunRecord& r)
{
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Unsupervised activity clustering of wearable-sensor time series"};
    app.require_subcommand(1);

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "cluster a dataset and report metrics");
    add_pipeline_flags(run_cmd, run);
    run_cmd->add_option("--setting", run.setting, "sdep|sindep")->capture_default_str();
    run_cmd->add_option("--out", run.out, "results JSON (default: stdout)");

    RunOptions t2;
    bool t2_full = false;
    auto* t2_cmd = app.add_subcommand("table2", "subject-dependent vs independent, window vs point");
    add_pipeline_flags(t2_cmd, t2);
    t2_cmd->add_flag("--full", t2_full, "use the full pipeline instead of the baseline");
    t2_cmd->add_option("--out", t2.out, "results JSON");

    actc::SyntheticConfig synth;
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic canonical dataset");
    synth_cmd->add_option("--classes", synth.classes)->capture_default_str();
    synth_cmd->add_option("--subjects", synth.subjects)->capture_default_str();
    synth_cmd->add_option("--channels", synth.channels)->capture_default_str();
    synth_cmd->add_option("--span-length", synth.span_length, "time points per activity segment")->capture_default_str();
    synth_cmd->add_option("--spans-per-subject", synth.spans_per_subject, "0 = one per class")->capture_default_str();
    synth_cmd->add_option("--rate", synth.sample_rate_hz, "sample rate in Hz")->capture_default_str();
    synth_cmd->add_option("--base-frequency", synth.base_frequency_hz, "class 0 frequency in Hz")->capture_default_str();
    synth_cmd->add_option("--frequency-step", synth.frequency_step_hz, "frequency gap between classes in Hz")->capture_default_str();
    synth_cmd->add_option("--offset-scale", synth.subject_offset_scale)->capture_default_str();
    synth_cmd->add_option("--noise", synth.noise_sigma)->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
    synth_cmd->add_option("--out", synth_out, "canonical CSV")->required();

    std::string raw_path, adapted_path;
    auto* adapt_cmd = app.add_subcommand("adapt-wisdm", "convert a raw WISDM v1 file to the canonical format");
    adapt_cmd->add_option("RAW", raw_path)->required()->check(CLI::ExistingFile);
    adapt_cmd->add_option("OUT", adapted_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            const actc::PipelineConfig config = finish(run);
            const actc::Dataset data = actc::load_canonical(config.data_path);
            const actc::RunRecord record = actc::evaluate(config, data);
            print_warnings(record);
            write_text(run.out, actc::results_json(record));
            write_file(run.assignments, [&](std::ostream& f) { actc::write_assignments_csv(f, record); });
            write_file(run.embedding, [&](std::ostream& f) { actc::write_embedding_csv(f, record); });
            std::cerr << actc::metrics_table(record);
        } else if (*t2_cmd) {
            actc::PipelineConfig config = finish(t2);
            if (!t2_full) config.baseline = true;
            const actc::Dataset data = actc::load_canonical(config.data_path);
            const actc::RunRecord record = actc::evaluate_table2(config, data);
            print_warnings(record);
            std::cout << actc::metrics_table(record);
            if (!t2.out.empty()) write_text(t2.out, actc::results_json(record));
            write_file(t2.assignments, [&](std::ostream& f) { actc::write_assignments_csv(f, record); });
            write_file(t2.embedding, [&](std::ostream& f) { actc::write_embedding_csv(f, record); });
        } else if (*synth_cmd) {
            actc::save_canonical(synth_out, actc::generate_synthetic(synth));
        } else if (*adapt_cmd) {
            const actc::AdaptStats stats = actc::adapt_wisdm_v1(raw_path, adapted_path);
            std::cerr << "rows written: " << stats.rows_written << ", rows skipped: " << stats.rows_skipped
                      << ", activities: " << stats.activities << '\n';
            for (const auto& w : stats.warnings) std::cerr << "warning: " << w << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
