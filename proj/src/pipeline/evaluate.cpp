#include "actcluster/pipeline/evaluate.hpp"

#include <atomic>
#include <chrono>
#include <optional>
#include <stdexcept>
#include <thread>

#include "actcluster/metrics/pointwise.hpp"
#include "actcluster/numerics/random.hpp"

namespace actc {

namespace {

using Clock = std::chrono::steady_clock;

// Result of clustering one group of windows: a subject, or the pooled data.
struct GroupResult {
    bool skipped = false;
    std::string skip_reason;
    WindowSet windows;
    PipelineResult run;
};

GroupResult run_group(const PipelineConfig& config, const Dataset& data, int classes, std::uint64_t seed)
{
    GroupResult g;
    g.windows = make_windows(data, config.window_length, config.step);
    g.windows.classes = classes;
    if (g.windows.size() < classes) {
        g.skipped = true;
        g.skip_reason = std::to_string(g.windows.size()) + " windows, fewer than K = " + std::to_string(classes);
        return g;
    }
    g.run = run_outer_loop(config, g.windows, seed);
    return g;
}

// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn fn)
{
    const auto workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct Scored {
    SubjectMetrics window;
    SubjectMetrics point;
    std::vector<int> window_truth, window_aligned;
    std::vector<int> point_truth, point_aligned;
};

Scored score(const GroupResult& g, const std::string& name)
{
    Scored s;
    const auto& truth = g.windows.labels;
    const auto& pred = g.run.labels;
    s.window = {name, static_cast<double>(truth.size()), evaluate_labels(truth, pred)};
    s.window_truth = truth;
    s.window_aligned = apply_alignment(pred, align_labels(contingency(truth, pred)));

    const PointLabels points = pointwise_from_windows(g.windows, pred);
    s.point = {name, static_cast<double>(points.truth.size()), evaluate_labels(points.truth, points.predicted)};
    s.point_truth = points.truth;
    s.point_aligned = apply_alignment(points.predicted, align_labels(contingency(points.truth, points.predicted)));
    return s;
}

void append(std::vector<int>& to, const std::vector<int>& from)
{
    to.insert(to.end(), from.begin(), from.end());
}

std::vector<MetricsReport> build_reports(const PipelineConfig& config, const std::string& dataset,
                                         const std::vector<Scored>& scored, int classes)
{
    std::vector<MetricsReport> reports;
    for (Granularity g : {Granularity::window, Granularity::point}) {
        if (config.granularity == GranularityChoice::window && g != Granularity::window) continue;
        if (config.granularity == GranularityChoice::point && g != Granularity::point) continue;
        MetricsReport r;
        r.dataset = dataset;
        r.subject = config.setting == EvalSetting::sdep ? SubjectSetting::dependent : SubjectSetting::independent;
        r.granularity = g;
        std::vector<MetricValues> values;
        std::vector<double> weights;
        std::vector<int> truth, aligned;
        for (const Scored& s : scored) {
            const SubjectMetrics& m = g == Granularity::window ? s.window : s.point;
            r.per_subject.push_back(m);
            values.push_back(m.metrics);
            weights.push_back(m.weight);
            append(truth, g == Granularity::window ? s.window_truth : s.point_truth);
            append(aligned, g == Granularity::window ? s.window_aligned : s.point_aligned);
        }
        r.metrics = aggregate_subject_dependent(values, weights);
        r.contingency = contingency(truth, aligned, classes, classes);
        reports.push_back(std::move(r));
    }
    return reports;
}

}  // namespace

RunRecord evaluate(const PipelineConfig& input, const Dataset& data)
{
    const auto start = Clock::now();
    RunRecord record;
    record.config = input;
    record.effective = effective_config(input);
    const PipelineConfig& config = record.effective;
    validate(config);
    record.dataset = data.name;
    const int classes = config.classes > 0 ? config.classes : describe(data).classes;

    std::vector<Dataset> groups;
    std::vector<std::string> names;
    if (config.setting == EvalSetting::sdep) {
        for (std::size_t s = 0; s < data.recordings.size(); ++s) {
            groups.push_back(subset_subject(data, s));
            names.push_back(data.recordings[s].subject_id);
        }
    } else {
        groups.push_back(data);
        names.push_back("all");
    }
    if (groups.empty()) throw std::invalid_argument("evaluate: dataset has no subjects");

    // group i uses seed stream (subject, i): with one subject both settings coincide
    std::vector<GroupResult> results(groups.size());
    parallel_for(groups.size(), config.threads, [&](std::size_t i) {
        results[i] = run_group(config, groups[i], classes, derive_seed(config.seed, seed_stream::subject, i));
    });

    std::vector<Scored> scored;
    PhaseTiming phases;
    for (std::size_t i = 0; i < results.size(); ++i) {
        GroupResult& g = results[i];
        if (g.skipped) {
            if (config.setting == EvalSetting::sindep) throw std::invalid_argument("evaluate: " + g.skip_reason);
            record.warnings.push_back("subject " + names[i] + " skipped: " + g.skip_reason);
            continue;
        }
        scored.push_back(score(g, names[i]));
        phases += g.run.log.timing;
        for (const auto& w : g.run.log.warnings) record.warnings.push_back(names[i] + ": " + w);
        record.iterations.insert(record.iterations.end(), g.run.log.iterations.begin(), g.run.log.iterations.end());

        EmbeddingDump dump;
        for (std::size_t x = 0; x < g.windows.windows.size(); ++x) {
            const WindowRef& ref = g.windows.windows[x];
            WindowAssignment a{g.windows.subject_ids[ref.subject], ref.start, g.run.labels[x], g.run.confidence[x]};
            record.assignments.push_back(a);
            dump.windows.push_back(a);
        }
        dump.points = std::move(g.run.embedding);
        record.embeddings.push_back(std::move(dump));
    }
    if (scored.empty()) throw std::invalid_argument("evaluate: every subject was skipped");

    record.reports = build_reports(config, data.name, scored, classes);
    record.timing.train = phases.train;
    record.timing.umap = phases.reduce;
    record.timing.cluster = phases.cluster;
    record.timing.total = std::chrono::duration<double>(Clock::now() - start).count();
    const Index points = data.total_points();
    record.timing.per_point = points > 0 ? record.timing.total / static_cast<double>(points) : 0.0;
    for (auto& r : record.reports) r.timing = record.timing;
    return record;
}

RunRecord evaluate_table2(const PipelineConfig& config, const Dataset& data)
{
    PipelineConfig c = config;
    c.granularity = GranularityChoice::both;
    c.setting = EvalSetting::sdep;
    RunRecord dep = evaluate(c, data);
    c.setting = EvalSetting::sindep;
    RunRecord indep = evaluate(c, data);

    RunRecord out = std::move(dep);
    out.config.setting = config.setting;
    for (auto& r : indep.reports) out.reports.push_back(std::move(r));
    for (auto& w : indep.warnings) out.warnings.push_back("independent: " + w);
    out.timing.train += indep.timing.train;
    out.timing.umap += indep.timing.umap;
    out.timing.cluster += indep.timing.cluster;
    out.timing.total += indep.timing.total;
    out.timing.per_point += indep.timing.per_point;
    return out;
}

}  // namespace actc
