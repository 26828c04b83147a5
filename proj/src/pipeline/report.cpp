#include "actcluster/pipeline/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "actcluster/data/canonical.hpp"

namespace actc {

namespace {

using nlohmann::ordered_json;

ordered_json config_json(const PipelineConfig& c)
{
    ordered_json j;
    j["data"] = c.data_path;
    j["k"] = c.classes;
    j["window_length"] = c.window_length;
    j["step"] = c.step;
    j["inner_iterations"] = c.inner_iterations;
    j["max_outer"] = c.max_outer;
    j["threshold"] = c.threshold;
    j["setting"] = to_string(c.setting);
    j["granularity"] = to_string(c.granularity);
    j["no_filter"] = c.no_filter;
    j["dimreduce"] = to_string(c.dimreduce);
    j["clusterer"] = to_string(c.clusterer);
    j["baseline"] = c.baseline;
    j["reinit_encoder"] = c.reinit_encoder;
    j["mask_semantics"] = to_string(c.mask_semantics);
    j["transition_semantics"] = to_string(c.transition_semantics);
    if (c.self_transition) j["self_transition"] = *c.self_transition;
    else j["self_transition"] = "labels";
    j["epochs"] = c.train.epochs;
    j["batch_size"] = c.train.batch_size;
    j["learning_rate"] = c.train.adam.learning_rate;
    j["n_neighbors"] = c.umap.n_neighbors;
    j["min_dist"] = c.umap.min_dist;
    j["umap_epochs"] = c.umap.epochs;
    j["gmm_n_init"] = c.gmm.n_init;
    j["hmm_em_steps"] = c.hmm_em_steps;
    j["seed"] = c.seed;
    return j;
}

ordered_json metrics_json(const MetricValues& m)
{
    return {{"acc", percent(m.acc)}, {"nmi", percent(m.nmi)}, {"ari", percent(m.ari)}, {"f1", percent(m.f1)}};
}

ordered_json timing_json(const Timing& t)
{
    return {{"train", t.train}, {"umap", t.umap}, {"cluster", t.cluster}, {"total", t.total}, {"per_point", t.per_point}};
}

ordered_json contingency_json(const ContingencyTable& t)
{
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < t.counts.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < t.counts.cols(); ++j) row.push_back(static_cast<long long>(t.counts(i, j)));
        rows.push_back(row);
    }
    return {{"n", static_cast<long long>(t.total)}, {"counts", rows}};
}

}  // namespace

double percent(double fraction)
{
    return std::round(fraction * 10000.0) / 100.0;
}

std::string results_json(const RunRecord& record, bool include_timing)
{
    ordered_json root;
    root["config"] = config_json(record.config);
    ordered_json reports = ordered_json::array();
    for (const MetricsReport& r : record.reports) {
        ordered_json j;
        j["dataset"] = r.dataset;
        j["setting"] = {{"subject", to_string(r.subject)}, {"granularity", to_string(r.granularity)}};
        j["metrics"] = metrics_json(r.metrics);
        j["contingency"] = contingency_json(r.contingency);
        ordered_json subjects = ordered_json::array();
        for (const SubjectMetrics& s : r.per_subject) {
            subjects.push_back({{"subject", s.subject}, {"weight", s.weight}, {"metrics", metrics_json(s.metrics)}});
        }
        j["per_subject"] = subjects;
        if (include_timing) j["timing"] = timing_json(r.timing);
        reports.push_back(j);
    }
    root["reports"] = reports;
    root["warnings"] = record.warnings;
    return root.dump(2) + "\n";
}

void write_assignments_csv(std::ostream& out, const RunRecord& record)
{
    out << "subject,start_offset,label,confidence\n";
    for (const WindowAssignment& a : record.assignments) {
        out << a.subject << ',' << a.start << ',' << a.label << ',' << format_double(a.confidence) << '\n';
    }
}

void write_embedding_csv(std::ostream& out, const RunRecord& record)
{
    Eigen::Index dims = 0;
    for (const auto& e : record.embeddings) dims = std::max(dims, e.points.cols());
    out << "subject,start_offset,label";
    for (Eigen::Index d = 0; d < dims; ++d) out << ",e" << d;
    out << '\n';
    for (const EmbeddingDump& e : record.embeddings) {
        for (std::size_t x = 0; x < e.windows.size(); ++x) {
            const auto& w = e.windows[x];
            out << w.subject << ',' << w.start << ',' << w.label;
            for (Eigen::Index d = 0; d < e.points.cols(); ++d) out << ',' << format_double(e.points(static_cast<Eigen::Index>(x), d));
            out << '\n';
        }
    }
}

std::string metrics_table(const RunRecord& record)
{
    std::ostringstream out;
    char buf[64];
    out << "      ";
    for (const MetricsReport& r : record.reports) {
        const std::string head = (r.subject == SubjectSetting::dependent ? "dep/" : "indep/") + to_string(r.granularity);
        std::snprintf(buf, sizeof buf, "%14s", head.c_str());
        out << buf;
    }
    out << '\n';
    const char* names[] = {"ACC", "NMI", "ARI", "F1"};
    for (int m = 0; m < 4; ++m) {
        std::snprintf(buf, sizeof buf, "%-6s", names[m]);
        out << buf;
        for (const MetricsReport& r : record.reports) {
            const MetricValues& v = r.metrics;
            const double value = m == 0 ? v.acc : m == 1 ? v.nmi : m == 2 ? v.ari : v.f1;
            std::snprintf(buf, sizeof buf, "%14.2f", percent(value));
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace actc
