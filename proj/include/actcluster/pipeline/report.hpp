#pragma once

#include <ostream>
#include <string>

#include "actcluster/pipeline/evaluate.hpp"

namespace actc {

/// Metric value on the reported scale: x100, rounded to 2 decimal places.
double percent(double fraction);

/// {"config", "reports": [{dataset, setting, metrics, contingency,
/// per_subject, timing}], "warnings"}. Timing fields are omitted when
/// `include_timing` is false so that reruns compare byte for byte.
std::string results_json(const RunRecord& record, bool include_timing = true);

/// subject,start_offset,label,confidence
void write_assignments_csv(std::ostream& out, const RunRecord& record);

/// subject,start_offset,label,e0,e1,... for the final clustered embedding.
void write_embedding_csv(std::ostream& out, const RunRecord& record);

/// Aligned text table: one row per metric, one column per report.
std::string metrics_table(const RunRecord& record);

}  // namespace actc
