#pragma once

#include <filesystem>
#include <string>

#include "brainclust/metrics.hpp"

namespace brainclust {

/// Shortest round-trip decimal form ("%.17g"); "inf"/"nan" for non-finite.
std::string format_number(double v);

/// Fixed-width text table: one row per patient, one column per metric,
/// "-" where a metric was not computed; then the summary and failures.
std::string format_report_table(const MetricsReport& r);

/// Long format, header `patient_id\tmetric\tvalue`, one row per computed
/// (patient, metric) in patient order then metric_names() order.
std::string format_patient_tsv(const MetricsReport& r);

/// Header `metric\tcount\tmean\tmedian\tstd`, one row per metric.
std::string format_summary_tsv(const MetricsReport& r);

/// Header `patient_id\terror`.
std::string format_failures_tsv(const MetricsReport& r);

/// Writes <prefix>.txt, <prefix>.tsv, <prefix>_summary.tsv and
/// <prefix>_failures.tsv.
void write_report(const MetricsReport& r, const std::filesystem::path& prefix);

}  // namespace brainclust
