#ifndef VSB_REPORT_HPP
#define VSB_REPORT_HPP

#include <map>
#include <string>
#include <vector>

#include "vsb/metrics.hpp"
#include "vsb/pvector.hpp"
#include "vsb/stats.hpp"

namespace vsb {

/// bundles.csv: one row per corpus label (REAL, AI, mixed-REAL, mixed-AI).
void write_bundles_csv(const std::vector<std::pair<std::string, MetricBundle>>& bundles,
                       const std::string& path);

/// deltas.csv: one row per metric with relative/location/normalized columns.
void write_delta_csv(const DeltaReport& report, const std::string& path);
void write_delta_json(const DeltaReport& report, const std::string& path);
DeltaReport load_delta_json(const std::string& path);

/// Grouped bar chart of the delta report (static SVG).
void write_delta_svg(const DeltaReport& report, const std::string& path);

/// Scatter plot of a 2-D projection, one color per label (static SVG).
void write_scatter_svg(const Projection2D& projection, const std::string& path);

void write_ttest_json(const TTestResult& result, const std::string& path);
void write_flow_summary_json(const FlowEntropySummary& summary, const std::string& path);
void write_flow_summary_csv(const FlowEntropySummary& summary, const std::string& path);

/// manifest.json: resolved key/value configuration, seed and toolkit
/// version. Deliberately timestamp-free so reruns are byte-identical.
void write_manifest(const std::string& command,
                    const std::map<std::string, std::string>& config,
                    uint64_t seed,
                    const std::string& path);

} // namespace vsb

#endif
