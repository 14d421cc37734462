#pragma once

#include <string>
#include <utility>
#include <vector>

#include "advtrain/trace.hpp"

namespace advtrain {

// Trace CSV: header t,empirical_risk,robust_risk,margin,truncated_margin,
// weight_norm; LF line endings; floats at 17 significant digits.
void write_trace_csv(const std::vector<TraceRow>& rows, const std::string& path);
std::vector<TraceRow> read_trace_csv(const std::string& path);

// Per-t mean and population standard deviation across trials, one
// mean_<metric>,std_<metric> column pair per trace metric. All trials must
// share the same iteration grid.
void write_aggregate_csv(const std::vector<std::vector<TraceRow>>& trials,
                         const std::string& path);

struct ChartSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;  // (t, value)
};

// Standalone SVG polyline chart with axes, tick labels beneath/beside the
// plot box, and a legend. Byte-deterministic for identical inputs. With
// log_log set, both coordinates are log10-transformed; nonpositive values are
// an error.
void emit_svg_chart(const std::vector<ChartSeries>& series, bool log_log, const std::string& path,
                    const std::string& title, const std::string& x_label,
                    const std::string& y_label);

}  // namespace advtrain
