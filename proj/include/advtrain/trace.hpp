#pragma once

#include <optional>
#include <vector>

#include "advtrain/types.hpp"

namespace advtrain {

enum class TraceField { EmpiricalRisk, RobustRisk, Margin, TruncatedMargin, WeightNorm };

// One per-iteration record. Row t holds the metrics of w_t before the step
// at t, so row 0 is always the initial model. At w = 0 the margin is
// undefined; such rows store -inf (and truncated margin 0).
struct TraceRow {
    std::size_t t;
    double empirical_risk;
    double robust_risk;
    double margin;
    double truncated_margin;
    double weight_norm;
};

inline double trace_field(const TraceRow& r, TraceField f) {
    switch (f) {
        case TraceField::EmpiricalRisk: return r.empirical_risk;
        case TraceField::RobustRisk: return r.robust_risk;
        case TraceField::Margin: return r.margin;
        case TraceField::TruncatedMargin: return r.truncated_margin;
        case TraceField::WeightNorm: return r.weight_norm;
    }
    throw std::logic_error("unknown trace field");
}

inline const char* trace_field_name(TraceField f) {
    switch (f) {
        case TraceField::EmpiricalRisk: return "empirical_risk";
        case TraceField::RobustRisk: return "robust_risk";
        case TraceField::Margin: return "margin";
        case TraceField::TruncatedMargin: return "truncated_margin";
        case TraceField::WeightNorm: return "weight_norm";
    }
    throw std::logic_error("unknown trace field");
}

struct TrainTrace {
    std::vector<TraceRow> rows;
    // Metrics of the running-average iterate for single-sample training,
    // defined from t = 1 (the average of iterates 0..t-1).
    std::vector<TraceRow> avg_rows;
    Model final_model;
    std::optional<Model> averaged_model;
};

}  // namespace advtrain
