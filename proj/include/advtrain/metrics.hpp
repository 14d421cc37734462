#pragma once

#include <cstddef>
#include <cstdint>

#include "advtrain/schedule.hpp"
#include "advtrain/trace.hpp"
#include "advtrain/types.hpp"

namespace advtrain {

struct MarginReport {
    double margin;            // min over S of y<w,x>/||w||
    double truncated;         // max(0, margin)
    std::size_t argmin_index; // example attaining the min
};

struct MaxMarginSolution {
    double gamma;
    Model w_star;  // unit norm
};

struct BoundInputs {
    std::size_t n = 2;
    std::size_t d = 2;
    double gamma = 1.0;
    double alpha = 0.5;
    double eta = 0.2;
    double delta_conf = 0.1;
    double q = 2.0;
    double c = 1.0;       // the unpinned universal constant, always explicit
    double c_init = 5.0;  // initialization magnitude for the slow plain-GD instance
};

// min over S of y<w,x>/||w||; undefined (error) at w = 0.
MarginReport margin(const Model& w, const Dataset& S);

// Hard-margin maximization by coordinate ascent on the dual; returns the unit
// separator and the attained margin. Errors if S is not separable (the
// iteration cap is hit before the tolerance is met).
MaxMarginSolution max_margin(const Dataset& S, double tol = 1e-6, std::size_t max_iters = 1000000);

// (2*alpha/(gamma-alpha) + (1+alpha)^2)^{-1}: the constant-step cap under
// which the full-batch guarantees hold.
double gd_step_cap(double gamma, double alpha);

// Full-batch rate envelope at iteration t >= 2:
//   1/t + (1/4 + ln(t)^2/(gamma-alpha)^2) / sum_{j=1}^{t-1} eta_j
double gd_bound(std::size_t t, double gamma, double alpha, const StepSchedule& schedule);

// Averaged-iterate single-sample rate envelope at iteration t:
//   (1/(eta*t)) * (4 ln(t)/(gamma-alpha) + 6)
//              * (8 ln(t)/(gamma-alpha)^2 + 8/(gamma-alpha) + 4 ln(1/delta))
double sgd_bound(std::size_t t, double gamma, double alpha, double eta, double delta_conf);

// ((1+alpha)/(gamma-alpha))^2: cap on non-zero perceptron updates.
double perceptron_update_bound(double gamma, double alpha);

// ln(2)/n: robust risk at or below this level forces margin >= alpha.
double margin_trigger_level(std::size_t n);

// true iff 5/4 + ln(t)^2 <= (t-1) * t^{-1/q}
bool c_q_predicate(std::size_t t, double q);

// smallest t >= 2 satisfying c_q_predicate, by linear scan; errors when the
// scan limit is exhausted (the constant blows up as q -> 1).
std::size_t c_q_constant(double q, std::size_t scan_limit = 10000000);

// max{C_q, (n/(eta*(gamma-alpha)^2*ln 2))^q}
double corollary_gd_iters(const BoundInputs& in);

// max{C_q, [c*n/eta * (1/(gamma-alpha)^3 + ln(1/delta)/(gamma-alpha))]^q}
double corollary_sgd_iters(const BoundInputs& in);

// exp(c_init/(1-alpha))
double exp_gd_threshold(double c_init, double alpha);

// Least-squares slope of ln(field) against ln(t) over trace rows with
// t in [t_min, t_max]. Errors on nonpositive field values.
double rate_slope(const TrainTrace& trace, TraceField field, std::size_t t_min, std::size_t t_max);

}  // namespace advtrain
