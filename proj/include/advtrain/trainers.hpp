#pragma once

#include <cstdint>
#include <functional>

#include "advtrain/losses.hpp"
#include "advtrain/metrics.hpp"
#include "advtrain/schedule.hpp"
#include "advtrain/trace.hpp"
#include "advtrain/types.hpp"

namespace advtrain {

// Metrics row for w against S at the given alpha (logistic link). At w = 0
// the margin is undefined and recorded as -inf with truncated margin 0.
TraceRow make_trace_row(std::size_t t, const Model& w, const Dataset& S, double alpha);

// One full-batch step: w - eta * mean_i robust_subgradient(w, e_i, alpha).
Model alpha_gd_step(const Model& w, const Dataset& S, double alpha, double eta);

// Full-batch subgradient descent on the robust risk. Row t records w_t before
// the step at t; the trace has T+1 rows. Errors on divergence, naming the
// iteration.
TrainTrace run_alpha_gd(const Dataset& S, double alpha, const StepSchedule& schedule,
                        std::size_t T, const Model& w0);

// Single-sample subgradient descent: at each t an index is drawn uniformly
// from the seeded generator. Also tracks the running-average iterate
// (avg_rows, averaged_model). Deterministic given the seed.
TrainTrace run_alpha_sgd(const Dataset& S, double alpha, double eta, std::size_t T,
                         std::uint64_t seed, const Model& w0);

enum class VisitOrder { Cyclic, UniformRandom };

struct PerceptronReport {
    Model final_model;
    std::size_t nonzero_updates;
    std::size_t epochs;
    bool terminated;  // a full pass over S produced no update
};

// ReLU-loss unit-step training from w = 0: on each visited example updates
// w += y*x - alpha*w/||w|| when y<w,x> - alpha*||w|| <= 0. Cyclic passes by
// default (termination = one clean pass); uniform sampling re-checks the whole
// dataset after each epoch of n draws. Exhausting max_epochs is reported via
// terminated = false, not an error.
PerceptronReport run_alpha_perceptron(const Dataset& S, double alpha, std::size_t max_epochs,
                                      VisitOrder order = VisitOrder::Cyclic,
                                      std::uint64_t seed = 0);

// Plain GD (logistic, eta = 1) on the single example ((1,0),+1) from
// w0 = (0,c). The first coordinate follows the scalar recursion
// a_{t+1} = a_t + 1/(1+e^{a_t}) and the second stays at c; both facts are
// asserted to 1e-12 at every step. The alpha argument parameterizes the
// robust-risk column of the trace and the margin threshold callers compare
// against.
TrainTrace run_slow_gd_instance(double c, double alpha, std::size_t T);

// Pluggable pieces of the generic adversarial-training loop.
using UpdateRule = std::function<Model(const Model& w, const Dataset& S,
                                      const std::vector<LabeledExample>& s_adv_t, std::size_t t)>;
using SubsetSelector = std::function<std::vector<std::size_t>(std::size_t t)>;

struct GenericRunResult {
    TrainTrace trace;
    std::vector<LabeledExample> s_prime;  // accumulated adversarial examples (keep_history)
};

// The generic loop: select S_t, build adversarial examples from the current
// model, optionally accumulate them, apply the update rule.
GenericRunResult run_generic_adversarial_training(const Dataset& S, double alpha,
                                                  const UpdateRule& rule,
                                                  const SubsetSelector& selector, std::size_t T,
                                                  bool keep_history, const Model& w0);

// S_t = S every round.
SubsetSelector full_batch_selector(std::size_t n);

// The mini-batch gradient update at the perturbed points with S_t = S. The
// gradient of the plain loss at x + delta* equals the robust subgradient at x,
// so this evaluates the latter (sharing the numeric path with alpha_gd_step,
// which makes the equivalence with run_alpha_gd exact).
UpdateRule full_batch_gradient_rule(double alpha, StepSchedule schedule);

}  // namespace advtrain
