#include "advtrain/trainers.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "advtrain/rng.hpp"

namespace advtrain {

static constexpr LinkFunction kTraceLink = LinkFunction::Logistic;

TraceRow make_trace_row(std::size_t t, const Model& w, const Dataset& S, double alpha) {
    TraceRow r;
    r.t = t;
    r.empirical_risk = empirical_risk(kTraceLink, w.w, S);
    r.robust_risk = robust_risk(kTraceLink, w.w, S, alpha);
    r.weight_norm = norm(w.w);
    if (r.weight_norm == 0.0) {
        r.margin = -std::numeric_limits<double>::infinity();
        r.truncated_margin = 0.0;
    } else {
        const MarginReport m = margin(w, S);
        r.margin = m.margin;
        r.truncated_margin = m.truncated;
    }
    return r;
}

static void check_finite(const Model& w, std::size_t t) {
    if (!all_finite(w.w))
        throw std::runtime_error("training diverged: non-finite iterate at iteration " +
                                 std::to_string(t));
}

Model alpha_gd_step(const Model& w, const Dataset& S, double alpha, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("step size must be positive");
    Vector g(w.w.size(), 0.0);
    for (const auto& e : S) axpy(g, 1.0, robust_subgradient(kTraceLink, w.w, e, alpha));
    Model out{w.w};
    axpy(out.w, -eta, scaled(g, 1.0 / static_cast<double>(S.n())));
    return out;
}

TrainTrace run_alpha_gd(const Dataset& S, double alpha, const StepSchedule& schedule,
                        std::size_t T, const Model& w0) {
    if (T < 1) throw std::invalid_argument("T must be at least 1");
    if (w0.w.size() != S.dim()) throw std::invalid_argument("w0 dimension mismatch");
    TrainTrace trace;
    trace.rows.reserve(T + 1);
    Model w = w0;
    for (std::size_t t = 0; t <= T; ++t) {
        trace.rows.push_back(make_trace_row(t, w, S, alpha));
        if (t < T) {
            w = alpha_gd_step(w, S, alpha, schedule.at(t));
            check_finite(w, t + 1);
        }
    }
    trace.final_model = w;
    return trace;
}

TrainTrace run_alpha_sgd(const Dataset& S, double alpha, double eta, std::size_t T,
                         std::uint64_t seed, const Model& w0) {
    if (T < 1) throw std::invalid_argument("T must be at least 1");
    if (!(eta > 0.0)) throw std::invalid_argument("step size must be positive");
    if (w0.w.size() != S.dim()) throw std::invalid_argument("w0 dimension mismatch");
    Rng rng(seed);
    TrainTrace trace;
    trace.rows.reserve(T + 1);
    trace.avg_rows.reserve(T);
    Model w = w0;
    Vector sum(S.dim(), 0.0);  // sum of w_0 .. w_{t-1}
    for (std::size_t t = 0; t <= T; ++t) {
        trace.rows.push_back(make_trace_row(t, w, S, alpha));
        if (t >= 1) {
            Model avg{scaled(sum, 1.0 / static_cast<double>(t))};
            trace.avg_rows.push_back(make_trace_row(t, avg, S, alpha));
            if (t == T) trace.averaged_model = std::move(avg);
        }
        if (t < T) {
            axpy(sum, 1.0, w.w);
            const std::size_t i = rng.uniform_index(S.n());
            axpy(w.w, -eta, robust_subgradient(kTraceLink, w.w, S[i], alpha));
            check_finite(w, t + 1);
        }
    }
    trace.final_model = w;
    return trace;
}

PerceptronReport run_alpha_perceptron(const Dataset& S, double alpha, std::size_t max_epochs,
                                      VisitOrder order, std::uint64_t seed) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be nonnegative");
    if (max_epochs < 1) throw std::invalid_argument("max_epochs must be at least 1");
    Rng rng(seed);
    const std::size_t n = S.n();
    Model w{Vector(S.dim(), 0.0)};
    std::size_t updates = 0;

    auto violates = [&](std::size_t i) {
        return S[i].y * dot(w.w, S[i].x) - alpha * norm(w.w) <= 0.0;
    };
    auto apply_update = [&](std::size_t i) {
        const Vector wbar = unit_or_zero(w.w);
        axpy(w.w, static_cast<double>(S[i].y), S[i].x);
        axpy(w.w, -alpha, wbar);
        ++updates;
    };

    for (std::size_t epoch = 1; epoch <= max_epochs; ++epoch) {
        bool updated = false;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t i = order == VisitOrder::Cyclic ? k : rng.uniform_index(n);
            if (violates(i)) {
                apply_update(i);
                updated = true;
            }
        }
        bool clean = false;
        if (order == VisitOrder::Cyclic) {
            clean = !updated;
        } else {
            clean = true;
            for (std::size_t i = 0; i < n && clean; ++i) clean = !violates(i);
        }
        if (clean) return {w, updates, epoch, true};
    }
    return {w, updates, max_epochs, false};
}

TrainTrace run_slow_gd_instance(double c, double alpha, std::size_t T) {
    if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (T < 1) throw std::invalid_argument("T must be at least 1");
    const Dataset S(std::vector<LabeledExample>{LabeledExample({1.0, 0.0}, 1)});

    TrainTrace trace;
    trace.rows.reserve(T + 1);
    Model w{{0.0, c}};
    double a = 0.0;
    for (std::size_t t = 0; t <= T; ++t) {
        if (std::abs(w.w[0] - a) > 1e-12 || std::abs(w.w[1] - c) > 1e-12)
            throw std::runtime_error(
                "slow-GD instance: vector iterate departed from the scalar recursion at iteration " +
                std::to_string(t));
        trace.rows.push_back(make_trace_row(t, w, S, alpha));
        if (t < T) {
            // One unit step of plain GD; the gradient only moves the first
            // coordinate, by f'(-a) = 1/(1+e^a). The scalar recursion uses the
            // identical expression so the two paths cannot drift apart.
            a += link_derivative(LinkFunction::Logistic, -a);
            axpy(w.w, -1.0, robust_subgradient(kTraceLink, w.w, S[0], 0.0));
        }
    }
    trace.final_model = w;
    return trace;
}

GenericRunResult run_generic_adversarial_training(const Dataset& S, double alpha,
                                                  const UpdateRule& rule,
                                                  const SubsetSelector& selector, std::size_t T,
                                                  bool keep_history, const Model& w0) {
    if (T < 1) throw std::invalid_argument("T must be at least 1");
    if (w0.w.size() != S.dim()) throw std::invalid_argument("w0 dimension mismatch");
    GenericRunResult res;
    res.trace.rows.reserve(T + 1);
    Model w = w0;
    for (std::size_t t = 0; t <= T; ++t) {
        res.trace.rows.push_back(make_trace_row(t, w, S, alpha));
        if (t < T) {
            std::vector<LabeledExample> s_adv;
            for (std::size_t i : selector(t)) {
                Vector x = S[i].x;
                axpy(x, 1.0, adversarial_perturbation(w.w, S[i], alpha));
                s_adv.emplace_back(std::move(x), S[i].y);
            }
            if (keep_history)
                res.s_prime.insert(res.s_prime.end(), s_adv.begin(), s_adv.end());
            w = rule(w, S, s_adv, t);
            check_finite(w, t + 1);
        }
    }
    res.trace.final_model = w;
    return res;
}

SubsetSelector full_batch_selector(std::size_t n) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return [all](std::size_t) { return all; };
}

UpdateRule full_batch_gradient_rule(double alpha, StepSchedule schedule) {
    return [alpha, schedule](const Model& w, const Dataset& S,
                             const std::vector<LabeledExample>&, std::size_t t) {
        return alpha_gd_step(w, S, alpha, schedule.at(t));
    };
}

}  // namespace advtrain
