#include "advtrain/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace advtrain {

MarginReport margin(const Model& w, const Dataset& S) {
    const double nw = norm(w.w);
    if (nw == 0.0) throw std::domain_error("margin is undefined at w = 0");
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < S.n(); ++i) {
        const double m = S[i].y * dot(w.w, S[i].x) / nw;
        if (m < best) {
            best = m;
            arg = i;
        }
    }
    return {best, std::max(0.0, best), arg};
}

MaxMarginSolution max_margin(const Dataset& S, double tol, std::size_t max_iters) {
    const std::size_t n = S.n();
    std::vector<double> sqnorm(n), a(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) sqnorm[i] = dot(S[i].x, S[i].x);

    Vector w(S.dim(), 0.0);
    for (std::size_t sweep = 0; sweep < max_iters; ++sweep) {
        for (std::size_t i = 0; i < n; ++i) {
            if (sqnorm[i] == 0.0) continue;
            const double g = 1.0 - S[i].y * dot(w, S[i].x);
            const double na = std::max(0.0, a[i] + g / sqnorm[i]);
            const double delta = na - a[i];
            if (delta != 0.0) {
                a[i] = na;
                axpy(w, delta * S[i].y, S[i].x);
            }
        }
        // KKT residual: every point must clear the unit functional margin, and
        // points carrying weight must sit exactly on it.  Feasibility alone is
        // not enough — stale positive weights keep ||w|| (and hence the
        // normalized margin) away from the optimum.
        double viol = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double g = 1.0 - S[i].y * dot(w, S[i].x);
            viol = std::max(viol, a[i] > 0.0 ? std::abs(g) : std::max(0.0, g));
        }
        if (viol <= tol) {
            Model m{unit_or_zero(w)};
            return {margin(m, S).margin, m};
        }
    }
    throw std::runtime_error("max_margin: no separator found within " + std::to_string(max_iters) +
                             " sweeps (dataset may not be linearly separable)");
}

static void require_gap(double gamma, double alpha) {
    if (!(alpha >= 0.0) || !(alpha < gamma))
        throw std::invalid_argument("requires 0 <= alpha < gamma");
}

double gd_step_cap(double gamma, double alpha) {
    require_gap(gamma, alpha);
    return 1.0 / (2.0 * alpha / (gamma - alpha) + (1.0 + alpha) * (1.0 + alpha));
}

double gd_bound(std::size_t t, double gamma, double alpha, const StepSchedule& schedule) {
    require_gap(gamma, alpha);
    if (t < 2) throw std::invalid_argument("gd_bound requires t >= 2");
    const double gap = gamma - alpha;
    const double lt = std::log(static_cast<double>(t));
    return 1.0 / static_cast<double>(t) + (0.25 + lt * lt / (gap * gap)) / schedule.sum_from_1(t);
}

double sgd_bound(std::size_t t, double gamma, double alpha, double eta, double delta_conf) {
    require_gap(gamma, alpha);
    if (t < 1) throw std::invalid_argument("sgd_bound requires t >= 1");
    if (!(delta_conf > 0.0) || !(delta_conf < 1.0))
        throw std::invalid_argument("confidence level must lie in (0, 1)");
    const double gap = gamma - alpha;
    const double lt = std::log(static_cast<double>(t));
    const double a = 4.0 * lt / gap + 6.0;
    const double b = 8.0 * lt / (gap * gap) + 8.0 / gap + 4.0 * std::log(1.0 / delta_conf);
    return a * b / (eta * static_cast<double>(t));
}

double perceptron_update_bound(double gamma, double alpha) {
    require_gap(gamma, alpha);
    const double r = (1.0 + alpha) / (gamma - alpha);
    return r * r;
}

double margin_trigger_level(std::size_t n) {
    if (n < 1) throw std::invalid_argument("margin_trigger_level requires n >= 1");
    return std::log(2.0) / static_cast<double>(n);
}

bool c_q_predicate(std::size_t t, double q) {
    if (t < 2) throw std::invalid_argument("c_q_predicate requires t >= 2");
    if (!(q > 1.0)) throw std::invalid_argument("c_q_predicate requires q > 1");
    const double td = static_cast<double>(t);
    const double lt = std::log(td);
    return 1.25 + lt * lt <= (td - 1.0) * std::pow(td, -1.0 / q);
}

std::size_t c_q_constant(double q, std::size_t scan_limit) {
    if (!(q > 1.0)) throw std::invalid_argument("c_q_constant requires q > 1");
    for (std::size_t t = 2; t <= scan_limit; ++t)
        if (c_q_predicate(t, q)) return t;
    throw std::runtime_error("c_q_constant: predicate never satisfied up to scan limit " +
                             std::to_string(scan_limit) + " (q = " + std::to_string(q) + ")");
}

double corollary_gd_iters(const BoundInputs& in) {
    require_gap(in.gamma, in.alpha);
    const double gap = in.gamma - in.alpha;
    const double power =
        std::pow(static_cast<double>(in.n) / (in.eta * gap * gap * std::log(2.0)), in.q);
    return std::max(static_cast<double>(c_q_constant(in.q)), power);
}

double corollary_sgd_iters(const BoundInputs& in) {
    require_gap(in.gamma, in.alpha);
    if (!(in.delta_conf > 0.0) || !(in.delta_conf < 1.0))
        throw std::invalid_argument("confidence level must lie in (0, 1)");
    const double gap = in.gamma - in.alpha;
    const double bracket = in.c * static_cast<double>(in.n) / in.eta *
                           (1.0 / (gap * gap * gap) + std::log(1.0 / in.delta_conf) / gap);
    return std::max(static_cast<double>(c_q_constant(in.q)), std::pow(bracket, in.q));
}

double exp_gd_threshold(double c_init, double alpha) {
    if (!(c_init > 0.0)) throw std::invalid_argument("c_init must be positive");
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    return std::exp(c_init / (1.0 - alpha));
}

double rate_slope(const TrainTrace& trace, TraceField field, std::size_t t_min, std::size_t t_max) {
    if (t_min < 1 || t_max <= t_min) throw std::invalid_argument("rate_slope requires 1 <= t_min < t_max");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t k = 0;
    for (const auto& r : trace.rows) {
        if (r.t < t_min || r.t > t_max) continue;
        const double v = trace_field(r, field);
        if (!(v > 0.0))
            throw std::domain_error("rate_slope: nonpositive value at t = " + std::to_string(r.t));
        const double x = std::log(static_cast<double>(r.t));
        const double y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++k;
    }
    if (k < 2) throw std::invalid_argument("rate_slope: fewer than two rows in [t_min, t_max]");
    const double kd = static_cast<double>(k);
    return (kd * sxy - sx * sy) / (kd * sxx - sx * sx);
}

}  // namespace advtrain
