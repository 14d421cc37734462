#include "advtrain/losses.hpp"

#include <cmath>

namespace advtrain {

double link_value(LinkFunction kind, double u) {
    switch (kind) {
        case LinkFunction::Logistic:
            return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u)));
        case LinkFunction::ReLU:
            return std::max(0.0, u);
    }
    throw std::logic_error("unknown link function");
}

double link_derivative(LinkFunction kind, double u) {
    switch (kind) {
        case LinkFunction::Logistic:
            if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
            {
                const double e = std::exp(u);
                return e / (1.0 + e);
            }
        case LinkFunction::ReLU:
            return u >= 0.0 ? 1.0 : 0.0;
    }
    throw std::logic_error("unknown link function");
}

double pointwise_loss(LinkFunction kind, const Vector& w, const LabeledExample& e) {
    return link_value(kind, -e.y * dot(w, e.x));
}

static void require_alpha(double alpha) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be nonnegative");
}

double robust_pointwise_loss(LinkFunction kind, const Vector& w, const LabeledExample& e,
                             double alpha) {
    require_alpha(alpha);
    return link_value(kind, -e.y * dot(w, e.x) + alpha * norm(w));
}

Vector adversarial_perturbation(const Vector& w, const LabeledExample& e, double alpha) {
    require_alpha(alpha);
    Vector wbar = unit_or_zero(w);
    return scaled(wbar, -static_cast<double>(e.y) * alpha);
}

Vector robust_subgradient(LinkFunction kind, const Vector& w, const LabeledExample& e,
                          double alpha) {
    require_alpha(alpha);
    if (w.size() != e.x.size()) throw std::invalid_argument("robust_subgradient: dimension mismatch");
    const double u = -e.y * dot(w, e.x) + alpha * norm(w);
    const double fp = link_derivative(kind, u);
    const Vector wbar = unit_or_zero(w);
    Vector g(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        g[i] = fp * (-e.y * e.x[i] + alpha * wbar[i]);
    return g;
}

double empirical_risk(LinkFunction kind, const Vector& w, const Dataset& S) {
    double s = 0.0;
    for (const auto& e : S) s += pointwise_loss(kind, w, e);
    return s / static_cast<double>(S.n());
}

double robust_risk(LinkFunction kind, const Vector& w, const Dataset& S, double alpha) {
    require_alpha(alpha);
    double s = 0.0;
    for (const auto& e : S) s += robust_pointwise_loss(kind, w, e, alpha);
    return s / static_cast<double>(S.n());
}

}  // namespace advtrain
