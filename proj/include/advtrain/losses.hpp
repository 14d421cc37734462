#pragma once

#include "advtrain/types.hpp"

namespace advtrain {

// f(u): softplus ln(1+e^u) for Logistic (evaluated in the overflow-safe
// shifted form), max{0,u} for ReLU. Nonnegative and monotonically increasing.
double link_value(LinkFunction kind, double u);

// f'(u): the sigmoid for Logistic; for ReLU the subderivative at 0 is taken
// as 1 so the update condition y<w,x> - a||w|| <= 0 triggers with equality.
double link_derivative(LinkFunction kind, double u);

// f(-y<w,x>)
double pointwise_loss(LinkFunction kind, const Vector& w, const LabeledExample& e);

// f(-y<w,x> + alpha*||w||): the exact worst case of the pointwise loss over
// perturbations of norm at most alpha.
double robust_pointwise_loss(LinkFunction kind, const Vector& w, const LabeledExample& e,
                             double alpha);

// The maximizing perturbation -y*alpha*w/||w||; the zero vector when w = 0
// (every perturbation is then a maximizer; zero keeps runs deterministic).
Vector adversarial_perturbation(const Vector& w, const LabeledExample& e, double alpha);

// f'(-y<w,x> + alpha*||w||) * (-y*x + alpha*w/||w||), with w/||w|| taken as 0
// at w = 0.
Vector robust_subgradient(LinkFunction kind, const Vector& w, const LabeledExample& e,
                          double alpha);

// Mean pointwise loss over the dataset.
double empirical_risk(LinkFunction kind, const Vector& w, const Dataset& S);

// Mean robust pointwise loss over the dataset; equals empirical_risk at alpha = 0.
double robust_risk(LinkFunction kind, const Vector& w, const Dataset& S, double alpha);

}  // namespace advtrain
