#pragma once

#include <cstddef>
#include <stdexcept>

namespace advtrain {

// Step-size schedule: either a plain constant, or a distinguished first step
// (eta0 at t = 0) followed by a constant (the warmup form used by the
// gradient-descent guarantees, where eta0 = 1).
struct StepSchedule {
    enum class Kind { Constant, ConstantWithWarmup };

    Kind kind;
    double eta0;  // step at t = 0 (ConstantWithWarmup only)
    double eta;   // step at t >= 1 (and t = 0 for Constant)

    static StepSchedule constant(double eta) {
        if (!(eta > 0.0)) throw std::invalid_argument("step size must be positive");
        return {Kind::Constant, eta, eta};
    }

    static StepSchedule constant_with_warmup(double eta0, double eta) {
        if (!(eta0 > 0.0) || !(eta > 0.0))
            throw std::invalid_argument("step sizes must be positive");
        return {Kind::ConstantWithWarmup, eta0, eta};
    }

    double at(std::size_t t) const { return t == 0 ? eta0 : eta; }

    // sum of steps over j in [1, t-1]; both kinds are constant from t = 1
    double sum_from_1(std::size_t t) const {
        if (t < 1) return 0.0;
        return static_cast<double>(t - 1) * eta;
    }
};

}  // namespace advtrain
