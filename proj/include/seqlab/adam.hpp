#pragma once

#include <map>
#include <string>

#include "seqlab/tape.hpp"

namespace seqlab {

/// Adaptive-moment gradient descent over a ParamStore.
///
/// step() consumes Parameter::grad (the caller zeroes grads afterwards).
/// Moment slots are keyed by parameter name and created on first use.
class AdamOptimizer {
public:
    explicit AdamOptimizer(double lr, double beta1 = 0.9, double beta2 = 0.999,
                           double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void step(ParamStore& params);

    double lr() const { return lr_; }
    void set_lr(double lr) { lr_ = lr; }

private:
    struct Slot {
        Tensor m;
        Tensor v;
    };

    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
    std::map<std::string, Slot> slots_;
};

}  // namespace seqlab
