#pragma once

#include <span>

#include "seqlab/adam.hpp"
#include "seqlab/gru.hpp"
#include "seqlab/trajectory.hpp"

namespace seqlab {

/// Value network b(state): one tanh hidden layer over the decoder hidden
/// state, scalar output. Trained by mean-squared-error regression against
/// observed returns.
class ValueBaseline {
public:
    ValueBaseline(int state_dim, int hidden, double lr, uint64_t init_seed);

    double predict(const Tensor& state) const;

    /// Squared-error loss node over (state, target-return) pairs.
    Var loss_graph(LeafMap& leaves, std::span<const Tensor> states,
                   std::span<const double> targets) const;

    /// One regression step on every step of every trajectory; returns the loss.
    double train_step(std::span<const Trajectory> batch);

    ParamStore& params() { return params_; }

private:
    Var value_graph(LeafMap& leaves, Var state) const;

    int state_dim_;
    int hidden_;
    ParamStore params_;
    AdamOptimizer opt_;
    Parameter* w1_ = nullptr;
    Parameter* b1_ = nullptr;
    Parameter* w2_ = nullptr;
    Parameter* b2_ = nullptr;
};

}  // namespace seqlab
