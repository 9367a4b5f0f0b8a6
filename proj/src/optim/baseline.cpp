#include "seqlab/baseline.hpp"

#include "seqlab/errors.hpp"

namespace seqlab {

ValueBaseline::ValueBaseline(int state_dim, int hidden, double lr, uint64_t init_seed)
    : state_dim_(state_dim), hidden_(hidden), opt_(lr) {
    Rng rng(init_seed);
    w1_ = &params_.create("baseline.w1", {state_dim, hidden});
    b1_ = &params_.create("baseline.b1", {hidden});
    w2_ = &params_.create("baseline.w2", {hidden, 1});
    b2_ = &params_.create("baseline.b2", {1});
    for (Parameter* p : {w1_, b1_, w2_, b2_}) init_uniform(*p, rng, 0.08);
}

Var ValueBaseline::value_graph(LeafMap& leaves, Var state) const {
    Tape& t = leaves.tape();
    Var h = t.tanh(t.add(t.matmul(state, leaves.get(*w1_)), leaves.get(*b1_)));
    return t.add(t.matmul(h, leaves.get(*w2_)), leaves.get(*b2_));
}

double ValueBaseline::predict(const Tensor& state) const {
    Tape tape;
    LeafMap leaves(tape);
    return value_graph(leaves, tape.constant(state)).item();
}

Var ValueBaseline::loss_graph(LeafMap& leaves, std::span<const Tensor> states,
                              std::span<const double> targets) const {
    if (states.empty() || states.size() != targets.size()) {
        throw DomainError("baseline loss: states/targets size mismatch");
    }
    Tape& t = leaves.tape();
    Var total = t.constant(0.0);
    for (size_t i = 0; i < states.size(); ++i) {
        Var diff = t.sub(value_graph(leaves, t.constant(states[i])), t.constant(targets[i]));
        total = t.add(total, t.mul(diff, diff));
    }
    return t.scale(total, 1.0 / static_cast<double>(states.size()));
}

double ValueBaseline::train_step(std::span<const Trajectory> batch) {
    std::vector<Tensor> states;
    std::vector<double> targets;
    for (const Trajectory& traj : batch) {
        for (size_t t = 0; t < traj.states.size(); ++t) {
            states.push_back(traj.states[t]);
            targets.push_back(traj.returns[t]);
        }
    }
    if (states.empty()) return 0.0;
    Tape tape;
    LeafMap leaves(tape);
    Var loss = loss_graph(leaves, states, targets);
    tape.backward(loss);
    opt_.step(params_);
    params_.zero_grads();
    return loss.item();
}

}  // namespace seqlab
