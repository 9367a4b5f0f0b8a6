#include "seqlab/trajectory.hpp"

#include "seqlab/baseline.hpp"
#include "seqlab/errors.hpp"

namespace seqlab {

void assign_rewards(Trajectory& traj, const RewardSpec& spec, const RewardFn& terminal) {
    if (traj.output.empty()) throw DomainError("assign_rewards: empty trajectory");
    (void)spec;  // kind is carried by the bound oracle; gamma applies in returns
    traj.rewards.assign(traj.output.size(), 0.0);
    traj.terminal_reward = terminal(traj.input, traj.output);
    traj.rewards.back() = traj.terminal_reward;
}

void compute_returns_and_advantages(Trajectory& traj, double gamma,
                                    const ValueBaseline* baseline) {
    size_t m = traj.rewards.size();
    traj.returns.assign(m, 0.0);
    double acc = 0.0;
    for (size_t i = m; i-- > 0;) {
        acc = traj.rewards[i] + gamma * acc;
        traj.returns[i] = acc;
    }
    traj.baselines.assign(m, 0.0);
    if (baseline != nullptr) {
        for (size_t i = 0; i < m; ++i) traj.baselines[i] = baseline->predict(traj.states[i]);
    }
    traj.advantages.assign(m, 0.0);
    for (size_t i = 0; i < m; ++i) traj.advantages[i] = traj.returns[i] - traj.baselines[i];
}

}  // namespace seqlab
