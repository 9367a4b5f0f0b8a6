#include "seqlab/adam.hpp"

#include <cmath>

namespace seqlab {

void AdamOptimizer::step(ParamStore& params) {
    ++t_;
    double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (auto& [name, p] : params) {
        Slot& slot = slots_[name];
        if (slot.m.empty()) {
            slot.m = Tensor(p.value.shape);
            slot.v = Tensor(p.value.shape);
        }
        for (int i = 0; i < p.value.numel(); ++i) {
            double g = p.grad[i];
            slot.m[i] = beta1_ * slot.m[i] + (1.0 - beta1_) * g;
            slot.v[i] = beta2_ * slot.v[i] + (1.0 - beta2_) * g * g;
            double mhat = slot.m[i] / bc1;
            double vhat = slot.v[i] / bc2;
            p.value[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    }
}

}  // namespace seqlab
