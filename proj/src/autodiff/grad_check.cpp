#include "seqlab/grad_check.hpp"

#include <cmath>
#include <map>

namespace seqlab {

GradCheckReport grad_check(const std::function<Var(Tape&)>& build, ParamStore& params, double h,
                           double tol) {
    GradCheckReport report;
    report.tol = tol;

    params.zero_grads();
    {
        Tape tape;
        Var loss = build(tape);
        tape.backward(loss);
    }
    std::map<std::string, Tensor> analytic;
    for (auto& [name, p] : params) analytic[name] = p.grad;

    auto eval = [&]() {
        Tape tape;
        return build(tape).item();
    };

    for (auto& [name, p] : params) {
        GradCheckEntry entry;
        entry.name = name;
        const Tensor& ad = analytic[name];
        for (int i = 0; i < p.value.numel(); ++i) {
            double keep = p.value[i];
            p.value[i] = keep + h;
            double up = eval();
            p.value[i] = keep - h;
            double down = eval();
            p.value[i] = keep;
            double fd = (up - down) / (2.0 * h);
            double denom = std::max({std::fabs(ad[i]), std::fabs(fd), 1e-4});
            entry.max_rel_err = std::max(entry.max_rel_err, std::fabs(ad[i] - fd) / denom);
        }
        report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
        report.per_param.push_back(std::move(entry));
    }
    report.pass = report.max_rel_err < tol;
    params.zero_grads();
    return report;
}

}  // namespace seqlab
