#include "seqlab/klbound.hpp"

#include <cmath>

#include "seqlab/errors.hpp"

namespace seqlab {

std::vector<double> perturb_single_action(std::span<const double> p_old, int action, double alpha) {
    if (action < 0 || action >= static_cast<int>(p_old.size())) {
        throw DomainError("perturb_single_action: action index out of range");
    }
    if (alpha <= -1.0) throw DomainError("perturb_single_action: alpha must be > -1");
    double p = p_old[static_cast<size_t>(action)];
    if (!(p > 0.0) || p > 1.0) throw DomainError("perturb_single_action: p_old[action] not in (0,1]");
    double scaled = (1.0 + alpha) * p;
    if (scaled > 1.0) {
        throw DomainError("perturb_single_action: (1+alpha)*p exceeds 1");
    }
    // remaining mass rescaled by a constant factor
    double rest_old = 1.0 - p;
    double rest_new = 1.0 - scaled;
    std::vector<double> out(p_old.begin(), p_old.end());
    for (size_t i = 0; i < out.size(); ++i) {
        if (static_cast<int>(i) == action) {
            out[i] = scaled;
        } else if (rest_old > 0.0) {
            out[i] = p_old[i] * rest_new / rest_old;
        }
    }
    return out;
}

double kl_single_action_perturbation(std::span<const double> p_old, int action, double alpha) {
    std::vector<double> p_new = perturb_single_action(p_old, action, alpha);
    double kl = 0.0;
    for (size_t i = 0; i < p_old.size(); ++i) {
        if (p_old[i] <= 0.0) continue;
        kl += p_old[i] * std::log(p_old[i] / p_new[i]);
    }
    return kl;
}

double kl_perturbation_closed_form(double p_old, double alpha) {
    if (!(p_old > 0.0) || p_old >= 1.0) {
        throw DomainError("kl_perturbation_closed_form: p_old must be in (0,1)");
    }
    if (alpha <= -1.0) throw DomainError("kl_perturbation_closed_form: alpha must be > -1");
    if ((1.0 + alpha) * p_old > 1.0) {
        throw DomainError("kl_perturbation_closed_form: (1+alpha)*p exceeds 1");
    }
    return -p_old * std::log1p(alpha) - (1.0 - p_old) * std::log1p(-alpha * p_old / (1.0 - p_old));
}

double ratio_bound_for_kl(double p_old, double delta) {
    if (!(p_old > 0.0) || p_old >= 1.0) {
        throw DomainError("ratio_bound_for_kl: p_old must be in (0,1)");
    }
    if (!(delta > 0.0)) throw DomainError("ratio_bound_for_kl: delta must be > 0");
    return std::sqrt(2.0 * delta) * std::sqrt((1.0 - p_old) / p_old);
}

double kl_second_order(double p_old, double alpha) {
    return p_old / (1.0 - p_old) * 0.5 * alpha * alpha;
}

std::vector<KlVerifyRow> kl_bound_verification_table(std::span<const double> p_olds,
                                                     std::span<const double> deltas) {
    std::vector<KlVerifyRow> rows;
    for (double p : p_olds) {
        for (double delta : deltas) {
            KlVerifyRow row;
            row.p_old = p;
            row.delta = delta;
            row.alpha = ratio_bound_for_kl(p, delta);
            row.exact_kl = kl_perturbation_closed_form(p, row.alpha);
            row.rel_err = std::fabs(row.exact_kl - delta) / delta;
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace seqlab
