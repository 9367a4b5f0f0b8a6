#pragma once

#include <span>
#include <vector>

namespace seqlab {

/// Raises outcome `action`'s probability by factor (1 + alpha) and rescales
/// every other outcome by a single constant so the result sums to 1.
/// Requires (1 + alpha) * p_old[action] <= 1 and alpha > -1.
std::vector<double> perturb_single_action(std::span<const double> p_old, int action, double alpha);

/// Exact KL(P_old || P) for the constant-rescale perturbation above, computed
/// directly from the two distributions.
double kl_single_action_perturbation(std::span<const double> p_old, int action, double alpha);

/// Same KL in closed form from the taken action's probability alone:
///   -p ln(1+alpha) - (1-p) ln(1 - alpha p / (1-p))
/// (log1p-based, stable for small alpha).
double kl_perturbation_closed_form(double p_old, double alpha);

/// Largest ratio deviation alpha keeping the second-order KL below delta:
///   sqrt(2 delta) * sqrt((1 - p_old) / p_old).
/// The symmetric lower bound is its negation.
double ratio_bound_for_kl(double p_old, double delta);

/// Second-order KL approximation p/(1-p) * alpha^2 / 2; exact algebraic
/// inverse of ratio_bound_for_kl.
double kl_second_order(double p_old, double alpha);

struct KlVerifyRow {
    double p_old = 0.0;
    double delta = 0.0;
    double alpha = 0.0;
    double exact_kl = 0.0;
    double rel_err = 0.0;
};

/// Evaluates the exact KL at the bound for every (p_old, delta) pair:
/// numerical check that the bound lands within the trust region.
std::vector<KlVerifyRow> kl_bound_verification_table(std::span<const double> p_olds,
                                                     std::span<const double> deltas);

}  // namespace seqlab
