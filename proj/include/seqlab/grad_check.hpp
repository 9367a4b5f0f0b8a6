#pragma once

#include <functional>
#include <string>
#include <vector>

#include "seqlab/tape.hpp"

namespace seqlab {

struct GradCheckEntry {
    std::string name;
    double max_rel_err = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> per_param;
    double max_rel_err = 0.0;
    double tol = 0.0;
    bool pass = false;
};

/// Compares reverse-mode gradients against central finite differences.
///
/// `build` must deterministically construct the scalar loss on the given tape
/// (typically through a LeafMap over `params`). The relative error per element
/// is |ad - fd| / max(|ad|, |fd|, 1e-4); the small floor keeps finite-difference
/// noise on near-zero components from dominating.
GradCheckReport grad_check(const std::function<Var(Tape&)>& build, ParamStore& params,
                           double h = 1e-5, double tol = 1e-4);

}  // namespace seqlab
