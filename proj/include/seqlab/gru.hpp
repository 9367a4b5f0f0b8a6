#pragma once

#include <string>

#include "seqlab/rng.hpp"
#include "seqlab/tape.hpp"

namespace seqlab {

/// Single GRU cell with canonical gate equations
///   z = sigmoid(x Wz + h Uz + bz)
///   r = sigmoid(x Wr + h Ur + br)
///   c = tanh(x Wc + (r * h) Uc + bc)
///   h' = (1 - z) * h + z * c
/// over row-vector states. Parameters are owned by a ParamStore and bound by
/// name prefix.
struct GruCell {
    Parameter* wx_z = nullptr;
    Parameter* wh_z = nullptr;
    Parameter* b_z = nullptr;
    Parameter* wx_r = nullptr;
    Parameter* wh_r = nullptr;
    Parameter* b_r = nullptr;
    Parameter* wx_c = nullptr;
    Parameter* wh_c = nullptr;
    Parameter* b_c = nullptr;
    int in_dim = 0;
    int hidden = 0;

    static GruCell create(ParamStore& params, const std::string& prefix, int in_dim, int hidden,
                          Rng& init_rng, double init_range = 0.08);
    static GruCell bind(ParamStore& params, const std::string& prefix, int in_dim, int hidden);

    /// One step: x is (in_dim,), h_prev is (hidden,). Returns the new hidden.
    Var step(LeafMap& leaves, Var x, Var h_prev) const;
};

/// Fills a parameter uniformly in [-range, range].
void init_uniform(Parameter& p, Rng& rng, double range);

}  // namespace seqlab
