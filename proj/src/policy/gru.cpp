#include "seqlab/gru.hpp"

namespace seqlab {

namespace {

GruCell wire(ParamStore& params, const std::string& prefix, int in_dim, int hidden, bool create) {
    GruCell cell;
    cell.in_dim = in_dim;
    cell.hidden = hidden;
    auto grab = [&](const std::string& suffix, Shape shape) -> Parameter* {
        std::string name = prefix + "." + suffix;
        return create ? &params.create(name, std::move(shape)) : &params.get(name);
    };
    cell.wx_z = grab("wx_z", {in_dim, hidden});
    cell.wh_z = grab("wh_z", {hidden, hidden});
    cell.b_z = grab("b_z", {hidden});
    cell.wx_r = grab("wx_r", {in_dim, hidden});
    cell.wh_r = grab("wh_r", {hidden, hidden});
    cell.b_r = grab("b_r", {hidden});
    cell.wx_c = grab("wx_c", {in_dim, hidden});
    cell.wh_c = grab("wh_c", {hidden, hidden});
    cell.b_c = grab("b_c", {hidden});
    return cell;
}

}  // namespace

void init_uniform(Parameter& p, Rng& rng, double range) {
    for (double& v : p.value.data) v = rng.uniform(-range, range);
}

GruCell GruCell::create(ParamStore& params, const std::string& prefix, int in_dim, int hidden,
                        Rng& init_rng, double init_range) {
    GruCell cell = wire(params, prefix, in_dim, hidden, /*create=*/true);
    for (Parameter* p : {cell.wx_z, cell.wh_z, cell.b_z, cell.wx_r, cell.wh_r, cell.b_r, cell.wx_c,
                         cell.wh_c, cell.b_c}) {
        init_uniform(*p, init_rng, init_range);
    }
    return cell;
}

GruCell GruCell::bind(ParamStore& params, const std::string& prefix, int in_dim, int hidden) {
    return wire(params, prefix, in_dim, hidden, /*create=*/false);
}

Var GruCell::step(LeafMap& leaves, Var x, Var h_prev) const {
    Tape& t = leaves.tape();
    Var z = t.sigmoid(t.add(t.add(t.matmul(x, leaves.get(*wx_z)), t.matmul(h_prev, leaves.get(*wh_z))),
                            leaves.get(*b_z)));
    Var r = t.sigmoid(t.add(t.add(t.matmul(x, leaves.get(*wx_r)), t.matmul(h_prev, leaves.get(*wh_r))),
                            leaves.get(*b_r)));
    Var rh = t.mul(r, h_prev);
    Var c = t.tanh(t.add(t.add(t.matmul(x, leaves.get(*wx_c)), t.matmul(rh, leaves.get(*wh_c))),
                         leaves.get(*b_c)));
    Var keep = t.sub(t.constant(Tensor({hidden}, 1.0)), z);
    return t.add(t.mul(keep, h_prev), t.mul(z, c));
}

}  // namespace seqlab
