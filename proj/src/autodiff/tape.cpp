#include "seqlab/tape.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstring>

#include "seqlab/errors.hpp"

namespace seqlab {

namespace {

using MatMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstMatMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape) + " vs " +
                         shape_str(b.shape));
    }
}

}  // namespace

Parameter& ParamStore::create(const std::string& name, Shape shape) {
    auto [it, inserted] = store_.try_emplace(name);
    if (!inserted) {
        throw Error("parameter '" + name + "' already exists");
    }
    Parameter& p = it->second;
    p.name = name;
    p.value = Tensor(shape);
    p.grad = Tensor(std::move(shape));
    return p;
}

Parameter& ParamStore::get(const std::string& name) {
    auto it = store_.find(name);
    if (it == store_.end()) throw Error("unknown parameter '" + name + "'");
    return it->second;
}

const Parameter& ParamStore::get(const std::string& name) const {
    auto it = store_.find(name);
    if (it == store_.end()) throw Error("unknown parameter '" + name + "'");
    return it->second;
}

void ParamStore::zero_grads() {
    for (auto& [name, p] : store_) {
        std::fill(p.grad.data.begin(), p.grad.data.end(), 0.0);
    }
}

const Tensor& Var::val() const { return tape->value(*this); }

const Tensor& Tape::value(Var v) const { return node(v).val(); }

const Tensor& Tape::grad(Var v) const { return node(v).grad; }

Var Tape::push(Node n, const char* op_name) {
    if (!n.value.all_finite()) {
        throw NumericError(std::string("op '") + op_name + "' produced a non-finite value");
    }
    nodes_.push_back(std::move(n));
    return Var{this, static_cast<int32_t>(nodes_.size() - 1)};
}

void Tape::reset() { nodes_.clear(); }

Var Tape::leaf(Parameter& p) {
    if (!p.value.all_finite()) {
        throw NumericError("parameter '" + p.name + "' holds a non-finite value");
    }
    Node n;
    n.op = OpKind::kLeaf;
    n.param = &p;
    nodes_.push_back(std::move(n));
    return Var{this, static_cast<int32_t>(nodes_.size() - 1)};
}

Var Tape::constant(Tensor t) {
    Node n;
    n.op = OpKind::kConstant;
    n.value = std::move(t);
    return push(std::move(n), "constant");
}

Var Tape::matmul(Var a, Var b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    Node n;
    n.op = OpKind::kMatMul;
    n.parents = {a.id, b.id};
    if (av.rank() == 2 && bv.rank() == 2) {
        if (av.dim(1) != bv.dim(0)) {
            throw ShapeError("matmul: inner dimensions differ " + shape_str(av.shape) + " vs " +
                             shape_str(bv.shape));
        }
        n.value = Tensor({av.dim(0), bv.dim(1)});
        MatMap(n.value.data.data(), av.dim(0), bv.dim(1)).noalias() =
            ConstMatMap(av.data.data(), av.dim(0), av.dim(1)) *
            ConstMatMap(bv.data.data(), bv.dim(0), bv.dim(1));
    } else if (av.rank() == 1 && bv.rank() == 2) {
        if (av.dim(0) != bv.dim(0)) {
            throw ShapeError("matmul: inner dimensions differ " + shape_str(av.shape) + " vs " +
                             shape_str(bv.shape));
        }
        n.value = Tensor({bv.dim(1)});
        VecMap(n.value.data.data(), bv.dim(1)).noalias() =
            ConstMatMap(bv.data.data(), bv.dim(0), bv.dim(1)).transpose() *
            ConstVecMap(av.data.data(), av.dim(0));
    } else if (av.rank() == 2 && bv.rank() == 1) {
        if (av.dim(1) != bv.dim(0)) {
            throw ShapeError("matmul: inner dimensions differ " + shape_str(av.shape) + " vs " +
                             shape_str(bv.shape));
        }
        n.value = Tensor({av.dim(0)});
        VecMap(n.value.data.data(), av.dim(0)).noalias() =
            ConstMatMap(av.data.data(), av.dim(0), av.dim(1)) *
            ConstVecMap(bv.data.data(), bv.dim(0));
    } else {
        throw ShapeError("matmul: unsupported ranks " + shape_str(av.shape) + " x " +
                         shape_str(bv.shape));
    }
    return push(std::move(n), "matmul");
}

Var Tape::add(Var a, Var b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    require_same_shape(av, bv, "add");
    Node n;
    n.op = OpKind::kAdd;
    n.parents = {a.id, b.id};
    n.value = av;
    for (int i = 0; i < bv.numel(); ++i) n.value[i] += bv[i];
    return push(std::move(n), "add");
}

Var Tape::sub(Var a, Var b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    require_same_shape(av, bv, "sub");
    Node n;
    n.op = OpKind::kSub;
    n.parents = {a.id, b.id};
    n.value = av;
    for (int i = 0; i < bv.numel(); ++i) n.value[i] -= bv[i];
    return push(std::move(n), "sub");
}

Var Tape::mul(Var a, Var b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    require_same_shape(av, bv, "mul");
    Node n;
    n.op = OpKind::kMul;
    n.parents = {a.id, b.id};
    n.value = av;
    for (int i = 0; i < bv.numel(); ++i) n.value[i] *= bv[i];
    return push(std::move(n), "mul");
}

Var Tape::sigmoid(Var a) {
    Node n;
    n.op = OpKind::kSigmoid;
    n.parents = {a.id};
    n.value = value(a);
    for (double& v : n.value.data) v = 1.0 / (1.0 + std::exp(-v));
    return push(std::move(n), "sigmoid");
}

Var Tape::tanh(Var a) {
    Node n;
    n.op = OpKind::kTanh;
    n.parents = {a.id};
    n.value = value(a);
    for (double& v : n.value.data) v = std::tanh(v);
    return push(std::move(n), "tanh");
}

Var Tape::exp(Var a) {
    Node n;
    n.op = OpKind::kExp;
    n.parents = {a.id};
    n.value = value(a);
    for (double& v : n.value.data) v = std::exp(v);
    return push(std::move(n), "exp");
}

Var Tape::log(Var a) {
    Node n;
    n.op = OpKind::kLog;
    n.parents = {a.id};
    n.value = value(a);
    for (double& v : n.value.data) {
        if (v <= 0.0) {
            throw DomainError("log: input " + std::to_string(v) + " is not positive");
        }
        v = std::log(v);
    }
    return push(std::move(n), "log");
}

Var Tape::softmax(Var a) {
    const Tensor& av = value(a);
    Node n;
    n.op = OpKind::kSoftmax;
    n.parents = {a.id};
    n.value = av;
    int cols = av.dim(av.rank() - 1);
    int rows = av.numel() / cols;
    for (int r = 0; r < rows; ++r) {
        double* row = n.value.data.data() + static_cast<size_t>(r) * cols;
        double mx = row[0];
        for (int c = 1; c < cols; ++c) mx = std::max(mx, row[c]);
        double total = 0.0;
        for (int c = 0; c < cols; ++c) {
            row[c] = std::exp(row[c] - mx);
            total += row[c];
        }
        for (int c = 0; c < cols; ++c) row[c] /= total;
    }
    return push(std::move(n), "softmax");
}

Var Tape::gather_row(Var a, int index) {
    const Tensor& av = value(a);
    if (av.rank() < 1 || index < 0 || index >= av.dim(0)) {
        throw ShapeError("gather_row: index " + std::to_string(index) + " out of range for shape " +
                         shape_str(av.shape));
    }
    Node n;
    n.op = OpKind::kGatherRow;
    n.parents = {a.id};
    n.index = index;
    Shape out_shape(av.shape.begin() + 1, av.shape.end());
    if (out_shape.empty()) out_shape = {1};
    int stride = shape_numel(out_shape);
    n.value = Tensor(out_shape);
    std::memcpy(n.value.data.data(), av.data.data() + static_cast<size_t>(index) * stride,
                sizeof(double) * static_cast<size_t>(stride));
    return push(std::move(n), "gather_row");
}

Var Tape::concat(std::span<const Var> parts) {
    if (parts.empty()) throw ShapeError("concat: no inputs");
    Node n;
    n.op = OpKind::kConcat;
    int total = 0;
    for (Var p : parts) {
        const Tensor& pv = value(p);
        if (pv.rank() != 1) {
            throw ShapeError("concat: rank-1 inputs required, got " + shape_str(pv.shape));
        }
        n.parents.push_back(p.id);
        total += pv.numel();
    }
    n.value = Tensor({total});
    int off = 0;
    for (Var p : parts) {
        const Tensor& pv = value(p);
        std::memcpy(n.value.data.data() + off, pv.data.data(),
                    sizeof(double) * static_cast<size_t>(pv.numel()));
        off += pv.numel();
    }
    return push(std::move(n), "concat");
}

Var Tape::sum(Var a) {
    Node n;
    n.op = OpKind::kSum;
    n.parents = {a.id};
    double total = 0.0;
    for (double v : value(a).data) total += v;
    n.value = Tensor::scalar(total);
    return push(std::move(n), "sum");
}

Var Tape::mean(Var a) {
    Node n;
    n.op = OpKind::kMean;
    n.parents = {a.id};
    double total = 0.0;
    for (double v : value(a).data) total += v;
    n.value = Tensor::scalar(total / value(a).numel());
    return push(std::move(n), "mean");
}

Var Tape::scale(Var a, double c) {
    Node n;
    n.op = OpKind::kScale;
    n.parents = {a.id};
    n.c0 = c;
    n.value = value(a);
    for (double& v : n.value.data) v *= c;
    return push(std::move(n), "scale");
}

Var Tape::clip(Var a, double lo, double hi) {
    if (lo > hi) throw DomainError("clip: lo > hi");
    Node n;
    n.op = OpKind::kClip;
    n.parents = {a.id};
    n.c0 = lo;
    n.c1 = hi;
    n.value = value(a);
    for (double& v : n.value.data) v = std::min(std::max(v, lo), hi);
    return push(std::move(n), "clip");
}

Var Tape::minimum(Var a, Var b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    require_same_shape(av, bv, "minimum");
    Node n;
    n.op = OpKind::kMin;
    n.parents = {a.id, b.id};
    n.value = av;
    for (int i = 0; i < bv.numel(); ++i) n.value[i] = std::min(n.value[i], bv[i]);
    return push(std::move(n), "minimum");
}

Tensor& Tape::ensure_grad(int32_t id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.grad.empty()) n.grad = Tensor(n.val().shape);
    return n.grad;
}

void Tape::backward(Var loss) {
    if (loss.tape != this) throw Error("backward: loss lives on a different tape");
    const Tensor& lv = value(loss);
    if (lv.numel() != 1) {
        throw ShapeError("backward: loss must be scalar, got shape " + shape_str(lv.shape));
    }
    for (Node& n : nodes_) n.grad = Tensor();
    ensure_grad(loss.id)[0] = 1.0;
    for (int32_t i = loss.id; i >= 0; --i) {
        Node& n = nodes_[static_cast<size_t>(i)];
        if (n.grad.empty()) continue;
        backward_one(n);
    }
    // flush leaves into their parameters (accumulate)
    for (Node& n : nodes_) {
        if (n.op == OpKind::kLeaf && !n.grad.empty()) {
            for (int i = 0; i < n.grad.numel(); ++i) n.param->grad[i] += n.grad[i];
        }
    }
}

void Tape::backward_one(Node& n) {
    const Tensor& g = n.grad;
    switch (n.op) {
        case OpKind::kLeaf:
        case OpKind::kConstant:
            break;
        case OpKind::kMatMul: {
            const Tensor& av = nodes_[static_cast<size_t>(n.parents[0])].val();
            const Tensor& bv = nodes_[static_cast<size_t>(n.parents[1])].val();
            Tensor& ga = ensure_grad(n.parents[0]);
            Tensor& gb = ensure_grad(n.parents[1]);
            if (av.rank() == 2 && bv.rank() == 2) {
                int m = av.dim(0), k = av.dim(1), c = bv.dim(1);
                MatMap(ga.data.data(), m, k).noalias() +=
                    ConstMatMap(g.data.data(), m, c) * ConstMatMap(bv.data.data(), k, c).transpose();
                MatMap(gb.data.data(), k, c).noalias() +=
                    ConstMatMap(av.data.data(), m, k).transpose() * ConstMatMap(g.data.data(), m, c);
            } else if (av.rank() == 1 && bv.rank() == 2) {
                int k = av.dim(0), c = bv.dim(1);
                VecMap(ga.data.data(), k).noalias() +=
                    ConstMatMap(bv.data.data(), k, c) * ConstVecMap(g.data.data(), c);
                MatMap(gb.data.data(), k, c).noalias() +=
                    ConstVecMap(av.data.data(), k) * ConstVecMap(g.data.data(), c).transpose();
            } else {  // (m,k) x (k,)
                int m = av.dim(0), k = av.dim(1);
                MatMap(ga.data.data(), m, k).noalias() +=
                    ConstVecMap(g.data.data(), m) * ConstVecMap(bv.data.data(), k).transpose();
                VecMap(gb.data.data(), k).noalias() +=
                    ConstMatMap(av.data.data(), m, k).transpose() * ConstVecMap(g.data.data(), m);
            }
            break;
        }
        case OpKind::kAdd: {
            Tensor& ga = ensure_grad(n.parents[0]);
            Tensor& gb = ensure_grad(n.parents[1]);
            for (int i = 0; i < g.numel(); ++i) {
                ga[i] += g[i];
                gb[i] += g[i];
            }
            break;
        }
        case OpKind::kSub: {
            Tensor& ga = ensure_grad(n.parents[0]);
            Tensor& gb = ensure_grad(n.parents[1]);
            for (int i = 0; i < g.numel(); ++i) {
                ga[i] += g[i];
                gb[i] -= g[i];
            }
            break;
        }
        case OpKind::kMul: {
            const Tensor& av = nodes_[static_cast<size_t>(n.parents[0])].val();
            const Tensor& bv = nodes_[static_cast<size_t>(n.parents[1])].val();
            Tensor& ga = ensure_grad(n.parents[0]);
            Tensor& gb = ensure_grad(n.parents[1]);
            for (int i = 0; i < g.numel(); ++i) {
                ga[i] += g[i] * bv[i];
                gb[i] += g[i] * av[i];
            }
            break;
        }
        case OpKind::kSigmoid: {
            Tensor& ga = ensure_grad(n.parents[0]);
            for (int i = 0; i < g.numel(); ++i) {
                double y = n.value[i];
                ga[i] += g[i] * y * (1.0 - y);
            }
            break;
        }
        case OpKind::kTanh: {
            Tensor& ga = ensure_grad(n.parents[0]);
            for (int i = 0; i < g.numel(); ++i) {
                double y = n.value[i];
                ga[i] += g[i] * (1.0 - y * y);
            }
            break;
        }
        case OpKind::kExp: {
            Tensor& ga = ensure_grad(n.parents[0]);
            for (int i = 0; i < g.numel(); ++i) ga[i] += g[i] * n.value[i];
            break;
        }
        case OpKind::kLog: {
            const Tensor& av = nodes_[static_cast<size_t>(n.parents[0])].val();
            Tensor& ga = ensure_grad(n.parents[0]);
            for (int i = 0; i < g.numel(); ++i) ga[i] += g[i] / av[i];
            break;
        }
        case OpKind::kSoftmax: {
            Tensor& ga = ensure_grad(n.parents[0]);
            int cols = n.value.dim(n.value.rank() - 1);
            int rows = n.value.numel() / cols;
            for (int r = 0; r < rows; ++r) {
                const double* y = n.value.data.data() + static_cast<size_t>(r) * cols;
                const double* gr = g.data.data() + static_cast<size_t>(r) * cols;
                double* out = ga.data.data() + static_cast<size_t>(r) * cols;
                double dot = 0.0;
                for (int c = 0; c < cols; ++c) dot += gr[c] * y[c];
                for (int c = 0; c < cols; ++c) out[c] += y[c] * (gr[c] - dot);
            }
            break;
        }
        case OpKind::kGatherRow: {
            Tensor& ga = ensure_grad(n.parents[0]);
            int stride = n.value.numel();
            double* dst = ga.data.data() + static_cast<size_t>(n.index) * stride;
            for (int i = 0; i < stride; ++i) dst[i] += g[i];
            break;
        }
        case OpKind::kConcat: {
            int off = 0;
            for (int32_t pid : n.parents) {
                Tensor& gp = ensure_grad(pid);
                for (int i = 0; i < gp.numel(); ++i) gp[i] += g[off + i];
                off += gp.numel();
            }
            break;
        }
        case OpKind::kSum: {
            Tensor& ga = ensure_grad(n.parents[0]);
            for (double& v : ga.data) v += g[0];
            break;
        }
        case OpKind::kMean: {
            Tensor& ga = ensure_grad(n.parents[0]);
            double s = g[0] / ga.numel();
            for (double& v : ga.data) v += s;
            break;
        }
        case OpKind::kScale: {
            Tensor& ga = ensure_grad(n.parents[0]);
            for (int i = 0; i < g.numel(); ++i) ga[i] += g[i] * n.c0;
            break;
        }
        case OpKind::kClip: {
            const Tensor& av = nodes_[static_cast<size_t>(n.parents[0])].val();
            Tensor& ga = ensure_grad(n.parents[0]);
            for (int i = 0; i < g.numel(); ++i) {
                if (av[i] >= n.c0 && av[i] <= n.c1) ga[i] += g[i];
            }
            break;
        }
        case OpKind::kMin: {
            const Tensor& av = nodes_[static_cast<size_t>(n.parents[0])].val();
            const Tensor& bv = nodes_[static_cast<size_t>(n.parents[1])].val();
            Tensor& ga = ensure_grad(n.parents[0]);
            Tensor& gb = ensure_grad(n.parents[1]);
            for (int i = 0; i < g.numel(); ++i) {
                if (av[i] <= bv[i]) {
                    ga[i] += g[i];
                } else {
                    gb[i] += g[i];
                }
            }
            break;
        }
    }
}

}  // namespace seqlab
