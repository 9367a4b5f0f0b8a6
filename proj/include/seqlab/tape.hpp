#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "seqlab/tensor.hpp"

namespace seqlab {

/// Named trainable tensor with a persistent gradient slot. Parameters live
/// outside any tape; tapes reference them through leaf nodes and flush
/// gradients back on backward().
struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;
};

/// Ordered, named parameter collection. Iteration is in name order, which
/// keeps optimizer updates, checkpoints and gradient flushes deterministic.
class ParamStore {
public:
    Parameter& create(const std::string& name, Shape shape);
    Parameter& get(const std::string& name);
    const Parameter& get(const std::string& name) const;
    bool has(const std::string& name) const { return store_.count(name) > 0; }

    void zero_grads();
    size_t size() const { return store_.size(); }

    auto begin() { return store_.begin(); }
    auto end() { return store_.end(); }
    auto begin() const { return store_.begin(); }
    auto end() const { return store_.end(); }

private:
    std::map<std::string, Parameter> store_;
};

class Tape;

/// Handle to a node on a tape. Cheap to copy; valid until the tape is reset.
struct Var {
    Tape* tape = nullptr;
    int32_t id = -1;

    const Tensor& val() const;
    double item() const { return val().item(); }
};

enum class OpKind : uint8_t {
    kLeaf,
    kConstant,
    kMatMul,
    kAdd,
    kSub,
    kMul,
    kSigmoid,
    kTanh,
    kExp,
    kLog,
    kSoftmax,
    kGatherRow,
    kConcat,
    kSum,
    kMean,
    kScale,
    kClip,
    kMin,
};

/// Reverse-mode tape over dense tensors (define-by-run, rebuilt per batch).
///
/// Node order is the topological order of the DAG by construction. backward()
/// visits each node at most once, in reverse insertion order, and accumulates
/// leaf gradients into the bound Parameters (sum semantics, so a multi-sample
/// batch is a loop over episodes on one tape).
///
/// Every op output is checked for NaN/Inf and fails fast naming the op.
/// Tapes are single-threaded and not shareable.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var leaf(Parameter& p);
    Var constant(Tensor t);
    Var constant(double v) { return constant(Tensor::scalar(v)); }

    /// (m,k)x(k,n)->(m,n); (k,)x(k,n)->(n,); (m,k)x(k,)->(m,).
    Var matmul(Var a, Var b);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var sigmoid(Var a);
    Var tanh(Var a);
    Var exp(Var a);
    /// Domain error on any non-positive input.
    Var log(Var a);
    /// Softmax over the last axis. Rows sum to 1 and are strictly positive.
    Var softmax(Var a);
    /// Selects `index` on the first axis and drops that axis.
    Var gather_row(Var a, int index);
    /// Concatenation of rank-1 tensors.
    Var concat(std::span<const Var> parts);
    Var sum(Var a);
    Var mean(Var a);
    Var scale(Var a, double c);
    /// clip to [lo, hi]; gradient is exactly 1 inside the closed interval
    /// and exactly 0 outside.
    Var clip(Var a, double lo, double hi);
    /// Elementwise min; on ties the gradient goes to `a`.
    Var minimum(Var a, Var b);

    /// Reverse pass from a scalar loss. Each call re-seeds node gradients,
    /// then adds leaf gradients into their Parameters: repeated calls without
    /// zero_grads() accumulate.
    void backward(Var loss);

    const Tensor& value(Var v) const;
    /// Node gradient after backward(); empty if the node was unreachable.
    const Tensor& grad(Var v) const;

    size_t size() const { return nodes_.size(); }
    void reset();

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::vector<int32_t> parents;
        // leaf nodes view the parameter value instead of copying it; the
        // parameter must stay alive and unmodified for the tape's lifetime
        Parameter* param = nullptr;
        OpKind op = OpKind::kConstant;
        double c0 = 0.0;  // clip lo / scale factor
        double c1 = 0.0;  // clip hi
        int32_t index = 0;

        const Tensor& val() const { return param != nullptr ? param->value : value; }
    };

    Var push(Node node, const char* op_name);
    Node& node(Var v) { return nodes_[static_cast<size_t>(v.id)]; }
    const Node& node(Var v) const { return nodes_[static_cast<size_t>(v.id)]; }
    Tensor& ensure_grad(int32_t id);
    void backward_one(Node& n);

    std::vector<Node> nodes_;
};

/// Per-tape cache of parameter leaves so each parameter maps to exactly one
/// leaf node per tape.
class LeafMap {
public:
    explicit LeafMap(Tape& tape) : tape_(&tape) {}

    Var get(Parameter& p) {
        auto it = cache_.find(&p);
        if (it != cache_.end()) return it->second;
        Var v = tape_->leaf(p);
        cache_.emplace(&p, v);
        return v;
    }

    Tape& tape() { return *tape_; }

private:
    Tape* tape_;
    std::unordered_map<const Parameter*, Var> cache_;
};

}  // namespace seqlab
