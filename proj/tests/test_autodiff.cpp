#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "seqlab/adam.hpp"
#include "seqlab/checkpoint.hpp"
#include "seqlab/errors.hpp"
#include "seqlab/grad_check.hpp"
#include "seqlab/gru.hpp"
#include "seqlab/rng.hpp"
#include "seqlab/tape.hpp"

using namespace seqlab;

namespace {

ParamStore make_params(const std::vector<std::pair<std::string, Shape>>& specs, uint64_t seed) {
    ParamStore params;
    Rng rng(seed);
    for (const auto& [name, shape] : specs) {
        init_uniform(params.create(name, shape), rng, 0.5);
    }
    return params;
}

}  // namespace

TEST_CASE("softmax of a constant row is uniform") {
    Tape t;
    Var x = t.constant(Tensor({3}, 0.0));
    Var y = t.softmax(x);
    for (int i = 0; i < 3; ++i) CHECK(y.val()[i] == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("softmax rows sum to 1 and stay strictly positive") {
    Rng rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        Tape t;
        Tensor raw({13});
        for (double& v : raw.data) v = rng.uniform(-30.0, 30.0);
        Var y = t.softmax(t.constant(raw));
        double sum = 0.0;
        for (int i = 0; i < 13; ++i) {
            CHECK(y.val()[i] > 0.0);
            sum += y.val()[i];
        }
        CHECK(std::fabs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("sigmoid derivative at 0 is exactly 0.25") {
    ParamStore params;
    Parameter& p = params.create("x", {1});
    p.value[0] = 0.0;
    Tape t;
    LeafMap leaves(t);
    Var y = t.sigmoid(leaves.get(p));
    t.backward(y);
    CHECK(p.grad[0] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("loss = parameter itself gives gradient 1; constants give 0") {
    ParamStore params;
    Parameter& p = params.create("p", {1});
    p.value[0] = 2.5;
    Tape t;
    LeafMap leaves(t);
    Var v = leaves.get(p);
    t.backward(v);
    CHECK(p.grad[0] == 1.0);

    params.zero_grads();
    Tape t2;
    Var c = t2.constant(7.0);
    t2.backward(c);
    CHECK(p.grad[0] == 0.0);
}

TEST_CASE("repeated backward without reset accumulates into parameter grads") {
    ParamStore params;
    Parameter& p = params.create("p", {1});
    p.value[0] = 1.0;
    Tape t;
    LeafMap leaves(t);
    Var loss = t.scale(leaves.get(p), 3.0);
    t.backward(loss);
    t.backward(loss);
    CHECK(p.grad[0] == 6.0);
}

TEST_CASE("backward requires a scalar loss") {
    ParamStore params;
    Parameter& p = params.create("p", {4});
    Tape t;
    LeafMap leaves(t);
    Var v = leaves.get(p);
    CHECK_THROWS_AS(t.backward(v), ShapeError);
}

TEST_CASE("shape mismatch errors name both shapes") {
    Tape t;
    Var a = t.constant(Tensor({2, 3}, 1.0));
    Var b = t.constant(Tensor({3, 3}, 1.0));
    try {
        t.add(a, b);
        FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
        std::string msg = e.what();
        CHECK(msg.find("(2,3)") != std::string::npos);
        CHECK(msg.find("(3,3)") != std::string::npos);
    }
}

TEST_CASE("log of a non-positive value is a domain error") {
    Tape t;
    Var x = t.constant(Tensor({2}, 0.0));
    CHECK_THROWS_AS(t.log(x), DomainError);
}

TEST_CASE("NaN output fails fast naming the op") {
    Tape t;
    Tensor big({1}, 1e308);
    Var x = t.constant(big);
    try {
        t.add(x, x);  // overflows to inf
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("add") != std::string::npos);
    }
}

TEST_CASE("gradient of sum(A*B) w.r.t. A matches finite differences and row sums of B") {
    ParamStore params = make_params({{"A", {3, 4}}, {"B", {4, 5}}}, 21);
    auto build = [&](Tape& t) {
        LeafMap leaves(t);
        return t.sum(t.matmul(leaves.get(params.get("A")), leaves.get(params.get("B"))));
    };
    GradCheckReport report = grad_check(build, params, 1e-5, 1e-4);
    CHECK(report.pass);

    // structure: d sum(AB) / dA_ij = sum_k B_jk
    params.zero_grads();
    Tape t;
    Var loss = build(t);
    t.backward(loss);
    const Parameter& a = params.get("A");
    const Parameter& b = params.get("B");
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 4; ++j) {
            double row_sum = 0.0;
            for (int k = 0; k < 5; ++k) row_sum += b.value[j * 5 + k];
            CHECK(a.grad[i * 4 + j] == doctest::Approx(row_sum).epsilon(1e-12));
        }
    }
}

TEST_CASE("quadratic bowl gradient: analytic 6 vs finite differences") {
    ParamStore params;
    Parameter& x = params.create("x", {1});
    x.value[0] = 3.0;
    auto build = [&](Tape& t) {
        LeafMap leaves(t);
        Var v = leaves.get(x);
        return t.sum(t.mul(v, v));
    };
    GradCheckReport report = grad_check(build, params, 1e-5, 1e-8);
    CHECK(report.pass);
    CHECK(report.max_rel_err < 1e-8);

    params.zero_grads();
    Tape t;
    Var loss = build(t);
    t.backward(loss);
    CHECK(x.grad[0] == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("every primitive passes finite-difference checks") {
    ParamStore params = make_params({{"a", {6}}, {"b", {6}}, {"m", {2, 6}}}, 33);
    // keep log's domain positive
    for (double& v : params.get("a").value.data) v = 0.3 + std::fabs(v);

    auto build = [&](Tape& t) -> Var {
        LeafMap leaves(t);
        Var a = leaves.get(params.get("a"));
        Var b = leaves.get(params.get("b"));
        Var m = leaves.get(params.get("m"));
        Var mixed = t.mul(t.add(t.sigmoid(a), t.tanh(b)), t.exp(t.scale(b, 0.3)));
        mixed = t.add(mixed, t.log(a));
        mixed = t.add(mixed, t.minimum(a, b));
        mixed = t.add(mixed, t.clip(b, -0.25, 0.25));
        Var through_matmul = t.matmul(m, mixed);          // (2,)
        Var parts[] = {through_matmul, t.softmax(t.sub(a, b))};
        Var joined = t.concat(parts);
        Var row = t.gather_row(leaves.get(params.get("m")), 1);
        return t.add(t.mean(joined), t.sum(t.mul(row, row)));
    };
    GradCheckReport report = grad_check(build, params, 1e-5, 1e-4);
    CHECK(report.pass);
}

TEST_CASE("softmax cross-entropy layer passes the FD oracle") {
    ParamStore params = make_params({{"w", {4, 7}}, {"b", {7}}, {"x", {4}}}, 5);
    auto build = [&](Tape& t) {
        LeafMap leaves(t);
        Var logits = t.add(t.matmul(leaves.get(params.get("x")), leaves.get(params.get("w"))),
                           leaves.get(params.get("b")));
        Var probs = t.softmax(logits);
        return t.scale(t.log(t.gather_row(probs, 3)), -1.0);
    };
    GradCheckReport report = grad_check(build, params, 1e-5, 1e-4);
    CHECK(report.pass);
}

TEST_CASE("GRU cell passes the FD oracle") {
    ParamStore params;
    Rng rng(9);
    GruCell cell = GruCell::create(params, "gru", 5, 8, rng, 0.4);
    Parameter& x = params.create("x", {5});
    Parameter& h = params.create("h", {8});
    init_uniform(x, rng, 0.5);
    init_uniform(h, rng, 0.5);
    auto build = [&](Tape& t) {
        LeafMap leaves(t);
        Var out = cell.step(leaves, leaves.get(x), leaves.get(h));
        return t.mean(t.mul(out, out));
    };
    GradCheckReport report = grad_check(build, params, 1e-5, 1e-4);
    CHECK(report.pass);
}

TEST_CASE("clip gradient is exactly 0 outside the interval and 1 inside") {
    ParamStore params;
    Parameter& x = params.create("x", {5});
    x.value.data = {-2.0, 0.2, 0.8, 1.0, 3.5};  // outside, inside, inside, boundary, outside
    Tape t;
    LeafMap leaves(t);
    Var y = t.clip(leaves.get(x), 0.0, 1.0);
    t.backward(t.sum(y));
    CHECK(x.grad.data == std::vector<double>{0.0, 1.0, 1.0, 1.0, 0.0});
}

TEST_CASE("backward is deterministic: identical tapes give bit-identical gradients") {
    ParamStore params = make_params({{"w", {6, 6}}, {"v", {6}}}, 77);
    auto run = [&]() {
        params.zero_grads();
        Tape t;
        LeafMap leaves(t);
        Var h = t.tanh(t.matmul(leaves.get(params.get("v")), leaves.get(params.get("w"))));
        t.backward(t.mean(t.mul(h, h)));
        std::vector<double> grads;
        for (auto& [name, p] : params) {
            grads.insert(grads.end(), p.grad.data.begin(), p.grad.data.end());
        }
        return grads;
    };
    CHECK(run() == run());
}

TEST_CASE("parameter checkpoint round-trips bit-exactly through JSON") {
    ParamStore params = make_params({{"alpha", {3, 2}}, {"beta", {4}}}, 123);
    // exercise full double precision
    params.get("alpha").value[0] = 0.1 + 0.2;
    params.get("beta").value[1] = 1.0 / 3.0;

    std::filesystem::path path = std::filesystem::temp_directory_path() / "seqlab_ckpt_test.json";
    write_json_file(path.string(), params_to_json(params));
    ParamStore loaded;
    params_from_json(load_json_file(path.string()), loaded);
    for (auto& [name, p] : params) {
        CHECK(loaded.get(name).value.shape == p.value.shape);
        CHECK(loaded.get(name).value.data == p.value.data);  // bitwise
    }
    // second write is byte-identical
    std::filesystem::path path2 = std::filesystem::temp_directory_path() / "seqlab_ckpt_test2.json";
    write_json_file(path2.string(), params_to_json(loaded));
    std::ifstream f1(path), f2(path2);
    std::string s1((std::istreambuf_iterator<char>(f1)), {});
    std::string s2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(s1 == s2);
    std::filesystem::remove(path);
    std::filesystem::remove(path2);
}

TEST_CASE("adam with zero learning rate leaves parameters unchanged") {
    ParamStore params = make_params({{"w", {4}}}, 3);
    std::vector<double> before = params.get("w").value.data;
    AdamOptimizer opt(0.0);
    for (double& g : params.get("w").grad.data) g = 1.0;
    opt.step(params);
    CHECK(params.get("w").value.data == before);
}

TEST_CASE("adam reduces a quadratic loss") {
    ParamStore params;
    Parameter& x = params.create("x", {1});
    x.value[0] = 2.0;
    AdamOptimizer opt(0.05);
    for (int i = 0; i < 200; ++i) {
        Tape t;
        LeafMap leaves(t);
        Var v = leaves.get(x);
        Var loss = t.sum(t.mul(v, v));
        t.backward(loss);
        opt.step(params);
        params.zero_grads();
    }
    CHECK(std::fabs(x.value[0]) < 0.1);
}
