#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstring>
#include <vector>

#include "doctest.h"
#include "maip/nn.hpp"
#include "maip/optim.hpp"
#include "maip/rng.hpp"
#include "maip/tensor.hpp"
#include "oracles.hpp"

using namespace maip;

namespace {

Tensor random_tensor(std::vector<int> shape, Rng& rng, bool requires_grad = false,
                     double lo = -1.0, double hi = 1.0) {
    Tensor t = Tensor::zeros(std::move(shape), requires_grad);
    auto v = t.mutable_values();
    for (size_t i = 0; i < v.size(); ++i) v[i] = rng.uniform(lo, hi);
    return t;
}

// Finite-difference gradient of f() w.r.t. every element of the leaf tensors,
// compared against one recorded backward pass.
void check_gradients(const std::function<Tensor()>& forward, std::vector<Tensor> leaves,
                     double step = 1e-6, double rel_tol = 1e-5, double abs_tol = 1e-8) {
    std::vector<std::vector<double>> ad_grads;
    {
        Tape tape;
        Tensor loss = forward();
        tape.backward(loss);
        for (const Tensor& leaf : leaves) {
            ad_grads.emplace_back(leaf.grad().begin(), leaf.grad().end());
        }
    }
    for (size_t k = 0; k < leaves.size(); ++k) {
        Tensor& leaf = leaves[k];
        for (int i = 0; i < leaf.numel(); ++i) {
            const double x0 = leaf.at(i);
            const double fd = oracles::central_diff(
                [&](double x) {
                    leaf.set(i, x);
                    double out = forward().item();  // no tape alive: pure forward
                    return out;
                },
                x0, step);
            leaf.set(i, x0);
            INFO("leaf ", k, " element ", i, ": ad=", ad_grads[k][static_cast<size_t>(i)],
                 " fd=", fd);
            CHECK(oracles::grad_close(ad_grads[k][static_cast<size_t>(i)], fd, rel_tol, abs_tol));
        }
    }
}

}  // namespace

TEST_CASE("tensor construction and invariants") {
    Tensor t = Tensor::from_values({2, 3}, {1, 2, 3, 4, 5, 6});
    CHECK(t.numel() == 6);
    CHECK(t.rank() == 2);
    CHECK_FALSE(t.requires_grad());
    CHECK(t.grad().empty());

    Tensor g = Tensor::zeros({4}, true);
    CHECK(g.grad().size() == 4);  // grad buffer exists iff requires_grad

    CHECK_THROWS_AS(Tensor::from_values({2, 2}, {1.0}), ShapeError);
    CHECK_THROWS_AS(Tensor::zeros({0, 3}), ShapeError);
    CHECK_THROWS_AS(Tensor::from_values({2}, {1, 2}).item(), UsageError);
}

TEST_CASE("elementwise op shapes are enforced") {
    Tensor a = Tensor::zeros({3});
    Tensor b = Tensor::zeros({4});
    CHECK_THROWS_AS(add(a, b), ShapeError);
    CHECK_THROWS_AS(mul(a, b), ShapeError);
    CHECK_THROWS_AS(matvec(Tensor::zeros({2, 3}), Tensor::zeros({4})), ShapeError);
}

TEST_CASE("conv2d trivial examples") {
    // all-zero input stays zero
    Tensor zin = Tensor::zeros({2, 5, 5});
    Tensor k = Tensor::from_values({3, 2, 3, 3}, std::vector<double>(54, 0.7));
    Tensor b = Tensor::zeros({3});
    Tensor out = conv2d(zin, k, b, 1);
    CHECK(out.shape() == std::vector<int>{3, 3, 3});
    for (double v : out.values()) CHECK(v == 0.0);

    // 1x3x3 ones * 1x1x3x3 ones = 9
    Tensor ones_in = Tensor::full({1, 3, 3}, 1.0);
    Tensor ones_k = Tensor::full({1, 1, 3, 3}, 1.0);
    Tensor single = conv2d(ones_in, ones_k, Tensor::zeros({1}), 1);
    CHECK(single.shape() == std::vector<int>{1, 1, 1});
    CHECK(single.item() == doctest::Approx(9.0));
}

TEST_CASE("conv2d matches the naive quadruple-loop reference") {
    Rng rng(42);
    for (int stride : {1, 2}) {
        Tensor in = random_tensor({2, 5, 5}, rng);
        Tensor k = random_tensor({3, 2, 3, 3}, rng);
        Tensor b = random_tensor({3}, rng);
        Tensor out = conv2d(in, k, b, stride);
        auto ref = oracles::conv2d_naive({in.values().begin(), in.values().end()}, 2, 5, 5,
                                         {k.values().begin(), k.values().end()}, 3,
                                         {b.values().begin(), b.values().end()}, stride);
        REQUIRE(static_cast<size_t>(out.numel()) == ref.size());
        for (int i = 0; i < out.numel(); ++i) CHECK(out.at(i) == doctest::Approx(ref[static_cast<size_t>(i)]));
    }
}

TEST_CASE("conv2d shape errors") {
    CHECK_THROWS_AS(conv2d(Tensor::zeros({2, 5, 5}), Tensor::zeros({3, 1, 3, 3}),
                           Tensor::zeros({3}), 1),
                    ShapeError);  // channel mismatch
    CHECK_THROWS_AS(conv2d(Tensor::zeros({1, 2, 5}), Tensor::zeros({1, 1, 3, 3}),
                           Tensor::zeros({1}), 1),
                    ShapeError);  // too small
    CHECK_THROWS_AS(conv2d(Tensor::zeros({1, 5, 5}), Tensor::zeros({1, 1, 3, 3}),
                           Tensor::zeros({1}), 3),
                    ShapeError);  // bad stride
    CHECK_THROWS_AS(conv2d(Tensor::zeros({1, 5, 5}), Tensor::zeros({1, 1, 5, 5}),
                           Tensor::zeros({1}), 1),
                    ShapeError);  // kernel not 3x3
}

TEST_CASE("dense trivial examples") {
    // identity weight, zero bias, identity activation
    Tensor w = Tensor::from_values({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
    Tensor x = Tensor::from_values({3}, {0.3, -0.7, 2.0});
    Tensor y = dense(x, w, Tensor::zeros({3}), Activation::Identity);
    for (int i = 0; i < 3; ++i) CHECK(y.at(i) == x.at(i));

    // zero weight, tanh -> zero vector
    Tensor z = dense(x, Tensor::zeros({4, 3}), Tensor::zeros({4}), Activation::Tanh);
    for (double v : z.values()) CHECK(v == 0.0);

    CHECK_THROWS_AS(dense(x, Tensor::zeros({4, 2}), Tensor::zeros({4}), Activation::Tanh),
                    ShapeError);
    CHECK_THROWS_AS(dense(x, Tensor::zeros({4, 3}), Tensor::zeros({3}), Activation::Tanh),
                    ShapeError);
}

TEST_CASE("dense matches hand matmul oracle") {
    Rng rng(7);
    Tensor w = random_tensor({3, 4}, rng);
    Tensor b = random_tensor({3}, rng);
    Tensor x = random_tensor({4}, rng);
    Tensor y = dense(x, w, b, Activation::Identity);
    auto ref = oracles::matvec_naive({w.values().begin(), w.values().end()}, 3, 4,
                                     {x.values().begin(), x.values().end()});
    for (int i = 0; i < 3; ++i) {
        CHECK(y.at(i) == doctest::Approx(ref[static_cast<size_t>(i)] + b.at(i)).epsilon(1e-12));
    }
}

TEST_CASE("lstm_step hand-evaluated cases") {
    const int n = 3, m = 4;
    LstmParams p = LstmParams::zeros(n, m);
    Tensor x = Tensor::from_values({n}, {0.5, -0.5, 1.0});
    Tensor h0 = Tensor::zeros({m});
    Tensor c0 = Tensor::zeros({m});

    SUBCASE("all-zero params and state stay zero") {
        auto [h, c] = lstm_step(x, h0, c0, p);
        for (double v : h.values()) CHECK(v == 0.0);
        for (double v : c.values()) CHECK(v == 0.0);
    }

    SUBCASE("zero weights, c = v gives c' = v/2, h' = 0.5*tanh(v/2)") {
        Tensor c = Tensor::from_values({m}, {1.0, -2.0, 0.25, 3.0});
        auto [hn, cn] = lstm_step(x, h0, c, p);
        for (int i = 0; i < m; ++i) {
            CHECK(cn.at(i) == doctest::Approx(0.5 * c.at(i)).epsilon(1e-14));
            CHECK(hn.at(i) == doctest::Approx(0.5 * std::tanh(0.5 * c.at(i))).epsilon(1e-14));
        }
    }
}

TEST_CASE("lstm_step matches the scalar reference cell") {
    Rng rng(99);
    const int n = 5, m = 16;  // default hidden size
    oracles::LstmRef ref;
    ref.in = n;
    ref.hidden = m;
    auto fill = [&](std::vector<double>& dst, size_t count) {
        dst.resize(count);
        for (auto& v : dst) v = rng.uniform(-0.5, 0.5);
    };
    fill(ref.wi, static_cast<size_t>(m) * n);
    fill(ref.ui, static_cast<size_t>(m) * m);
    fill(ref.bi, static_cast<size_t>(m));
    fill(ref.wf, static_cast<size_t>(m) * n);
    fill(ref.uf, static_cast<size_t>(m) * m);
    fill(ref.bf, static_cast<size_t>(m));
    fill(ref.wg, static_cast<size_t>(m) * n);
    fill(ref.ug, static_cast<size_t>(m) * m);
    fill(ref.bg, static_cast<size_t>(m));
    fill(ref.wo, static_cast<size_t>(m) * n);
    fill(ref.uo, static_cast<size_t>(m) * m);
    fill(ref.bo, static_cast<size_t>(m));

    LstmParams p{Tensor::from_values({m, n}, ref.wi), Tensor::from_values({m, m}, ref.ui),
                 Tensor::from_values({m}, ref.bi),    Tensor::from_values({m, n}, ref.wf),
                 Tensor::from_values({m, m}, ref.uf), Tensor::from_values({m}, ref.bf),
                 Tensor::from_values({m, n}, ref.wg), Tensor::from_values({m, m}, ref.ug),
                 Tensor::from_values({m}, ref.bg),    Tensor::from_values({m, n}, ref.wo),
                 Tensor::from_values({m, m}, ref.uo), Tensor::from_values({m}, ref.bo)};

    std::vector<double> xv(n), hv(m), cv(m);
    for (auto& v : xv) v = rng.uniform(-1, 1);
    for (auto& v : hv) v = rng.uniform(-1, 1);
    for (auto& v : cv) v = rng.uniform(-1, 1);

    auto [hn, cn] = lstm_step(Tensor::from_values({n}, xv), Tensor::from_values({m}, hv),
                              Tensor::from_values({m}, cv), p);
    std::vector<double> h_ref = hv, c_ref = cv;
    ref.step(xv, h_ref, c_ref);
    for (int i = 0; i < m; ++i) {
        CHECK(hn.at(i) == doctest::Approx(h_ref[static_cast<size_t>(i)]).epsilon(1e-12));
        CHECK(cn.at(i) == doctest::Approx(c_ref[static_cast<size_t>(i)]).epsilon(1e-12));
    }
}

TEST_CASE("backward trivial cases") {
    SUBCASE("loss = sum(x) gives all-ones gradient") {
        Tensor x = Tensor::from_values({5}, {1, 2, 3, 4, 5}, true);
        Tape tape;
        tape.backward(sum(x));
        for (double g : x.grad()) CHECK(g == 1.0);
    }
    SUBCASE("loss = sum(x*x) gives 2x") {
        Tensor x = Tensor::from_values({3}, {1, 2, 3}, true);
        Tape tape;
        tape.backward(sum(mul(x, x)));
        CHECK(x.grad()[0] == doctest::Approx(2.0));
        CHECK(x.grad()[1] == doctest::Approx(4.0));
        CHECK(x.grad()[2] == doctest::Approx(6.0));
    }
    SUBCASE("backward on non-scalar is a usage error") {
        Tensor x = Tensor::from_values({3}, {1, 2, 3}, true);
        Tape tape;
        Tensor y = mul(x, x);
        CHECK_THROWS_AS(tape.backward(y), UsageError);
    }
    SUBCASE("tape is single-use until reset") {
        Tensor x = Tensor::scalar(2.0, true);
        Tape tape;
        Tensor loss = mul(x, x);
        tape.backward(loss);
        CHECK_THROWS_AS(tape.backward(loss), UsageError);
        tape.reset();
        x.zero_grad();
        Tensor loss2 = mul(x, x);
        tape.backward(loss2);
        CHECK(x.grad()[0] == doctest::Approx(4.0));
    }
}

TEST_CASE("per-op gradients match central finite differences") {
    Rng rng(1234);

    SUBCASE("conv2d") {
        Tensor in = random_tensor({2, 6, 6}, rng, true);
        Tensor k = random_tensor({3, 2, 3, 3}, rng, true);
        Tensor b = random_tensor({3}, rng, true);
        check_gradients([&] { return sum(tanh(conv2d(in, k, b, 2))); }, {in, k, b});
    }
    SUBCASE("dense with every activation") {
        for (auto act : {Activation::Identity, Activation::Tanh, Activation::Relu,
                         Activation::Sigmoid}) {
            Tensor w = random_tensor({4, 3}, rng, true);
            Tensor b = random_tensor({4}, rng, true);
            Tensor x = random_tensor({3}, rng, true);
            check_gradients([&] { return sum(mul(dense(x, w, b, act), dense(x, w, b, act))); },
                            {w, b, x});
        }
    }
    SUBCASE("lstm_step") {
        const int n = 3, m = 4;
        Rng prng(5);
        auto rt = [&](std::vector<int> s, int fan) { return init_uniform(std::move(s), fan, prng); };
        LstmParams p{rt({m, n}, n), rt({m, m}, m), rt({m}, m), rt({m, n}, n),
                     rt({m, m}, m), rt({m}, m),    rt({m, n}, n), rt({m, m}, m),
                     rt({m}, m),    rt({m, n}, n), rt({m, m}, m), rt({m}, m)};
        Tensor x = random_tensor({n}, rng, true);
        Tensor h = random_tensor({m}, rng, true);
        Tensor c = random_tensor({m}, rng, true);
        auto forward = [&] {
            auto [hn, cn] = lstm_step(x, h, c, p);
            return sum(add(mul(hn, hn), cn));
        };
        check_gradients(forward, {x, h, c, p.wi, p.ui, p.bi, p.wf, p.uf, p.bf, p.wg, p.ug, p.bg,
                                  p.wo, p.uo, p.bo});
    }
    SUBCASE("softplus, exp, sigmoid, wrap, slice, concat") {
        Tensor a = random_tensor({4}, rng, true);
        Tensor b = random_tensor({3}, rng, true);
        auto forward = [&] {
            Tensor joined = concat(softplus(a), exp(scale(b, 0.5)));
            Tensor part = slice(joined, 1, 5);
            return sum(mul(part, sigmoid(part)));
        };
        check_gradients(forward, {a, b});
    }
    SUBCASE("wrap_degrees passes gradient through") {
        Tensor a = Tensor::from_values({3}, {10.0, 200.0, -540.0}, true);
        Tape tape;
        Tensor w = wrap_degrees(a);
        CHECK(w.at(0) == doctest::Approx(10.0));
        CHECK(w.at(1) == doctest::Approx(-160.0));
        CHECK(w.at(2) == doctest::Approx(-180.0));
        tape.backward(sum(mul(w, w)));
        CHECK(a.grad()[0] == doctest::Approx(2 * 10.0));
    }
}

TEST_CASE("wrap_degrees_scalar boundary behaviour") {
    CHECK(wrap_degrees_scalar(180.0) == doctest::Approx(-180.0));
    CHECK(wrap_degrees_scalar(-180.0) == doctest::Approx(-180.0));
    CHECK(wrap_degrees_scalar(359.0) == doctest::Approx(-1.0));
    CHECK(wrap_degrees_scalar(-359.0) == doctest::Approx(1.0));
    CHECK(wrap_degrees_scalar(0.0) == 0.0);
    CHECK(wrap_degrees_scalar(540.0) == doctest::Approx(-180.0));
}

TEST_CASE("chain composition: composed graph matches finite differences") {
    Rng rng(31);
    Tensor w1 = random_tensor({4, 3}, rng, true);
    Tensor b1 = random_tensor({4}, rng, true);
    Tensor w2 = random_tensor({2, 4}, rng, true);
    Tensor b2 = random_tensor({2}, rng, true);
    Tensor x = random_tensor({3}, rng, true);
    auto forward = [&] {
        Tensor h = dense(x, w1, b1, Activation::Tanh);
        Tensor y = dense(h, w2, b2, Activation::Sigmoid);
        return sum(mul(y, y));
    };
    check_gradients(forward, {w1, b1, w2, b2, x});
}

TEST_CASE("forward determinism is bitwise") {
    Rng rng(77);
    Tensor in = random_tensor({1, 8, 8}, rng);
    Tensor k = random_tensor({4, 1, 3, 3}, rng);
    Tensor b = random_tensor({4}, rng);
    Tensor o1 = conv2d(in, k, b, 2);
    Tensor o2 = conv2d(in, k, b, 2);
    REQUIRE(o1.numel() == o2.numel());
    CHECK(std::memcmp(o1.values().data(), o2.values().data(),
                      sizeof(double) * static_cast<size_t>(o1.numel())) == 0);
}

TEST_CASE("optimizer examples") {
    SUBCASE("plain gradient step: 1.0 with grad 2.0 at lr 0.1 -> 0.8") {
        Tensor p = Tensor::scalar(1.0, true);
        p.mutable_grad()[0] = 2.0;
        Optimizer opt({p}, {Optimizer::Kind::Sgd, 0.1, 0.9, 0.999, 1e-8});
        opt.step();
        CHECK(p.item() == doctest::Approx(0.8));
    }
    SUBCASE("zero gradient is a fixed point for both rules") {
        for (auto kind : {Optimizer::Kind::Sgd, Optimizer::Kind::Adam}) {
            Tensor p = Tensor::from_values({2}, {1.5, -0.5}, true);
            Optimizer opt({p}, {kind, 0.1, 0.9, 0.999, 1e-8});
            opt.zero_grad();
            opt.step();
            CHECK(p.at(0) == 1.5);
            CHECK(p.at(1) == -0.5);
        }
    }
    SUBCASE("100 sgd steps on (w-3)^2 converge geometrically") {
        Tensor w = Tensor::scalar(0.0, true);
        Optimizer opt({w}, {Optimizer::Kind::Sgd, 0.1, 0.9, 0.999, 1e-8});
        for (int i = 0; i < 100; ++i) {
            opt.zero_grad();
            Tape tape;
            Tensor diff = add_const(w, -3.0);
            tape.backward(mul(diff, diff));
            opt.step();
        }
        CHECK(std::fabs(w.item() - 3.0) < 1e-6);
    }
    SUBCASE("adam converges on (w-3)^2") {
        Tensor w = Tensor::scalar(0.0, true);
        Optimizer opt({w}, {Optimizer::Kind::Adam, 0.1, 0.9, 0.999, 1e-8});
        for (int i = 0; i < 500; ++i) {
            opt.zero_grad();
            Tape tape;
            Tensor diff = add_const(w, -3.0);
            tape.backward(mul(diff, diff));
            opt.step();
        }
        CHECK(std::fabs(w.item() - 3.0) < 1e-4);
    }
    SUBCASE("non-trainable tensor is a configuration error") {
        Tensor p = Tensor::scalar(1.0, false);
        CHECK_THROWS_AS(Optimizer({p}, {}), ConfigError);
    }
    SUBCASE("identical seeds give identical adam trajectories") {
        auto run = [] {
            Rng rng(3);
            Tensor w = Tensor::zeros({4}, true);
            auto v = w.mutable_values();
            for (size_t i = 0; i < v.size(); ++i) v[i] = rng.uniform(-1, 1);
            Optimizer opt({w}, {Optimizer::Kind::Adam, 0.05, 0.9, 0.999, 1e-8});
            for (int s = 0; s < 20; ++s) {
                opt.zero_grad();
                Tape tape;
                tape.backward(sum(mul(w, w)));
                opt.step();
            }
            return std::vector<double>{w.values().begin(), w.values().end()};
        };
        CHECK(run() == run());
    }
}
