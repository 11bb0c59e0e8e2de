#include "maip/nn.hpp"

#include <cmath>

namespace maip {

Tensor apply_activation(const Tensor& x, Activation act) {
    switch (act) {
        case Activation::Identity: return x;
        case Activation::Tanh: return tanh(x);
        case Activation::Relu: return relu(x);
        case Activation::Sigmoid: return sigmoid(x);
    }
    throw UsageError("unknown activation");
}

Tensor dense(const Tensor& x, const Tensor& w, const Tensor& b, Activation act) {
    if (w.rank() != 2 || w.dim(1) != x.dim(0)) {
        throw ShapeError("dense: weight " + shape_str(w.shape()) + " incompatible with input " +
                         shape_str(x.shape()));
    }
    if (b.rank() != 1 || b.dim(0) != w.dim(0)) {
        throw ShapeError("dense: bias " + shape_str(b.shape()) + " incompatible with weight " +
                         shape_str(w.shape()));
    }
    return apply_activation(add(matvec(w, x), b), act);
}

LstmParams LstmParams::zeros(int input_size, int hidden_size) {
    auto w = [&] { return Tensor::zeros({hidden_size, input_size}); };
    auto u = [&] { return Tensor::zeros({hidden_size, hidden_size}); };
    auto b = [&] { return Tensor::zeros({hidden_size}); };
    return LstmParams{w(), u(), b(), w(), u(), b(), w(), u(), b(), w(), u(), b()};
}

LstmStepOut lstm_step(const Tensor& x, const Tensor& h, const Tensor& c, const LstmParams& p) {
    if (h.dim(0) != p.hidden_size() || c.dim(0) != p.hidden_size()) {
        throw ShapeError("lstm_step: state size mismatch, params expect " +
                         std::to_string(p.hidden_size()));
    }
    auto gate = [&](const Tensor& w, const Tensor& u, const Tensor& b) {
        return add(add(matvec(w, x), matvec(u, h)), b);
    };
    Tensor i = sigmoid(gate(p.wi, p.ui, p.bi));
    Tensor f = sigmoid(gate(p.wf, p.uf, p.bf));
    Tensor g = tanh(gate(p.wg, p.ug, p.bg));
    Tensor o = sigmoid(gate(p.wo, p.uo, p.bo));
    Tensor c_next = add(mul(f, c), mul(i, g));
    Tensor h_next = mul(o, tanh(c_next));
    return {h_next, c_next};
}

Tensor init_uniform(std::vector<int> shape, int fan_in, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Tensor t = Tensor::zeros(std::move(shape), true);
    auto v = t.mutable_values();
    for (size_t i = 0; i < v.size(); ++i) v[i] = rng.uniform(-bound, bound);
    return t;
}

}  // namespace maip
