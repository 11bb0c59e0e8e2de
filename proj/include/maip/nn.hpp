#pragma once

#include "maip/rng.hpp"
#include "maip/tensor.hpp"

namespace maip {

enum class Activation { Identity, Tanh, Relu, Sigmoid };

Tensor apply_activation(const Tensor& x, Activation act);

// g(Wx + b). W is [m,n], x is [n], b is [m].
Tensor dense(const Tensor& x, const Tensor& w, const Tensor& b, Activation act);

// Gate parameters of one LSTM cell with input size n and hidden size m.
// Each gate: W [m,n] on the input, U [m,m] on the previous hidden, b [m].
struct LstmParams {
    Tensor wi, ui, bi;  // input gate
    Tensor wf, uf, bf;  // forget gate
    Tensor wg, ug, bg;  // candidate
    Tensor wo, uo, bo;  // output gate

    static LstmParams zeros(int input_size, int hidden_size);
    int hidden_size() const { return bi.dim(0); }
    int input_size() const { return wi.dim(1); }
};

struct LstmStepOut {
    Tensor h;
    Tensor c;
};

// One cell update: i,f,o sigmoid gates, tanh candidate,
// c' = f*c + i*g, h' = o*tanh(c').
LstmStepOut lstm_step(const Tensor& x, const Tensor& h, const Tensor& c, const LstmParams& p);

// Uniform init in +-1/sqrt(fan_in), drawn in index order from rng.
Tensor init_uniform(std::vector<int> shape, int fan_in, Rng& rng);

}  // namespace maip
