#pragma once

#include <vector>

#include "maip/tensor.hpp"

namespace maip {

// First-order optimizer over a fixed parameter list. Adam (bias-corrected
// adaptive moments) is the default; plain gradient descent is selectable.
// Updates are in place and deterministic given the accumulated state.
class Optimizer {
  public:
    enum class Kind { Sgd, Adam };

    struct Config {
        Kind kind = Kind::Adam;
        double lr = 1e-3;
        double beta1 = 0.9;
        double beta2 = 0.999;
        double eps = 1e-8;
    };

    Optimizer(std::vector<Tensor> params, Config config);

    // Applies one update from the gradients currently held in each parameter.
    // ConfigError if any registered tensor is not trainable.
    void step();

    void zero_grad();

    const Config& config() const { return config_; }

  private:
    std::vector<Tensor> params_;
    Config config_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    long t_ = 0;
};

}  // namespace maip
