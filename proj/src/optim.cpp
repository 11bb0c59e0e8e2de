#include "maip/optim.hpp"

#include <cmath>

namespace maip {

Optimizer::Optimizer(std::vector<Tensor> params, Config config)
    : params_(std::move(params)), config_(config) {
    for (const Tensor& p : params_) {
        if (!p.requires_grad()) {
            throw ConfigError("optimizer: parameter " + shape_str(p.shape()) +
                              " has no gradient buffer (requires_grad is false)");
        }
    }
    if (config_.kind == Kind::Adam) {
        m_.reserve(params_.size());
        v_.reserve(params_.size());
        for (const Tensor& p : params_) {
            m_.emplace_back(static_cast<size_t>(p.numel()), 0.0);
            v_.emplace_back(static_cast<size_t>(p.numel()), 0.0);
        }
    }
}

void Optimizer::step() {
    ++t_;
    if (config_.kind == Kind::Sgd) {
        for (Tensor& p : params_) {
            auto val = p.mutable_values();
            auto g = p.grad();
            for (size_t i = 0; i < val.size(); ++i) val[i] -= config_.lr * g[i];
        }
        return;
    }
    const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    for (size_t k = 0; k < params_.size(); ++k) {
        auto val = params_[k].mutable_values();
        auto g = params_[k].grad();
        auto& m = m_[k];
        auto& v = v_[k];
        for (size_t i = 0; i < val.size(); ++i) {
            m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
            v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            val[i] -= config_.lr * mhat / (std::sqrt(vhat) + config_.eps);
        }
    }
}

void Optimizer::zero_grad() {
    for (Tensor& p : params_) p.zero_grad();
}

}  // namespace maip
