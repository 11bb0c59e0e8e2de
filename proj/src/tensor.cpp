#include "maip/tensor.hpp"

#include <cmath>
#include <utility>

namespace maip {

namespace {

thread_local Tape* g_current_tape = nullptr;

int numel_of(std::span<const int> shape) {
    int n = 1;
    for (int e : shape) {
        if (e <= 0) throw ShapeError("tensor extents must be positive, got " + shape_str(shape));
        n *= e;
    }
    return n;
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
    }
}

bool grad_enabled(const Tensor& a) { return Tape::current() != nullptr && a.requires_grad(); }

}  // namespace

std::string shape_str(std::span<const int> shape) {
    std::string s = "[";
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

Tensor make_op_output(std::vector<int> shape, bool requires_grad) {
    auto d = std::make_shared<Tensor::Data>();
    d->shape = std::move(shape);
    d->values.resize(static_cast<size_t>(numel_of(d->shape)), 0.0);
    d->requires_grad = requires_grad;
    if (requires_grad) d->grad.resize(d->values.size(), 0.0);
    return Tensor(std::move(d));
}

Tensor Tensor::zeros(std::vector<int> shape, bool requires_grad) {
    return make_op_output(std::move(shape), requires_grad);
}

Tensor Tensor::full(std::vector<int> shape, double value, bool requires_grad) {
    Tensor t = make_op_output(std::move(shape), requires_grad);
    for (double& v : t.data_->values) v = value;
    return t;
}

Tensor Tensor::from_values(std::vector<int> shape, std::vector<double> values,
                           bool requires_grad) {
    Tensor t = make_op_output(std::move(shape), requires_grad);
    if (values.size() != t.data_->values.size()) {
        throw ShapeError("from_values: " + std::to_string(values.size()) +
                         " values for shape " + shape_str(t.shape()));
    }
    t.data_->values = std::move(values);
    return t;
}

Tensor Tensor::scalar(double value, bool requires_grad) {
    return from_values({1}, {value}, requires_grad);
}

void Tensor::zero_grad() {
    for (double& g : data_->grad) g = 0.0;
}

double Tensor::item() const {
    if (numel() != 1) throw UsageError("item() on non-scalar tensor " + shape_str(shape()));
    return data_->values[0];
}

bool Tensor::all_finite() const {
    for (double v : data_->values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

// --- Tape ---

Tape::Tape() : previous_(g_current_tape) { g_current_tape = this; }

Tape::~Tape() { g_current_tape = previous_; }

Tape* Tape::current() { return g_current_tape; }

void Tape::push(const char* op, std::function<void()> apply) {
    nodes_.push_back({op, std::move(apply)});
}

void Tape::reset() {
    nodes_.clear();
    consumed_ = false;
}

void Tape::backward(const Tensor& loss) {
    if (loss.numel() != 1) {
        throw UsageError("backward: loss must be scalar, got " + shape_str(loss.shape()));
    }
    if (!loss.requires_grad()) {
        throw UsageError("backward: loss does not depend on any differentiable tensor");
    }
    if (consumed_) {
        throw UsageError("backward: tape already consumed; reset() before recording again");
    }
    consumed_ = true;
    loss.data()->grad[0] += 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) it->apply();
}

// --- op helpers ---

namespace {

// Shared boilerplate for out = f(a) elementwise with df given output/input.
template <typename Fwd, typename Bwd>
Tensor unary_elementwise(const char* name, const Tensor& a, Fwd fwd, Bwd dfdx) {
    Tensor out = make_op_output(a.shape(), grad_enabled(a));
    auto av = a.values();
    auto ov = out.mutable_values();
    for (size_t i = 0; i < av.size(); ++i) ov[i] = fwd(av[i]);
    if (out.requires_grad()) {
        Tape::current()->push(name, [ad = a.data(), od = out.data(), dfdx]() {
            for (size_t i = 0; i < od->grad.size(); ++i) {
                ad->grad[i] += od->grad[i] * dfdx(ad->values[i], od->values[i]);
            }
        });
    }
    return out;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "add");
    Tensor out = make_op_output(a.shape(), grad_enabled(a) || grad_enabled(b));
    auto ov = out.mutable_values();
    for (int i = 0; i < out.numel(); ++i) ov[i] = a.at(i) + b.at(i);
    if (out.requires_grad()) {
        Tape::current()->push("add", [ad = a.data(), bd = b.data(), od = out.data()]() {
            for (size_t i = 0; i < od->grad.size(); ++i) {
                if (ad->requires_grad) ad->grad[i] += od->grad[i];
                if (bd->requires_grad) bd->grad[i] += od->grad[i];
            }
        });
    }
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "sub");
    Tensor out = make_op_output(a.shape(), grad_enabled(a) || grad_enabled(b));
    auto ov = out.mutable_values();
    for (int i = 0; i < out.numel(); ++i) ov[i] = a.at(i) - b.at(i);
    if (out.requires_grad()) {
        Tape::current()->push("sub", [ad = a.data(), bd = b.data(), od = out.data()]() {
            for (size_t i = 0; i < od->grad.size(); ++i) {
                if (ad->requires_grad) ad->grad[i] += od->grad[i];
                if (bd->requires_grad) bd->grad[i] -= od->grad[i];
            }
        });
    }
    return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "mul");
    Tensor out = make_op_output(a.shape(), grad_enabled(a) || grad_enabled(b));
    auto ov = out.mutable_values();
    for (int i = 0; i < out.numel(); ++i) ov[i] = a.at(i) * b.at(i);
    if (out.requires_grad()) {
        Tape::current()->push("mul", [ad = a.data(), bd = b.data(), od = out.data()]() {
            for (size_t i = 0; i < od->grad.size(); ++i) {
                if (ad->requires_grad) ad->grad[i] += od->grad[i] * bd->values[i];
                if (bd->requires_grad) bd->grad[i] += od->grad[i] * ad->values[i];
            }
        });
    }
    return out;
}

Tensor scale(const Tensor& a, double c) {
    Tensor out = make_op_output(a.shape(), grad_enabled(a));
    auto ov = out.mutable_values();
    for (int i = 0; i < out.numel(); ++i) ov[i] = a.at(i) * c;
    if (out.requires_grad()) {
        Tape::current()->push("scale", [ad = a.data(), od = out.data(), c]() {
            for (size_t i = 0; i < od->grad.size(); ++i) ad->grad[i] += od->grad[i] * c;
        });
    }
    return out;
}

Tensor add_const(const Tensor& a, double c) {
    Tensor out = make_op_output(a.shape(), grad_enabled(a));
    auto ov = out.mutable_values();
    for (int i = 0; i < out.numel(); ++i) ov[i] = a.at(i) + c;
    if (out.requires_grad()) {
        Tape::current()->push("add_const", [ad = a.data(), od = out.data()]() {
            for (size_t i = 0; i < od->grad.size(); ++i) ad->grad[i] += od->grad[i];
        });
    }
    return out;
}

Tensor matvec(const Tensor& w, const Tensor& x) {
    if (w.rank() != 2 || x.rank() != 1 || w.dim(1) != x.dim(0)) {
        throw ShapeError("matvec: incompatible shapes " + shape_str(w.shape()) + " x " +
                         shape_str(x.shape()));
    }
    const int m = w.dim(0), n = w.dim(1);
    Tensor out = make_op_output({m}, grad_enabled(w) || grad_enabled(x));
    auto wv = w.values();
    auto xv = x.values();
    auto ov = out.mutable_values();
    for (int i = 0; i < m; ++i) {
        double acc = 0.0;
        const double* row = &wv[static_cast<size_t>(i) * n];
        for (int j = 0; j < n; ++j) acc += row[j] * xv[static_cast<size_t>(j)];
        ov[static_cast<size_t>(i)] = acc;
    }
    if (out.requires_grad()) {
        Tape::current()->push("matvec", [wd = w.data(), xd = x.data(), od = out.data(), m, n]() {
            for (int i = 0; i < m; ++i) {
                const double go = od->grad[static_cast<size_t>(i)];
                if (go == 0.0) continue;
                const size_t row = static_cast<size_t>(i) * n;
                if (wd->requires_grad) {
                    for (int j = 0; j < n; ++j)
                        wd->grad[row + j] += go * xd->values[static_cast<size_t>(j)];
                }
                if (xd->requires_grad) {
                    for (int j = 0; j < n; ++j)
                        xd->grad[static_cast<size_t>(j)] += go * wd->values[row + j];
                }
            }
        });
    }
    return out;
}

Tensor tanh(const Tensor& a) {
    return unary_elementwise("tanh", a, [](double x) { return std::tanh(x); },
                             [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& a) {
    return unary_elementwise("sigmoid", a,
                             [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
                             [](double, double y) { return y * (1.0 - y); });
}

Tensor relu(const Tensor& a) {
    return unary_elementwise("relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
                             [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor softplus(const Tensor& a) {
    auto fwd = [](double x) {
        if (x > 30.0) return x;
        if (x < -30.0) return std::exp(x);
        return std::log1p(std::exp(x));
    };
    return unary_elementwise("softplus", a, fwd,
                             [](double x, double) { return 1.0 / (1.0 + std::exp(-x)); });
}

Tensor exp(const Tensor& a) {
    return unary_elementwise("exp", a, [](double x) { return std::exp(x); },
                             [](double, double y) { return y; });
}

double wrap_degrees_scalar(double deg) {
    double w = deg - 360.0 * std::floor((deg + 180.0) / 360.0);
    // floor rounding can land exactly on +180 for inputs like -180 - 1e-14
    if (w >= 180.0) w -= 360.0;
    return w;
}

Tensor wrap_degrees(const Tensor& a) {
    return unary_elementwise("wrap_degrees", a,
                             [](double x) { return wrap_degrees_scalar(x); },
                             [](double, double) { return 1.0; });
}

Tensor sum(const Tensor& a) {
    Tensor out = make_op_output({1}, grad_enabled(a));
    double acc = 0.0;
    for (double v : a.values()) acc += v;
    out.set(0, acc);
    if (out.requires_grad()) {
        Tape::current()->push("sum", [ad = a.data(), od = out.data()]() {
            const double go = od->grad[0];
            for (double& g : ad->grad) g += go;
        });
    }
    return out;
}

Tensor concat(const Tensor& a, const Tensor& b) {
    if (a.rank() != 1 || b.rank() != 1) {
        throw ShapeError("concat: 1-D tensors required, got " + shape_str(a.shape()) + " and " +
                         shape_str(b.shape()));
    }
    const int na = a.dim(0), nb = b.dim(0);
    Tensor out = make_op_output({na + nb}, grad_enabled(a) || grad_enabled(b));
    auto ov = out.mutable_values();
    for (int i = 0; i < na; ++i) ov[static_cast<size_t>(i)] = a.at(i);
    for (int i = 0; i < nb; ++i) ov[static_cast<size_t>(na + i)] = b.at(i);
    if (out.requires_grad()) {
        Tape::current()->push("concat", [ad = a.data(), bd = b.data(), od = out.data(), na, nb]() {
            if (ad->requires_grad) {
                for (int i = 0; i < na; ++i)
                    ad->grad[static_cast<size_t>(i)] += od->grad[static_cast<size_t>(i)];
            }
            if (bd->requires_grad) {
                for (int i = 0; i < nb; ++i)
                    bd->grad[static_cast<size_t>(i)] += od->grad[static_cast<size_t>(na + i)];
            }
        });
    }
    return out;
}

Tensor slice(const Tensor& a, int start, int len) {
    if (a.rank() != 1) throw ShapeError("slice: 1-D tensor required, got " + shape_str(a.shape()));
    if (start < 0 || len <= 0 || start + len > a.dim(0)) {
        throw ShapeError("slice: range [" + std::to_string(start) + "," +
                         std::to_string(start + len) + ") out of bounds for " +
                         shape_str(a.shape()));
    }
    Tensor out = make_op_output({len}, grad_enabled(a));
    auto ov = out.mutable_values();
    for (int i = 0; i < len; ++i) ov[static_cast<size_t>(i)] = a.at(start + i);
    if (out.requires_grad()) {
        Tape::current()->push("slice", [ad = a.data(), od = out.data(), start, len]() {
            for (int i = 0; i < len; ++i)
                ad->grad[static_cast<size_t>(start + i)] += od->grad[static_cast<size_t>(i)];
        });
    }
    return out;
}

Tensor flatten(const Tensor& a) {
    Tensor out = make_op_output({a.numel()}, grad_enabled(a));
    auto ov = out.mutable_values();
    auto av = a.values();
    for (size_t i = 0; i < av.size(); ++i) ov[i] = av[i];
    if (out.requires_grad()) {
        Tape::current()->push("flatten", [ad = a.data(), od = out.data()]() {
            for (size_t i = 0; i < od->grad.size(); ++i) ad->grad[i] += od->grad[i];
        });
    }
    return out;
}

Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias, int stride) {
    if (input.rank() != 3) {
        throw ShapeError("conv2d: input must be [C,H,W], got " + shape_str(input.shape()));
    }
    if (kernel.rank() != 4 || kernel.dim(2) != 3 || kernel.dim(3) != 3) {
        throw ShapeError("conv2d: kernel must be [K,C,3,3], got " + shape_str(kernel.shape()));
    }
    const int c = input.dim(0), h = input.dim(1), w = input.dim(2);
    const int k = kernel.dim(0);
    if (kernel.dim(1) != c) {
        throw ShapeError("conv2d: kernel expects " + std::to_string(kernel.dim(1)) +
                         " input channels, input has " + std::to_string(c));
    }
    if (bias.rank() != 1 || bias.dim(0) != k) {
        throw ShapeError("conv2d: bias must be [" + std::to_string(k) + "], got " +
                         shape_str(bias.shape()));
    }
    if (h < 3 || w < 3) throw ShapeError("conv2d: spatial extent must be >= 3");
    if (stride != 1 && stride != 2) throw ShapeError("conv2d: stride must be 1 or 2");

    const int oh = (h - 3) / stride + 1;
    const int ow = (w - 3) / stride + 1;
    const bool rg = grad_enabled(input) || grad_enabled(kernel) || grad_enabled(bias);
    Tensor out = make_op_output({k, oh, ow}, rg);

    auto in = input.values();
    auto ker = kernel.values();
    auto bv = bias.values();
    auto ov = out.mutable_values();
    for (int ok = 0; ok < k; ++ok) {
        for (int oi = 0; oi < oh; ++oi) {
            for (int oj = 0; oj < ow; ++oj) {
                double acc = bv[static_cast<size_t>(ok)];
                for (int ic = 0; ic < c; ++ic) {
                    const size_t in_base =
                        (static_cast<size_t>(ic) * h + oi * stride) * w + oj * stride;
                    const size_t k_base = (static_cast<size_t>(ok) * c + ic) * 9;
                    for (int u = 0; u < 3; ++u) {
                        const double* irow = &in[in_base + static_cast<size_t>(u) * w];
                        const double* krow = &ker[k_base + static_cast<size_t>(u) * 3];
                        acc += irow[0] * krow[0] + irow[1] * krow[1] + irow[2] * krow[2];
                    }
                }
                ov[(static_cast<size_t>(ok) * oh + oi) * ow + oj] = acc;
            }
        }
    }

    if (out.requires_grad()) {
        Tape::current()->push(
            "conv2d", [id = input.data(), kd = kernel.data(), bd = bias.data(), od = out.data(),
                       c, h, w, k, oh, ow, stride]() {
                for (int ok = 0; ok < k; ++ok) {
                    for (int oi = 0; oi < oh; ++oi) {
                        for (int oj = 0; oj < ow; ++oj) {
                            const double go =
                                od->grad[(static_cast<size_t>(ok) * oh + oi) * ow + oj];
                            if (go == 0.0) continue;
                            if (bd->requires_grad) bd->grad[static_cast<size_t>(ok)] += go;
                            for (int ic = 0; ic < c; ++ic) {
                                const size_t in_base =
                                    (static_cast<size_t>(ic) * h + oi * stride) * w + oj * stride;
                                const size_t k_base = (static_cast<size_t>(ok) * c + ic) * 9;
                                for (int u = 0; u < 3; ++u) {
                                    const size_t ir = in_base + static_cast<size_t>(u) * w;
                                    const size_t kr = k_base + static_cast<size_t>(u) * 3;
                                    for (int v = 0; v < 3; ++v) {
                                        if (id->requires_grad)
                                            id->grad[ir + v] += go * kd->values[kr + v];
                                        if (kd->requires_grad)
                                            kd->grad[kr + v] += go * id->values[ir + v];
                                    }
                                }
                            }
                        }
                    }
                }
            });
    }
    return out;
}

}  // namespace maip
