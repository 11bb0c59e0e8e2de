#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "maip/errors.hpp"

namespace maip {

// N-dimensional double tensor participating in reverse-mode differentiation.
// Values are row-major; the gradient buffer exists iff requires_grad.
// Tensor is a cheap handle: copies share the underlying storage.
class Tensor {
  public:
    struct Data {
        std::vector<int> shape;
        std::vector<double> values;
        std::vector<double> grad;  // same length as values iff requires_grad
        bool requires_grad = false;
    };

    Tensor() : data_(std::make_shared<Data>()) {}

    static Tensor zeros(std::vector<int> shape, bool requires_grad = false);
    static Tensor full(std::vector<int> shape, double value, bool requires_grad = false);
    static Tensor from_values(std::vector<int> shape, std::vector<double> values,
                              bool requires_grad = false);
    static Tensor scalar(double value, bool requires_grad = false);

    const std::vector<int>& shape() const { return data_->shape; }
    int numel() const { return static_cast<int>(data_->values.size()); }
    int dim(int i) const { return data_->shape[static_cast<size_t>(i)]; }
    int rank() const { return static_cast<int>(data_->shape.size()); }

    std::span<const double> values() const { return data_->values; }
    std::span<double> mutable_values() { return data_->values; }
    double at(int i) const { return data_->values[static_cast<size_t>(i)]; }
    void set(int i, double v) { data_->values[static_cast<size_t>(i)] = v; }

    bool requires_grad() const { return data_->requires_grad; }
    std::span<const double> grad() const { return data_->grad; }
    std::span<double> mutable_grad() { return data_->grad; }
    void zero_grad();

    // Scalar extraction; UsageError on non-scalar tensors.
    double item() const;

    bool all_finite() const;

    std::shared_ptr<Data> data() const { return data_; }

  private:
    explicit Tensor(std::shared_ptr<Data> d) : data_(std::move(d)) {}
    std::shared_ptr<Data> data_;

    friend Tensor make_op_output(std::vector<int> shape, bool requires_grad);
};

// Recording context for one forward pass (a Wengert list). Ops append their
// backward closures in execution order, which is a valid topological order of
// the compute graph; backward() walks it once in reverse. A tape is consumed
// by backward() and must be reset() before recording a new graph.
//
// The innermost live Tape is the recording target. Code that constructs
// tensors with no Tape alive (e.g. finite-difference probes, inference)
// runs gradient-free.
class Tape {
  public:
    Tape();
    ~Tape();
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // Seeds d(loss)/d(loss) = 1 and accumulates gradients into every
    // requires_grad tensor reachable from the recorded graph.
    void backward(const Tensor& loss);

    void reset();
    size_t node_count() const { return nodes_.size(); }

    static Tape* current();

    struct Node {
        const char* op;
        std::function<void()> apply;
    };
    void push(const char* op, std::function<void()> apply);

  private:
    std::vector<Node> nodes_;
    bool consumed_ = false;
    Tape* previous_ = nullptr;
};

// --- primitive ops (each records its backward rule on the current tape) ---

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);   // elementwise
Tensor scale(const Tensor& a, double c);
Tensor add_const(const Tensor& a, double c);
Tensor matvec(const Tensor& w, const Tensor& x);  // [m,n] x [n] -> [m]
Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor softplus(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor sum(const Tensor& a);                      // -> scalar
Tensor concat(const Tensor& a, const Tensor& b);  // 1-D
Tensor slice(const Tensor& a, int start, int len);  // 1-D contiguous
Tensor flatten(const Tensor& a);
// Wraps every element to [-180, 180); derivative is 1 almost everywhere.
Tensor wrap_degrees(const Tensor& a);

// 2-D convolution, valid padding, 3x3 kernels only.
// input [C,H,W], kernel [K,C,3,3], bias [K], stride in {1,2}.
Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias, int stride);

double wrap_degrees_scalar(double deg);

std::string shape_str(std::span<const int> shape);

}  // namespace maip
