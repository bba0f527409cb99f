#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tec/common.hpp"

namespace tec::nn {

using Shape = std::vector<std::int64_t>;

std::string shape_str(const Shape& s);
std::int64_t shape_numel(const Shape& s);

namespace detail {
struct TensorImpl {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty until a backward pass touches it
  bool requires_grad = false;
  bool on_tape = false;
};
}  // namespace detail

/// Value-semantics handle to an immutable-by-convention buffer. Ops return
/// fresh tensors; parameter updates mutate data() in place between tapes.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> data, bool requires_grad = false);
  static Tensor scalar(double value);

  bool defined() const { return bool(impl_); }
  const Shape& shape() const { return impl_->shape; }
  std::int64_t numel() const { return std::int64_t(impl_->data.size()); }
  std::int64_t dim(std::size_t i) const { return impl_->shape[i]; }
  std::size_t rank() const { return impl_->shape.size(); }

  std::vector<double>& data() { return impl_->data; }
  const std::vector<double>& data() const { return impl_->data; }
  double value() const;  // scalar tensors only

  bool requires_grad() const { return impl_->requires_grad; }
  bool on_tape() const { return impl_->on_tape; }

  // Gradient buffer; allocates zeros on first access.
  std::vector<double>& grad();
  bool grad_allocated() const { return !impl_->grad.empty(); }
  void zero_grad();

  detail::TensorImpl* impl() const { return impl_.get(); }

 private:
  explicit Tensor(std::shared_ptr<detail::TensorImpl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<detail::TensorImpl> impl_;
  friend class Tape;
};

/// Records the forward graph; creation order is a topological order, so the
/// backward pass walks it once, in reverse.
class Tape {
 public:
  struct Node {
    const char* op;
    std::vector<Tensor> inputs;
    Tensor output;
    std::function<void()> backward;
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  std::size_t size() const { return nodes_.size(); }
  bool consumed() const { return consumed_; }

  static Tape* current();

  /// RAII activation; ops record onto the innermost active tape.
  class Scope {
   public:
    explicit Scope(Tape& tape);
    ~Scope();
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    Tape* previous_;
  };

  void record(Node node);

  friend void backward(const Tensor& loss, Tape& tape);

 private:
  std::vector<Node> nodes_;
  bool consumed_ = false;
};

// Reverse-mode sweep from a scalar loss. Populates grad() for every
// requires_grad tensor reachable from the loss; leaves the rest untouched.
// A tape can be swept once; higher-order gradients are rejected.
void backward(const Tensor& loss, Tape& tape);

// When enabled (default), every op verifies its output is finite and throws
// naming the op otherwise.
void set_nan_guard(bool enabled);
bool nan_guard();

// ---- forward ops ----------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);            // [m,k]x[k,n]
Tensor add(const Tensor& a, const Tensor& b);                // same shape
Tensor sub(const Tensor& a, const Tensor& b);                // same shape
Tensor mul(const Tensor& a, const Tensor& b);                // elementwise
Tensor scale(const Tensor& a, double c);
Tensor add_rowvec(const Tensor& x, const Tensor& v);         // [m,n] + [n]
Tensor sub_rowvec(const Tensor& x, const Tensor& v);
Tensor mul_rowvec(const Tensor& x, const Tensor& v);
Tensor relu(const Tensor& x);
Tensor tanh_op(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor exp_op(const Tensor& x);
Tensor log_op(const Tensor& x);                              // x > 0 required
Tensor softplus(const Tensor& x);
Tensor abs_op(const Tensor& x);
Tensor softmax_rows(const Tensor& x);                        // rowwise, stable
Tensor rsqrt_eps(const Tensor& x, double eps);               // 1/sqrt(x+eps)
Tensor sum_all(const Tensor& x);                             // -> [1]
Tensor sum_rows(const Tensor& x);                            // [m,n] -> [n]
Tensor reshape(const Tensor& x, Shape new_shape);
Tensor slice_cols(const Tensor& x, std::int64_t c0, std::int64_t c1);
Tensor slice_rows(const Tensor& x, std::int64_t r0, std::int64_t r1);
Tensor concat_rows(const std::vector<Tensor>& parts);        // same cols
Tensor concat_cols(const Tensor& a, const Tensor& b);        // same rows

// SAME-padded convolutions (output length ceil(in/stride), zeros outside).
Tensor conv1d(const Tensor& x, const Tensor& kernel, int stride);        // [T,Ci],[K,Ci,Co]
Tensor conv2d(const Tensor& x, const Tensor& kernel, int stride_h, int stride_w);
// x [H,W,Ci], kernel [Kh,Kw,Ci,Co]

Tensor gather_rows(const Tensor& table, const std::vector<int>& ids);

// phi_j = sum_k alpha_k * exp(-beta_k * (kappa_k - j)^2) over j in [0, n_pos)
Tensor gmm_weights(const Tensor& alpha, const Tensor& beta, const Tensor& kappa,
                   std::int64_t n_pos);

// Per-row two-class cross entropy with per-row weights, averaged over rows.
Tensor weighted_cross_entropy(const Tensor& logits, const std::vector<int>& targets,
                              const std::vector<double>& weights);

// LSTM cell built from the primitives above; gate order [i, f, g, o].
struct LstmStep {
  Tensor h;  // [1, H]
  Tensor c;  // [1, H]
};
LstmStep lstm_cell(const Tensor& x, const LstmStep& prev, const Tensor& w_input,
                   const Tensor& w_hidden, const Tensor& bias);

}  // namespace tec::nn
