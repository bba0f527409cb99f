#include "tec/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

namespace tec::nn {

namespace {

std::atomic<bool> g_nan_guard{true};
thread_local Tape* t_current_tape = nullptr;

void ensure_grad(detail::TensorImpl* impl) {
  if (impl->grad.empty()) impl->grad.assign(impl->data.size(), 0.0);
}

bool wants_grad(const Tensor& t) { return t.requires_grad() || t.on_tape(); }

void guard_finite(const char* op, const Tensor& t) {
  if (!nan_guard()) return;
  for (double v : t.data()) {
    if (!std::isfinite(v)) fail(std::string(op) + ": produced a non-finite value");
  }
}

}  // namespace

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << ",";
    os << s[i];
  }
  os << "]";
  return os.str();
}

std::int64_t shape_numel(const Shape& s) {
  std::int64_t n = 1;
  for (auto d : s) n *= d;
  return n;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  auto impl = std::make_shared<detail::TensorImpl>();
  impl->data.assign(std::size_t(shape_numel(shape)), value);
  impl->shape = std::move(shape);
  impl->requires_grad = requires_grad;
  return Tensor(std::move(impl));
}

Tensor Tensor::from(Shape shape, std::vector<double> data, bool requires_grad) {
  require(shape_numel(shape) == std::int64_t(data.size()),
          "tensor: shape " + shape_str(shape) + " does not match buffer of " +
              std::to_string(data.size()) + " values");
  auto impl = std::make_shared<detail::TensorImpl>();
  impl->shape = std::move(shape);
  impl->data = std::move(data);
  impl->requires_grad = requires_grad;
  return Tensor(std::move(impl));
}

Tensor Tensor::scalar(double value) { return from({1}, {value}); }

double Tensor::value() const {
  require(numel() == 1, "tensor: value() requires a scalar, got " + shape_str(shape()));
  return impl_->data[0];
}

std::vector<double>& Tensor::grad() {
  ensure_grad(impl_.get());
  return impl_->grad;
}

void Tensor::zero_grad() {
  if (!impl_->grad.empty()) std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0);
}

Tape* Tape::current() { return t_current_tape; }

Tape::Scope::Scope(Tape& tape) : previous_(t_current_tape) { t_current_tape = &tape; }
Tape::Scope::~Scope() { t_current_tape = previous_; }

void Tape::record(Node node) { nodes_.push_back(std::move(node)); }

void backward(const Tensor& loss, Tape& tape) {
  require(loss.defined() && loss.numel() == 1,
          "backward: loss must be a scalar tensor");
  require(!tape.consumed_,
          "backward: tape already swept (higher-order gradients are not supported)");
  tape.consumed_ = true;

  ensure_grad(loss.impl());
  loss.impl()->grad[0] = 1.0;

  for (auto it = tape.nodes_.rbegin(); it != tape.nodes_.rend(); ++it) {
    if (it->output.grad_allocated()) it->backward();
  }
}

void set_nan_guard(bool enabled) { g_nan_guard.store(enabled); }
bool nan_guard() { return g_nan_guard.load(); }

namespace {

// Registers the node when grads can flow; otherwise the op stays eager.
void maybe_record(const char* op, std::vector<Tensor> inputs, const Tensor& output,
                  std::function<void()> backward_fn) {
  guard_finite(op, output);
  Tape* tape = Tape::current();
  if (!tape) return;
  bool any = false;
  for (const auto& t : inputs) any = any || wants_grad(t);
  if (!any) return;
  output.impl()->on_tape = true;
  tape->record(Tape::Node{op, std::move(inputs), output, std::move(backward_fn)});
}

void check_rank2(const char* op, const Tensor& t) {
  require(t.rank() == 2, std::string(op) + ": expected a rank-2 tensor, got " +
                             shape_str(t.shape()));
}

template <class Fwd, class Dfn>
Tensor unary(const char* op, const Tensor& x, Fwd fwd, Dfn dfn) {
  Tensor y = Tensor::zeros(x.shape());
  const auto& xs = x.data();
  auto& ys = y.data();
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = fwd(xs[i]);
  maybe_record(op, {x}, y, [x, y, dfn]() {
    if (!wants_grad(x)) return;
    auto& dx = const_cast<Tensor&>(x).grad();
    const auto& dy = y.impl()->grad;
    const auto& xs = x.data();
    const auto& ys = y.data();
    for (std::size_t i = 0; i < xs.size(); ++i) dx[i] += dy[i] * dfn(xs[i], ys[i]);
  });
  return y;
}

void check_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), std::string(op) + ": shape mismatch " +
                                      shape_str(a.shape()) + " vs " + shape_str(b.shape()));
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  check_rank2("matmul", a);
  check_rank2("matmul", b);
  require(a.dim(1) == b.dim(0), "matmul: inner dimensions differ, " +
                                    shape_str(a.shape()) + " x " + shape_str(b.shape()));
  const std::int64_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  Tensor y = Tensor::zeros({m, n});
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* py = y.data().data();
  for (std::int64_t i = 0; i < m; ++i)
    for (std::int64_t p = 0; p < k; ++p) {
      const double av = pa[i * k + p];
      if (av == 0.0) continue;
      const double* brow = pb + p * n;
      double* yrow = py + i * n;
      for (std::int64_t j = 0; j < n; ++j) yrow[j] += av * brow[j];
    }
  maybe_record("matmul", {a, b}, y, [a, b, y]() {
    const auto& dy = y.impl()->grad;
    const std::int64_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    if (wants_grad(a)) {
      auto& da = const_cast<Tensor&>(a).grad();
      const auto& bd = b.data();
      for (std::int64_t i = 0; i < m; ++i)
        for (std::int64_t p = 0; p < k; ++p) {
          double acc = 0.0;
          const double* dyrow = dy.data() + i * n;
          const double* brow = bd.data() + p * n;
          for (std::int64_t j = 0; j < n; ++j) acc += dyrow[j] * brow[j];
          da[i * k + p] += acc;
        }
    }
    if (wants_grad(b)) {
      auto& db = const_cast<Tensor&>(b).grad();
      const auto& ad = a.data();
      for (std::int64_t p = 0; p < k; ++p)
        for (std::int64_t i = 0; i < m; ++i) {
          const double av = ad[i * k + p];
          if (av == 0.0) continue;
          const double* dyrow = dy.data() + i * n;
          double* dbrow = db.data() + p * n;
          for (std::int64_t j = 0; j < n; ++j) dbrow[j] += av * dyrow[j];
        }
    }
  });
  return y;
}

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape("add", a, b);
  Tensor y = Tensor::zeros(a.shape());
  for (std::size_t i = 0; i < y.data().size(); ++i)
    y.data()[i] = a.data()[i] + b.data()[i];
  maybe_record("add", {a, b}, y, [a, b, y]() {
    const auto& dy = y.impl()->grad;
    for (const Tensor* t : {&a, &b}) {
      if (!wants_grad(*t)) continue;
      auto& d = const_cast<Tensor*>(t)->grad();
      for (std::size_t i = 0; i < dy.size(); ++i) d[i] += dy[i];
    }
  });
  return y;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape("sub", a, b);
  Tensor y = Tensor::zeros(a.shape());
  for (std::size_t i = 0; i < y.data().size(); ++i)
    y.data()[i] = a.data()[i] - b.data()[i];
  maybe_record("sub", {a, b}, y, [a, b, y]() {
    const auto& dy = y.impl()->grad;
    if (wants_grad(a)) {
      auto& da = const_cast<Tensor&>(a).grad();
      for (std::size_t i = 0; i < dy.size(); ++i) da[i] += dy[i];
    }
    if (wants_grad(b)) {
      auto& db = const_cast<Tensor&>(b).grad();
      for (std::size_t i = 0; i < dy.size(); ++i) db[i] -= dy[i];
    }
  });
  return y;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape("mul", a, b);
  Tensor y = Tensor::zeros(a.shape());
  for (std::size_t i = 0; i < y.data().size(); ++i)
    y.data()[i] = a.data()[i] * b.data()[i];
  maybe_record("mul", {a, b}, y, [a, b, y]() {
    const auto& dy = y.impl()->grad;
    if (wants_grad(a)) {
      auto& da = const_cast<Tensor&>(a).grad();
      const auto& bd = b.data();
      for (std::size_t i = 0; i < dy.size(); ++i) da[i] += dy[i] * bd[i];
    }
    if (wants_grad(b)) {
      auto& db = const_cast<Tensor&>(b).grad();
      const auto& ad = a.data();
      for (std::size_t i = 0; i < dy.size(); ++i) db[i] += dy[i] * ad[i];
    }
  });
  return y;
}

Tensor scale(const Tensor& a, double c) {
  Tensor y = Tensor::zeros(a.shape());
  for (std::size_t i = 0; i < y.data().size(); ++i) y.data()[i] = a.data()[i] * c;
  maybe_record("scale", {a}, y, [a, y, c]() {
    if (!wants_grad(a)) return;
    auto& da = const_cast<Tensor&>(a).grad();
    const auto& dy = y.impl()->grad;
    for (std::size_t i = 0; i < dy.size(); ++i) da[i] += dy[i] * c;
  });
  return y;
}

namespace {

enum class RowVecOp { kAdd, kSub, kMul };

Tensor rowvec_op(const char* name, RowVecOp kind, const Tensor& x, const Tensor& v) {
  check_rank2(name, x);
  require(v.rank() == 1 && v.dim(0) == x.dim(1),
          std::string(name) + ": vector " + shape_str(v.shape()) +
              " does not match matrix " + shape_str(x.shape()));
  const std::int64_t m = x.dim(0), n = x.dim(1);
  Tensor y = Tensor::zeros(x.shape());
  for (std::int64_t r = 0; r < m; ++r)
    for (std::int64_t c = 0; c < n; ++c) {
      const double xv = x.data()[r * n + c];
      const double vv = v.data()[c];
      double out = 0.0;
      switch (kind) {
        case RowVecOp::kAdd: out = xv + vv; break;
        case RowVecOp::kSub: out = xv - vv; break;
        case RowVecOp::kMul: out = xv * vv; break;
      }
      y.data()[r * n + c] = out;
    }
  maybe_record(name, {x, v}, y, [x, v, y, kind]() {
    const auto& dy = y.impl()->grad;
    const std::int64_t m = x.dim(0), n = x.dim(1);
    if (wants_grad(x)) {
      auto& dx = const_cast<Tensor&>(x).grad();
      for (std::int64_t r = 0; r < m; ++r)
        for (std::int64_t c = 0; c < n; ++c) {
          const double g = dy[r * n + c];
          dx[r * n + c] += kind == RowVecOp::kMul ? g * v.data()[c] : g;
        }
    }
    if (wants_grad(v)) {
      auto& dv = const_cast<Tensor&>(v).grad();
      for (std::int64_t r = 0; r < m; ++r)
        for (std::int64_t c = 0; c < n; ++c) {
          const double g = dy[r * n + c];
          switch (kind) {
            case RowVecOp::kAdd: dv[c] += g; break;
            case RowVecOp::kSub: dv[c] -= g; break;
            case RowVecOp::kMul: dv[c] += g * x.data()[r * n + c]; break;
          }
        }
    }
  });
  return y;
}

}  // namespace

Tensor add_rowvec(const Tensor& x, const Tensor& v) {
  return rowvec_op("add_rowvec", RowVecOp::kAdd, x, v);
}
Tensor sub_rowvec(const Tensor& x, const Tensor& v) {
  return rowvec_op("sub_rowvec", RowVecOp::kSub, x, v);
}
Tensor mul_rowvec(const Tensor& x, const Tensor& v) {
  return rowvec_op("mul_rowvec", RowVecOp::kMul, x, v);
}

Tensor relu(const Tensor& x) {
  return unary("relu", x, [](double v) { return v > 0.0 ? v : 0.0; },
               [](double xv, double) { return xv > 0.0 ? 1.0 : 0.0; });
}

Tensor tanh_op(const Tensor& x) {
  return unary("tanh", x, [](double v) { return std::tanh(v); },
               [](double, double yv) { return 1.0 - yv * yv; });
}

Tensor sigmoid(const Tensor& x) {
  return unary("sigmoid", x,
               [](double v) { return 1.0 / (1.0 + std::exp(-v)); },
               [](double, double yv) { return yv * (1.0 - yv); });
}

Tensor exp_op(const Tensor& x) {
  return unary("exp", x, [](double v) { return std::exp(v); },
               [](double, double yv) { return yv; });
}

Tensor log_op(const Tensor& x) {
  for (double v : x.data())
    require(v > 0.0, "log: input must be strictly positive");
  return unary("log", x, [](double v) { return std::log(v); },
               [](double xv, double) { return 1.0 / xv; });
}

Tensor softplus(const Tensor& x) {
  // log(1 + exp(x)) with the usual large-x shortcut
  return unary("softplus", x,
               [](double v) { return v > 30.0 ? v : std::log1p(std::exp(v)); },
               [](double xv, double) { return 1.0 / (1.0 + std::exp(-xv)); });
}

Tensor abs_op(const Tensor& x) {
  return unary("abs", x, [](double v) { return std::fabs(v); },
               [](double xv, double) { return xv > 0.0 ? 1.0 : (xv < 0.0 ? -1.0 : 0.0); });
}

Tensor rsqrt_eps(const Tensor& x, double eps) {
  for (double v : x.data())
    require(v + eps > 0.0, "rsqrt_eps: input + eps must be positive");
  return unary("rsqrt_eps", x,
               [eps](double v) { return 1.0 / std::sqrt(v + eps); },
               [eps](double xv, double) {
                 const double r = 1.0 / std::sqrt(xv + eps);
                 return -0.5 * r * r * r;
               });
}

Tensor softmax_rows(const Tensor& x) {
  check_rank2("softmax_rows", x);
  const std::int64_t m = x.dim(0), n = x.dim(1);
  Tensor y = Tensor::zeros(x.shape());
  for (std::int64_t r = 0; r < m; ++r) {
    const double* xr = x.data().data() + r * n;
    double* yr = y.data().data() + r * n;
    double mx = xr[0];
    for (std::int64_t c = 1; c < n; ++c) mx = std::max(mx, xr[c]);
    double sum = 0.0;
    for (std::int64_t c = 0; c < n; ++c) {
      yr[c] = std::exp(xr[c] - mx);
      sum += yr[c];
    }
    for (std::int64_t c = 0; c < n; ++c) yr[c] /= sum;
  }
  maybe_record("softmax_rows", {x}, y, [x, y]() {
    if (!wants_grad(x)) return;
    auto& dx = const_cast<Tensor&>(x).grad();
    const auto& dy = y.impl()->grad;
    const std::int64_t m = x.dim(0), n = x.dim(1);
    for (std::int64_t r = 0; r < m; ++r) {
      const double* yr = y.data().data() + r * n;
      const double* dyr = dy.data() + r * n;
      double dot = 0.0;
      for (std::int64_t c = 0; c < n; ++c) dot += dyr[c] * yr[c];
      for (std::int64_t c = 0; c < n; ++c) dx[r * n + c] += yr[c] * (dyr[c] - dot);
    }
  });
  return y;
}

Tensor sum_all(const Tensor& x) {
  double s = 0.0;
  for (double v : x.data()) s += v;
  Tensor y = Tensor::from({1}, {s});
  maybe_record("sum_all", {x}, y, [x, y]() {
    if (!wants_grad(x)) return;
    auto& dx = const_cast<Tensor&>(x).grad();
    const double g = y.impl()->grad[0];
    for (auto& d : dx) d += g;
  });
  return y;
}

Tensor sum_rows(const Tensor& x) {
  check_rank2("sum_rows", x);
  const std::int64_t m = x.dim(0), n = x.dim(1);
  Tensor y = Tensor::zeros({n});
  for (std::int64_t r = 0; r < m; ++r)
    for (std::int64_t c = 0; c < n; ++c) y.data()[c] += x.data()[r * n + c];
  maybe_record("sum_rows", {x}, y, [x, y]() {
    if (!wants_grad(x)) return;
    auto& dx = const_cast<Tensor&>(x).grad();
    const auto& dy = y.impl()->grad;
    const std::int64_t m = x.dim(0), n = x.dim(1);
    for (std::int64_t r = 0; r < m; ++r)
      for (std::int64_t c = 0; c < n; ++c) dx[r * n + c] += dy[c];
  });
  return y;
}

Tensor reshape(const Tensor& x, Shape new_shape) {
  require(shape_numel(new_shape) == x.numel(),
          "reshape: cannot view " + shape_str(x.shape()) + " as " + shape_str(new_shape));
  Tensor y = Tensor::from(std::move(new_shape), x.data());
  maybe_record("reshape", {x}, y, [x, y]() {
    if (!wants_grad(x)) return;
    auto& dx = const_cast<Tensor&>(x).grad();
    const auto& dy = y.impl()->grad;
    for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += dy[i];
  });
  return y;
}

Tensor slice_cols(const Tensor& x, std::int64_t c0, std::int64_t c1) {
  check_rank2("slice_cols", x);
  require(0 <= c0 && c0 < c1 && c1 <= x.dim(1), "slice_cols: bad column range");
  const std::int64_t m = x.dim(0), n = x.dim(1), w = c1 - c0;
  Tensor y = Tensor::zeros({m, w});
  for (std::int64_t r = 0; r < m; ++r)
    for (std::int64_t c = 0; c < w; ++c)
      y.data()[r * w + c] = x.data()[r * n + c0 + c];
  maybe_record("slice_cols", {x}, y, [x, y, c0]() {
    if (!wants_grad(x)) return;
    auto& dx = const_cast<Tensor&>(x).grad();
    const auto& dy = y.impl()->grad;
    const std::int64_t m = y.dim(0), w = y.dim(1), n = x.dim(1);
    for (std::int64_t r = 0; r < m; ++r)
      for (std::int64_t c = 0; c < w; ++c) dx[r * n + c0 + c] += dy[r * w + c];
  });
  return y;
}

Tensor slice_rows(const Tensor& x, std::int64_t r0, std::int64_t r1) {
  check_rank2("slice_rows", x);
  require(0 <= r0 && r0 < r1 && r1 <= x.dim(0), "slice_rows: bad row range");
  const std::int64_t n = x.dim(1), h = r1 - r0;
  Tensor y = Tensor::zeros({h, n});
  std::copy(x.data().begin() + r0 * n, x.data().begin() + r1 * n, y.data().begin());
  maybe_record("slice_rows", {x}, y, [x, y, r0]() {
    if (!wants_grad(x)) return;
    auto& dx = const_cast<Tensor&>(x).grad();
    const auto& dy = y.impl()->grad;
    const std::int64_t n = x.dim(1), h = y.dim(0);
    for (std::int64_t r = 0; r < h; ++r)
      for (std::int64_t c = 0; c < n; ++c) dx[(r0 + r) * n + c] += dy[r * n + c];
  });
  return y;
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  require(!parts.empty(), "concat_rows: no inputs");
  const std::int64_t n = parts[0].dim(1);
  std::int64_t rows = 0;
  for (const auto& p : parts) {
    check_rank2("concat_rows", p);
    require(p.dim(1) == n, "concat_rows: column mismatch " + shape_str(p.shape()) +
                               " vs expected " + std::to_string(n) + " columns");
    rows += p.dim(0);
  }
  Tensor y = Tensor::zeros({rows, n});
  std::int64_t r = 0;
  for (const auto& p : parts) {
    std::copy(p.data().begin(), p.data().end(), y.data().begin() + r * n);
    r += p.dim(0);
  }
  maybe_record("concat_rows", parts, y, [parts, y]() {
    const auto& dy = y.impl()->grad;
    const std::int64_t n = y.dim(1);
    std::int64_t r = 0;
    for (const auto& p : parts) {
      if (wants_grad(p)) {
        auto& dp = const_cast<Tensor&>(p).grad();
        for (std::size_t i = 0; i < dp.size(); ++i) dp[i] += dy[std::size_t(r * n) + i];
      }
      r += p.dim(0);
    }
  });
  return y;
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  check_rank2("concat_cols", a);
  check_rank2("concat_cols", b);
  require(a.dim(0) == b.dim(0), "concat_cols: row mismatch " + shape_str(a.shape()) +
                                    " vs " + shape_str(b.shape()));
  const std::int64_t m = a.dim(0), na = a.dim(1), nb = b.dim(1);
  Tensor y = Tensor::zeros({m, na + nb});
  for (std::int64_t r = 0; r < m; ++r) {
    std::copy(a.data().begin() + r * na, a.data().begin() + (r + 1) * na,
              y.data().begin() + r * (na + nb));
    std::copy(b.data().begin() + r * nb, b.data().begin() + (r + 1) * nb,
              y.data().begin() + r * (na + nb) + na);
  }
  maybe_record("concat_cols", {a, b}, y, [a, b, y]() {
    const auto& dy = y.impl()->grad;
    const std::int64_t m = a.dim(0), na = a.dim(1), nb = b.dim(1);
    if (wants_grad(a)) {
      auto& da = const_cast<Tensor&>(a).grad();
      for (std::int64_t r = 0; r < m; ++r)
        for (std::int64_t c = 0; c < na; ++c) da[r * na + c] += dy[r * (na + nb) + c];
    }
    if (wants_grad(b)) {
      auto& db = const_cast<Tensor&>(b).grad();
      for (std::int64_t r = 0; r < m; ++r)
        for (std::int64_t c = 0; c < nb; ++c) db[r * nb + c] += dy[r * (na + nb) + na + c];
    }
  });
  return y;
}

namespace {

std::int64_t same_pad_begin(std::int64_t in, std::int64_t k, std::int64_t stride,
                            std::int64_t out) {
  const std::int64_t total = (out - 1) * stride + k - in;
  return std::max<std::int64_t>(0, total / 2);
}

}  // namespace

Tensor conv1d(const Tensor& x, const Tensor& kernel, int stride) {
  require(x.rank() == 2, "conv1d: input must be [T, Cin], got " + shape_str(x.shape()));
  require(kernel.rank() == 3, "conv1d: kernel must be [K, Cin, Cout], got " +
                                  shape_str(kernel.shape()));
  require(stride >= 1, "conv1d: stride must be >= 1");
  const std::int64_t T = x.dim(0), ci = x.dim(1);
  const std::int64_t K = kernel.dim(0), kci = kernel.dim(1), co = kernel.dim(2);
  require(ci == kci, "conv1d: channel mismatch, input " + shape_str(x.shape()) +
                         " vs kernel " + shape_str(kernel.shape()));
  const std::int64_t out_t = (T + stride - 1) / stride;
  const std::int64_t pad = same_pad_begin(T, K, stride, out_t);

  Tensor y = Tensor::zeros({out_t, co});
  const double* px = x.data().data();
  const double* pk = kernel.data().data();
  double* py = y.data().data();
  for (std::int64_t t = 0; t < out_t; ++t)
    for (std::int64_t k = 0; k < K; ++k) {
      const std::int64_t ti = t * stride + k - pad;
      if (ti < 0 || ti >= T) continue;
      for (std::int64_t c = 0; c < ci; ++c) {
        const double xv = px[ti * ci + c];
        if (xv == 0.0) continue;
        const double* krow = pk + (k * ci + c) * co;
        double* yrow = py + t * co;
        for (std::int64_t o = 0; o < co; ++o) yrow[o] += xv * krow[o];
      }
    }
  maybe_record("conv1d", {x, kernel}, y, [x, kernel, y, stride, pad]() {
    const auto& dy = y.impl()->grad;
    const std::int64_t T = x.dim(0), ci = x.dim(1);
    const std::int64_t K = kernel.dim(0), co = kernel.dim(2);
    const std::int64_t out_t = y.dim(0);
    for (std::int64_t t = 0; t < out_t; ++t)
      for (std::int64_t k = 0; k < K; ++k) {
        const std::int64_t ti = t * stride + k - pad;
        if (ti < 0 || ti >= T) continue;
        for (std::int64_t c = 0; c < ci; ++c) {
          const double* dyrow = dy.data() + t * co;
          if (wants_grad(x)) {
            auto& dx = const_cast<Tensor&>(x).grad();
            const double* krow = kernel.data().data() + (k * ci + c) * co;
            double acc = 0.0;
            for (std::int64_t o = 0; o < co; ++o) acc += dyrow[o] * krow[o];
            dx[ti * ci + c] += acc;
          }
          if (wants_grad(kernel)) {
            auto& dk = const_cast<Tensor&>(kernel).grad();
            const double xv = x.data()[ti * ci + c];
            if (xv != 0.0) {
              double* dkrow = dk.data() + (k * ci + c) * co;
              for (std::int64_t o = 0; o < co; ++o) dkrow[o] += xv * dyrow[o];
            }
          }
        }
      }
  });
  return y;
}

Tensor conv2d(const Tensor& x, const Tensor& kernel, int stride_h, int stride_w) {
  require(x.rank() == 3, "conv2d: input must be [H, W, Cin], got " + shape_str(x.shape()));
  require(kernel.rank() == 4, "conv2d: kernel must be [Kh, Kw, Cin, Cout], got " +
                                  shape_str(kernel.shape()));
  require(stride_h >= 1 && stride_w >= 1, "conv2d: strides must be >= 1");
  const std::int64_t H = x.dim(0), W = x.dim(1), ci = x.dim(2);
  const std::int64_t kh = kernel.dim(0), kw = kernel.dim(1);
  require(kernel.dim(2) == ci, "conv2d: channel mismatch, input " + shape_str(x.shape()) +
                                   " vs kernel " + shape_str(kernel.shape()));
  const std::int64_t co = kernel.dim(3);
  const std::int64_t out_h = (H + stride_h - 1) / stride_h;
  const std::int64_t out_w = (W + stride_w - 1) / stride_w;
  const std::int64_t pad_h = same_pad_begin(H, kh, stride_h, out_h);
  const std::int64_t pad_w = same_pad_begin(W, kw, stride_w, out_w);

  Tensor y = Tensor::zeros({out_h, out_w, co});
  const double* px = x.data().data();
  const double* pk = kernel.data().data();
  double* py = y.data().data();
  for (std::int64_t oh = 0; oh < out_h; ++oh)
    for (std::int64_t ow = 0; ow < out_w; ++ow)
      for (std::int64_t a = 0; a < kh; ++a) {
        const std::int64_t ih = oh * stride_h + a - pad_h;
        if (ih < 0 || ih >= H) continue;
        for (std::int64_t b = 0; b < kw; ++b) {
          const std::int64_t iw = ow * stride_w + b - pad_w;
          if (iw < 0 || iw >= W) continue;
          for (std::int64_t c = 0; c < ci; ++c) {
            const double xv = px[(ih * W + iw) * ci + c];
            if (xv == 0.0) continue;
            const double* krow = pk + ((a * kw + b) * ci + c) * co;
            double* yrow = py + (oh * out_w + ow) * co;
            for (std::int64_t o = 0; o < co; ++o) yrow[o] += xv * krow[o];
          }
        }
      }
  maybe_record("conv2d", {x, kernel}, y, [x, kernel, y, stride_h, stride_w, pad_h, pad_w]() {
    const auto& dy = y.impl()->grad;
    const std::int64_t H = x.dim(0), W = x.dim(1), ci = x.dim(2);
    const std::int64_t kh = kernel.dim(0), kw = kernel.dim(1), co = kernel.dim(3);
    const std::int64_t out_h = y.dim(0), out_w = y.dim(1);
    for (std::int64_t oh = 0; oh < out_h; ++oh)
      for (std::int64_t ow = 0; ow < out_w; ++ow)
        for (std::int64_t a = 0; a < kh; ++a) {
          const std::int64_t ih = oh * stride_h + a - pad_h;
          if (ih < 0 || ih >= H) continue;
          for (std::int64_t b = 0; b < kw; ++b) {
            const std::int64_t iw = ow * stride_w + b - pad_w;
            if (iw < 0 || iw >= W) continue;
            const double* dyrow = dy.data() + (oh * out_w + ow) * co;
            for (std::int64_t c = 0; c < ci; ++c) {
              if (wants_grad(x)) {
                auto& dx = const_cast<Tensor&>(x).grad();
                const double* krow = kernel.data().data() + ((a * kw + b) * ci + c) * co;
                double acc = 0.0;
                for (std::int64_t o = 0; o < co; ++o) acc += dyrow[o] * krow[o];
                dx[(ih * W + iw) * ci + c] += acc;
              }
              if (wants_grad(kernel)) {
                auto& dk = const_cast<Tensor&>(kernel).grad();
                const double xv = x.data()[(ih * W + iw) * ci + c];
                if (xv != 0.0) {
                  double* dkrow = dk.data() + ((a * kw + b) * ci + c) * co;
                  for (std::int64_t o = 0; o < co; ++o) dkrow[o] += xv * dyrow[o];
                }
              }
            }
          }
        }
  });
  return y;
}

Tensor gather_rows(const Tensor& table, const std::vector<int>& ids) {
  check_rank2("gather_rows", table);
  const std::int64_t v = table.dim(0), d = table.dim(1);
  for (int id : ids)
    require(id >= 0 && id < v, "gather_rows: token id " + std::to_string(id) +
                                   " outside table of " + std::to_string(v) + " rows");
  Tensor y = Tensor::zeros({std::int64_t(ids.size()), d});
  for (std::size_t i = 0; i < ids.size(); ++i)
    std::copy(table.data().begin() + ids[i] * d, table.data().begin() + (ids[i] + 1) * d,
              y.data().begin() + std::int64_t(i) * d);
  maybe_record("gather_rows", {table}, y, [table, y, ids]() {
    if (!wants_grad(table)) return;
    auto& dt = const_cast<Tensor&>(table).grad();
    const auto& dy = y.impl()->grad;
    const std::int64_t d = table.dim(1);
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::int64_t c = 0; c < d; ++c)
        dt[ids[i] * d + c] += dy[std::int64_t(i) * d + c];
  });
  return y;
}

Tensor gmm_weights(const Tensor& alpha, const Tensor& beta, const Tensor& kappa,
                   std::int64_t n_pos) {
  for (const Tensor* t : {&alpha, &beta, &kappa})
    require(t->rank() == 2 && t->dim(0) == 1,
            "gmm_weights: mixture parameters must be [1, K]");
  const std::int64_t K = alpha.dim(1);
  require(beta.dim(1) == K && kappa.dim(1) == K, "gmm_weights: component count mismatch");
  require(n_pos >= 1, "gmm_weights: need at least one source position");

  Tensor y = Tensor::zeros({1, n_pos});
  for (std::int64_t j = 0; j < n_pos; ++j) {
    double phi = 0.0;
    for (std::int64_t k = 0; k < K; ++k) {
      const double d = kappa.data()[k] - double(j);
      phi += alpha.data()[k] * std::exp(-beta.data()[k] * d * d);
    }
    y.data()[j] = phi;
  }
  maybe_record("gmm_weights", {alpha, beta, kappa}, y, [alpha, beta, kappa, y, n_pos]() {
    const auto& dy = y.impl()->grad;
    const std::int64_t K = alpha.dim(1);
    for (std::int64_t j = 0; j < n_pos; ++j) {
      const double g = dy[j];
      if (g == 0.0) continue;
      for (std::int64_t k = 0; k < K; ++k) {
        const double d = kappa.data()[k] - double(j);
        const double e = std::exp(-beta.data()[k] * d * d);
        if (wants_grad(alpha)) const_cast<Tensor&>(alpha).grad()[k] += g * e;
        if (wants_grad(beta))
          const_cast<Tensor&>(beta).grad()[k] += g * alpha.data()[k] * e * (-d * d);
        if (wants_grad(kappa))
          const_cast<Tensor&>(kappa).grad()[k] +=
              g * alpha.data()[k] * e * (-2.0 * beta.data()[k] * d);
      }
    }
  });
  return y;
}

Tensor weighted_cross_entropy(const Tensor& logits, const std::vector<int>& targets,
                              const std::vector<double>& weights) {
  check_rank2("weighted_cross_entropy", logits);
  const std::int64_t T = logits.dim(0), C = logits.dim(1);
  require(std::int64_t(targets.size()) == T && std::int64_t(weights.size()) == T,
          "weighted_cross_entropy: length mismatch of logits " + shape_str(logits.shape()) +
              ", " + std::to_string(targets.size()) + " targets, " +
              std::to_string(weights.size()) + " weights");
  for (int t : targets)
    require(t >= 0 && t < C, "weighted_cross_entropy: target class out of range");

  double total = 0.0;
  for (std::int64_t r = 0; r < T; ++r) {
    const double* lr = logits.data().data() + r * C;
    double mx = lr[0];
    for (std::int64_t c = 1; c < C; ++c) mx = std::max(mx, lr[c]);
    double sum = 0.0;
    for (std::int64_t c = 0; c < C; ++c) sum += std::exp(lr[c] - mx);
    const double lse = mx + std::log(sum);
    total += weights[r] * (lse - lr[targets[r]]);
  }
  Tensor y = Tensor::from({1}, {total / double(T)});
  maybe_record("weighted_cross_entropy", {logits}, y, [logits, y, targets, weights]() {
    if (!wants_grad(logits)) return;
    auto& dl = const_cast<Tensor&>(logits).grad();
    const double g = y.impl()->grad[0];
    const std::int64_t T = logits.dim(0), C = logits.dim(1);
    for (std::int64_t r = 0; r < T; ++r) {
      const double* lr = logits.data().data() + r * C;
      double mx = lr[0];
      for (std::int64_t c = 1; c < C; ++c) mx = std::max(mx, lr[c]);
      double sum = 0.0;
      for (std::int64_t c = 0; c < C; ++c) sum += std::exp(lr[c] - mx);
      for (std::int64_t c = 0; c < C; ++c) {
        const double p = std::exp(lr[c] - mx) / sum;
        const double onehot = targets[r] == c ? 1.0 : 0.0;
        dl[r * C + c] += g * weights[r] * (p - onehot) / double(T);
      }
    }
  });
  return y;
}

LstmStep lstm_cell(const Tensor& x, const LstmStep& prev, const Tensor& w_input,
                   const Tensor& w_hidden, const Tensor& bias) {
  const std::int64_t H = prev.h.dim(1);
  require(w_input.dim(1) == 4 * H && w_hidden.dim(1) == 4 * H && bias.dim(0) == 4 * H,
          "lstm_cell: weight shapes disagree with hidden size " + std::to_string(H));
  Tensor gates =
      add_rowvec(add(matmul(x, w_input), matmul(prev.h, w_hidden)), bias);
  Tensor i = sigmoid(slice_cols(gates, 0, H));
  Tensor f = sigmoid(slice_cols(gates, H, 2 * H));
  Tensor g = tanh_op(slice_cols(gates, 2 * H, 3 * H));
  Tensor o = sigmoid(slice_cols(gates, 3 * H, 4 * H));
  LstmStep next;
  next.c = add(mul(f, prev.c), mul(i, g));
  next.h = mul(o, tanh_op(next.c));
  return next;
}

}  // namespace tec::nn
