#include "tec/layers.hpp"

#include <algorithm>
#include <cmath>

namespace tec::nn {

namespace {

// fan-in/fan-out from the parameter shape: dense [in,out], conv
// [K...,Cin,Cout] with the kernel taps folded into both.
std::pair<std::int64_t, std::int64_t> fans(const Shape& shape) {
  if (shape.size() == 1) return {shape[0], shape[0]};
  std::int64_t taps = 1;
  for (std::size_t i = 0; i + 2 < shape.size(); ++i) taps *= shape[i];
  const std::int64_t in = shape[shape.size() - 2], out = shape[shape.size() - 1];
  return {taps * in, taps * out};
}

}  // namespace

Parameter& ParamRegistry::create(const std::string& name, Shape shape, Init init) {
  require(index_.find(name) == index_.end(),
          "params: duplicate parameter name \"" + name + "\"");
  std::vector<double> values(std::size_t(shape_numel(shape)), 0.0);
  switch (init) {
    case Init::kZeros:
      break;
    case Init::kOnes:
      std::fill(values.begin(), values.end(), 1.0);
      break;
    case Init::kXavier: {
      auto [fan_in, fan_out] = fans(shape);
      const double limit = std::sqrt(6.0 / double(fan_in + fan_out));
      Rng rng(seed_, name);
      for (auto& v : values) v = rng.uniform(-limit, limit);
      break;
    }
    case Init::kLstmBias: {
      // [4H] with the forget segment at one
      const std::int64_t h = shape[0] / 4;
      for (std::int64_t i = h; i < 2 * h; ++i) values[std::size_t(i)] = 1.0;
      break;
    }
  }
  storage_.push_back(Parameter{name, Tensor::from(shape, std::move(values), true), true});
  Parameter& p = storage_.back();
  order_.push_back(&p);
  index_[name] = &p;
  return p;
}

Parameter& ParamRegistry::create_buffer(const std::string& name, Shape shape, double fill) {
  require(index_.find(name) == index_.end(),
          "params: duplicate parameter name \"" + name + "\"");
  storage_.push_back(Parameter{name, Tensor::full(shape, fill, false), false});
  Parameter& p = storage_.back();
  order_.push_back(&p);
  index_[name] = &p;
  return p;
}

Parameter* ParamRegistry::find(const std::string& name) {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : it->second;
}

const Parameter* ParamRegistry::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : it->second;
}

std::vector<Parameter*> ParamRegistry::trainable() {
  std::vector<Parameter*> out;
  for (Parameter* p : order_)
    if (p->trainable) out.push_back(p);
  return out;
}

std::vector<Parameter*> ParamRegistry::all() { return order_; }

std::int64_t ParamRegistry::count_elements(const std::string& prefix) const {
  std::int64_t total = 0;
  for (const Parameter* p : order_) {
    if (!p->trainable) continue;
    if (p->name.compare(0, prefix.size(), prefix) == 0) total += p->tensor.numel();
  }
  return total;
}

void ParamRegistry::zero_grads() {
  for (Parameter* p : order_) p->tensor.zero_grad();
}

Dense::Dense(ParamRegistry& reg, const std::string& name, std::int64_t in, std::int64_t out) {
  w_ = &reg.create(name + "/weight", {in, out}, ParamRegistry::Init::kXavier);
  b_ = &reg.create(name + "/bias", {out}, ParamRegistry::Init::kZeros);
}

Tensor Dense::forward(const Tensor& x) const {
  return add_rowvec(matmul(x, w_->tensor), b_->tensor);
}

Conv1dLayer::Conv1dLayer(ParamRegistry& reg, const std::string& name, std::int64_t k,
                         std::int64_t in_ch, std::int64_t out_ch, int stride)
    : stride_(stride) {
  kernel_ = &reg.create(name + "/kernel", {k, in_ch, out_ch}, ParamRegistry::Init::kXavier);
  bias_ = &reg.create(name + "/bias", {out_ch}, ParamRegistry::Init::kZeros);
}

Tensor Conv1dLayer::forward(const Tensor& x) const {
  return add_rowvec(conv1d(x, kernel_->tensor, stride_), bias_->tensor);
}

Conv2dLayer::Conv2dLayer(ParamRegistry& reg, const std::string& name, std::int64_t kh,
                         std::int64_t kw, std::int64_t in_ch, std::int64_t out_ch,
                         int stride_h, int stride_w)
    : stride_h_(stride_h), stride_w_(stride_w) {
  kernel_ =
      &reg.create(name + "/kernel", {kh, kw, in_ch, out_ch}, ParamRegistry::Init::kXavier);
  bias_ = &reg.create(name + "/bias", {out_ch}, ParamRegistry::Init::kZeros);
}

Tensor Conv2dLayer::forward(const Tensor& x) const {
  Tensor y = conv2d(x, kernel_->tensor, stride_h_, stride_w_);
  const std::int64_t h = y.dim(0), w = y.dim(1), c = y.dim(2);
  Tensor flat = reshape(y, {h * w, c});
  return reshape(add_rowvec(flat, bias_->tensor), {h, w, c});
}

BatchNorm::BatchNorm(ParamRegistry& reg, const std::string& name, std::int64_t features,
                     double momentum, double eps)
    : momentum_(momentum), eps_(eps) {
  gamma_ = &reg.create(name + "/gamma", {features}, ParamRegistry::Init::kOnes);
  beta_ = &reg.create(name + "/beta", {features}, ParamRegistry::Init::kZeros);
  running_mean_ = &reg.create_buffer(name + "/running_mean", {features}, 0.0);
  running_var_ = &reg.create_buffer(name + "/running_var", {features}, 1.0);
}

Tensor BatchNorm::forward(const Tensor& x, bool training) const {
  require(x.rank() == 2 && x.dim(1) == gamma_->tensor.dim(0),
          "batch_norm: expected [N," + std::to_string(gamma_->tensor.dim(0)) + "], got " +
              shape_str(x.shape()));
  const std::int64_t n = x.dim(0), c = x.dim(1);
  if (training) {
    require(n >= 2, "batch_norm: training mode needs at least 2 rows, got " +
                        std::to_string(n));
    Tensor mean = scale(sum_rows(x), 1.0 / double(n));
    Tensor centered = sub_rowvec(x, mean);
    Tensor var = scale(sum_rows(mul(centered, centered)), 1.0 / double(n));
    Tensor inv_std = rsqrt_eps(var, eps_);
    Tensor normalized = mul_rowvec(centered, inv_std);

    // refresh running statistics outside the tape
    auto& rm = running_mean_->tensor.data();
    auto& rv = running_var_->tensor.data();
    for (std::int64_t i = 0; i < c; ++i) {
      rm[i] = momentum_ * rm[i] + (1.0 - momentum_) * mean.data()[i];
      rv[i] = momentum_ * rv[i] + (1.0 - momentum_) * var.data()[i];
    }
    return add_rowvec(mul_rowvec(normalized, gamma_->tensor), beta_->tensor);
  }

  // inference: constants derived from the running estimates
  std::vector<double> shift(std::size_t(c)), gain(std::size_t(c));
  for (std::int64_t i = 0; i < c; ++i) {
    gain[i] = 1.0 / std::sqrt(running_var_->tensor.data()[i] + eps_);
    shift[i] = running_mean_->tensor.data()[i];
  }
  Tensor centered = sub_rowvec(x, Tensor::from({c}, std::move(shift)));
  Tensor normalized = mul_rowvec(centered, Tensor::from({c}, std::move(gain)));
  return add_rowvec(mul_rowvec(normalized, gamma_->tensor), beta_->tensor);
}

LstmLayer::LstmLayer(ParamRegistry& reg, const std::string& name, std::int64_t in,
                     std::int64_t hidden)
    : hidden_(hidden) {
  w_input_ = &reg.create(name + "/w_input", {in, 4 * hidden}, ParamRegistry::Init::kXavier);
  w_hidden_ =
      &reg.create(name + "/w_hidden", {hidden, 4 * hidden}, ParamRegistry::Init::kXavier);
  bias_ = &reg.create(name + "/bias", {4 * hidden}, ParamRegistry::Init::kLstmBias);
}

LstmStep LstmLayer::initial_state() const {
  return {Tensor::zeros({1, hidden_}), Tensor::zeros({1, hidden_})};
}

LstmStep LstmLayer::step(const Tensor& x, const LstmStep& prev) const {
  return lstm_cell(x, prev, w_input_->tensor, w_hidden_->tensor, bias_->tensor);
}

Tensor LstmLayer::forward(const Tensor& seq, bool reverse_time) const {
  require(seq.rank() == 2, "lstm: expected [T,C], got " + shape_str(seq.shape()));
  const std::int64_t T = seq.dim(0);
  LstmStep state = initial_state();
  std::vector<Tensor> outputs(std::size_t(T));
  for (std::int64_t i = 0; i < T; ++i) {
    const std::int64_t t = reverse_time ? T - 1 - i : i;
    state = step(slice_rows(seq, t, t + 1), state);
    outputs[std::size_t(t)] = state.h;
  }
  return concat_rows(outputs);
}

BiLstm::BiLstm(ParamRegistry& reg, const std::string& name, std::int64_t in,
               std::int64_t hidden)
    : fwd_(reg, name + "/fwd", in, hidden), bwd_(reg, name + "/bwd", in, hidden) {}

Tensor BiLstm::forward(const Tensor& seq) const {
  return concat_cols(fwd_.forward(seq, false), bwd_.forward(seq, true));
}

BiConvLstm::BiConvLstm(ParamRegistry& reg, const std::string& name, std::int64_t in_ch,
                       std::int64_t hidden_ch)
    : hidden_(hidden_ch) {
  auto make = [&](const std::string& dir, Parameter*& wi, Parameter*& wh, Parameter*& b) {
    wi = &reg.create(name + "/" + dir + "/w_input", {3, in_ch, 4 * hidden_ch},
                     ParamRegistry::Init::kXavier);
    wh = &reg.create(name + "/" + dir + "/w_hidden", {3, hidden_ch, 4 * hidden_ch},
                     ParamRegistry::Init::kXavier);
    b = &reg.create(name + "/" + dir + "/bias", {4 * hidden_ch},
                    ParamRegistry::Init::kLstmBias);
  };
  make("fwd", wi_fwd_, wh_fwd_, b_fwd_);
  make("bwd", wi_bwd_, wh_bwd_, b_bwd_);
}

std::vector<Tensor> BiConvLstm::run_direction(const std::vector<Tensor>& steps, bool reverse,
                                              const Parameter* wi, const Parameter* wh,
                                              const Parameter* b) const {
  const std::int64_t T = std::int64_t(steps.size());
  const std::int64_t F = steps[0].dim(0);
  const std::int64_t H = hidden_;
  Tensor h = Tensor::zeros({F, H});
  Tensor c = Tensor::zeros({F, H});
  std::vector<Tensor> out(steps.size());
  for (std::int64_t i = 0; i < T; ++i) {
    const std::int64_t t = reverse ? T - 1 - i : i;
    Tensor gates = add_rowvec(
        add(conv1d(steps[std::size_t(t)], wi->tensor, 1), conv1d(h, wh->tensor, 1)),
        b->tensor);
    Tensor in_gate = sigmoid(slice_cols(gates, 0, H));
    Tensor forget = sigmoid(slice_cols(gates, H, 2 * H));
    Tensor cand = tanh_op(slice_cols(gates, 2 * H, 3 * H));
    Tensor out_gate = sigmoid(slice_cols(gates, 3 * H, 4 * H));
    c = add(mul(forget, c), mul(in_gate, cand));
    h = mul(out_gate, tanh_op(c));
    out[std::size_t(t)] = h;
  }
  return out;
}

std::vector<Tensor> BiConvLstm::forward(const std::vector<Tensor>& steps) const {
  require(!steps.empty(), "conv_lstm: empty sequence");
  auto fwd = run_direction(steps, false, wi_fwd_, wh_fwd_, b_fwd_);
  auto bwd = run_direction(steps, true, wi_bwd_, wh_bwd_, b_bwd_);
  std::vector<Tensor> out(steps.size());
  for (std::size_t t = 0; t < steps.size(); ++t) out[t] = concat_cols(fwd[t], bwd[t]);
  return out;
}

Embedding::Embedding(ParamRegistry& reg, const std::string& name, std::int64_t vocab,
                     std::int64_t dim) {
  table_ = &reg.create(name + "/table", {vocab, dim}, ParamRegistry::Init::kXavier);
}

Tensor Embedding::forward(const std::vector<int>& ids) const {
  require(!ids.empty(), "embedding: empty id sequence");
  return gather_rows(table_->tensor, ids);
}

}  // namespace tec::nn
