#pragma once

#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "tec/rng.hpp"
#include "tec/tensor.hpp"

namespace tec::nn {

/// Named trainable tensor; the name doubles as the checkpoint key.
struct Parameter {
  std::string name;
  Tensor tensor;
  bool trainable = true;
};

/// Owns a model's parameters and non-trainable buffers (e.g. batch-norm
/// running statistics). Initialization is seeded per name, so the values a
/// parameter receives never depend on creation order.
class ParamRegistry {
 public:
  enum class Init { kXavier, kZeros, kOnes, kLstmBias };

  explicit ParamRegistry(std::uint64_t seed) : seed_(seed) {}

  Parameter& create(const std::string& name, Shape shape, Init init);
  Parameter& create_buffer(const std::string& name, Shape shape, double fill);

  Parameter* find(const std::string& name);
  const Parameter* find(const std::string& name) const;

  std::vector<Parameter*> trainable();
  std::vector<Parameter*> all();  // trainable + buffers, creation order

  // Total elements of trainable parameters whose name starts with prefix.
  std::int64_t count_elements(const std::string& prefix = "") const;

  void zero_grads();

 private:
  std::uint64_t seed_;
  std::deque<Parameter> storage_;
  std::vector<Parameter*> order_;
  std::unordered_map<std::string, Parameter*> index_;
};

class Dense {
 public:
  Dense() = default;
  Dense(ParamRegistry& reg, const std::string& name, std::int64_t in, std::int64_t out);
  Tensor forward(const Tensor& x) const;  // [m,in] -> [m,out]

 private:
  Parameter* w_ = nullptr;
  Parameter* b_ = nullptr;
};

class Conv1dLayer {
 public:
  Conv1dLayer() = default;
  Conv1dLayer(ParamRegistry& reg, const std::string& name, std::int64_t k,
              std::int64_t in_ch, std::int64_t out_ch, int stride = 1);
  Tensor forward(const Tensor& x) const;  // [T,Cin] -> [ceil(T/stride),Cout]

 private:
  Parameter* kernel_ = nullptr;
  Parameter* bias_ = nullptr;
  int stride_ = 1;
};

class Conv2dLayer {
 public:
  Conv2dLayer() = default;
  Conv2dLayer(ParamRegistry& reg, const std::string& name, std::int64_t kh, std::int64_t kw,
              std::int64_t in_ch, std::int64_t out_ch, int stride_h, int stride_w);
  Tensor forward(const Tensor& x) const;  // [H,W,Cin] -> [H',W',Cout]

 private:
  Parameter* kernel_ = nullptr;
  Parameter* bias_ = nullptr;
  int stride_h_ = 1;
  int stride_w_ = 1;
};

/// Per-feature batch normalization over the row axis. Training mode uses the
/// batch statistics of the current input (at least two rows) and refreshes
/// the running estimates; inference mode uses the running estimates.
class BatchNorm {
 public:
  BatchNorm() = default;
  BatchNorm(ParamRegistry& reg, const std::string& name, std::int64_t features,
            double momentum = 0.9, double eps = 1e-5);
  Tensor forward(const Tensor& x, bool training) const;  // [N,C] -> [N,C]

 private:
  Parameter* gamma_ = nullptr;
  Parameter* beta_ = nullptr;
  Parameter* running_mean_ = nullptr;
  Parameter* running_var_ = nullptr;
  double momentum_ = 0.9;
  double eps_ = 1e-5;
};

/// Unidirectional LSTM over a [T,Cin] sequence; gate order [i,f,g,o], forget
/// bias starts at 1.
class LstmLayer {
 public:
  LstmLayer() = default;
  LstmLayer(ParamRegistry& reg, const std::string& name, std::int64_t in, std::int64_t hidden);

  Tensor forward(const Tensor& seq, bool reverse_time = false) const;  // [T,H]
  LstmStep step(const Tensor& x, const LstmStep& prev) const;
  LstmStep initial_state() const;
  std::int64_t hidden() const { return hidden_; }

 private:
  Parameter* w_input_ = nullptr;
  Parameter* w_hidden_ = nullptr;
  Parameter* bias_ = nullptr;
  std::int64_t hidden_ = 0;
};

class BiLstm {
 public:
  BiLstm() = default;
  BiLstm(ParamRegistry& reg, const std::string& name, std::int64_t in, std::int64_t hidden);
  Tensor forward(const Tensor& seq) const;  // [T,2H]

 private:
  LstmLayer fwd_, bwd_;
};

/// Bidirectional convolutional LSTM over the frequency axis: the state is a
/// [F,H] map per time step and every gate is a width-3 SAME convolution along
/// frequency. Returns per-step [F,2H] maps.
class BiConvLstm {
 public:
  BiConvLstm() = default;
  BiConvLstm(ParamRegistry& reg, const std::string& name, std::int64_t in_ch,
             std::int64_t hidden_ch);
  std::vector<Tensor> forward(const std::vector<Tensor>& steps) const;

 private:
  std::vector<Tensor> run_direction(const std::vector<Tensor>& steps, bool reverse,
                                    const Parameter* wi, const Parameter* wh,
                                    const Parameter* b) const;
  Parameter* wi_fwd_ = nullptr;
  Parameter* wh_fwd_ = nullptr;
  Parameter* b_fwd_ = nullptr;
  Parameter* wi_bwd_ = nullptr;
  Parameter* wh_bwd_ = nullptr;
  Parameter* b_bwd_ = nullptr;
  std::int64_t hidden_ = 0;
};

class Embedding {
 public:
  Embedding() = default;
  Embedding(ParamRegistry& reg, const std::string& name, std::int64_t vocab, std::int64_t dim);
  Tensor forward(const std::vector<int>& ids) const;  // [T,dim]

 private:
  Parameter* table_ = nullptr;
};

}  // namespace tec::nn
