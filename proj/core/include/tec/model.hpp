#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>

#include "tec/checkpoint.hpp"
#include "tec/layers.hpp"
#include "tec/optimizer.hpp"
#include "tec/phoneme.hpp"
#include "tec/signal.hpp"

namespace tec::model {

enum class Mode { kTec, kVanilla, kAecSeq2seq };

std::string mode_name(Mode mode);
Mode mode_from_name(const std::string& name);

/// Network widths. The defaults are the full-scale architecture; toy() and
/// micro() shrink every width for desk-scale training and gradient checks.
struct ModelConfig {
  Mode mode = Mode::kTec;
  int vocab_size = 65;

  // audio encoder: 2 conv layers (3x3, stride 2x2), Bi-CLSTM (1x3), 3 Bi-LSTM
  int audio_conv_channels = 32;
  int clstm_units = 256;  // per direction
  bool clstm_substitute_bilstm = false;
  int audio_bilstm_units = 256;  // per direction, 3 layers

  // text encoder: embedding, 3 conv layers (5x1, stride 1), 1 Bi-LSTM
  int embedding_dim = 512;
  int text_conv_channels = 512;
  int text_bilstm_units = 256;  // per direction

  // attention: one GMM attention per source
  int context_dim = 128;
  int gmm_components = 5;

  // decoder: 2-layer pre-net, 2 LSTM layers, mel/stop heads, 5-conv post-net
  int prenet_units = 256;
  int dec_lstm_units = 256;
  int mel_dim = 128;
  int postnet_channels = 512;

  double stop_positive_weight = 5.0;
  double bn_momentum = 0.9;
  double bn_eps = 1e-5;

  static ModelConfig table1(int vocab);
  static ModelConfig toy(int vocab);    // all widths / 16, K=2
  static ModelConfig micro(int vocab);  // widths 8-16, for finite-difference checks

  int audio_enc_out_dim() const { return 2 * audio_bilstm_units; }
  int text_enc_out_dim() const { return 2 * text_bilstm_units; }
  void validate() const;
};

struct LossBreakdown {
  double l2_pre = 0.0;
  double l2_post = 0.0;
  double l1_pre = 0.0;
  double l1_post = 0.0;
  double stop_ce = 0.0;
  double total = 0.0;
};

/// What one forward/inference call consumes; which fields are required
/// depends on the mode (text for TEC, playback features for AEC-Seq2seq).
struct ModelInput {
  const Matrix* mixture_mel = nullptr;
  std::vector<int> text_ids;
  const Matrix* playback_mel = nullptr;
};

class TecModel {
 public:
  TecModel(const ModelConfig& cfg, std::uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  nn::ParamRegistry& params() { return params_; }

  nn::Tensor encode_audio(const Matrix& mel, bool training);
  nn::Tensor encode_playback(const Matrix& mel, bool training);  // AEC-Seq2seq
  nn::Tensor encode_text(const std::vector<int>& ids, bool training);

  struct Encoded {
    nn::Tensor hx;
    nn::Tensor hy;  // undefined in VANILLA mode
  };
  Encoded encode(const ModelInput& in, bool training);

  struct AttentionState {
    nn::Tensor kappa;    // [1,K], non-decreasing across steps
    nn::Tensor context;  // [1,context_dim]
  };
  AttentionState init_attention_state() const;

  struct DecoderState {
    nn::LstmStep lstm1, lstm2;
    AttentionState attn_x, attn_y;
    nn::Tensor prev_frame;  // [1,mel_dim]
    bool initialized = false;
  };
  DecoderState init_decoder_state() const;

  // One GMM attention step for source 0 (audio) or 1 (text/playback);
  // advances state.kappa monotonically and refreshes state.context.
  nn::Tensor gmm_attention_step(int source, AttentionState& state, const nn::Tensor& query,
                                const nn::Tensor& h);

  struct AttentionStep {
    nn::Tensor context, cx, cy;  // context = cx + cy (cy undefined in VANILLA)
  };
  AttentionStep multi_source_attention_step(DecoderState& state, const nn::Tensor& query,
                                            const Encoded& enc);

  struct StepOut {
    nn::Tensor mel_pre;      // [1,mel_dim]
    nn::Tensor stop_logits;  // [1,2]
  };
  StepOut decoder_step(DecoderState& state, const Encoded& enc);

  // Residual post-net over the complete pre-net-side sequence.
  nn::Tensor postnet_forward(const nn::Tensor& pre_seq, bool training);

  struct Forward {
    nn::Tensor pre, post, stop_logits;
  };
  Forward teacher_forced_forward(const ModelInput& in, const Matrix& target, bool training);

  struct LossResult {
    nn::Tensor total;  // scalar, on the tape
    LossBreakdown parts;
  };
  LossResult compute_loss(const Forward& fwd, const Matrix& target);

  struct InferOptions {
    int max_steps = 0;  // 0 = 4x encoded audio length
    double stop_threshold = 0.5;
    // test seam: overrides the stop decision when set
    std::function<bool(int step, double stop_probability)> stop_decision;
  };
  struct InferResult {
    Matrix mel;
    bool truncated = false;
    int steps = 0;
  };
  InferResult infer(const ModelInput& in, const InferOptions& opts = {});

  std::map<std::string, double> meta() const;
  void save(const std::filesystem::path& path,
            const std::map<std::string, double>& extra_meta = {});

  struct Restored {
    std::unique_ptr<TecModel> model;
    std::map<std::string, double> meta;
  };
  static Restored from_checkpoint(const std::filesystem::path& path);

 private:
  struct AudioEncoder {
    nn::Conv2dLayer conv0, conv1;
    nn::BatchNorm bn_conv0, bn_conv1;
    nn::BiConvLstm clstm;
    nn::BiLstm clstm_substitute;
    nn::BatchNorm bn_clstm;
    std::vector<nn::BiLstm> bilstm;
    std::vector<nn::BatchNorm> bn_bilstm;
  };
  struct TextEncoder {
    nn::Embedding embedding;
    std::vector<nn::Conv1dLayer> conv;
    std::vector<nn::BatchNorm> bn_conv;
    nn::BiLstm bilstm;
    nn::BatchNorm bn_bilstm;
  };
  struct Attention {
    nn::Dense query_dense;   // [prenet+context] -> 3K
    nn::Dense context_proj;  // encoder width -> context_dim
  };

  AudioEncoder build_audio_encoder(const std::string& prefix);
  TextEncoder build_text_encoder(const std::string& prefix);
  Attention build_attention(const std::string& prefix, int source_width);
  nn::Tensor run_audio_encoder(AudioEncoder& enc, const Matrix& mel, bool training);

  ModelConfig cfg_;
  nn::ParamRegistry params_;

  std::optional<AudioEncoder> audio_enc_;
  std::optional<AudioEncoder> audio_enc2_;  // AEC-Seq2seq playback encoder
  std::optional<TextEncoder> text_enc_;
  std::optional<Attention> attn_x_, attn_y_;
  nn::Dense prenet0_, prenet1_;
  nn::LstmLayer dec_lstm0_, dec_lstm1_;
  nn::Dense mel_linear_, stop_linear_;
  std::vector<nn::Conv1dLayer> postnet_conv_;
  std::vector<nn::BatchNorm> postnet_bn_;
};

// variant factory: wires encoders/attentions according to the mode
std::unique_ptr<TecModel> make_model(Mode mode, ModelConfig cfg, std::uint64_t seed);

// Matrix <-> constant tensor helpers shared by trainer and tests
nn::Tensor constant_from(const Matrix& m);
Matrix to_matrix(const nn::Tensor& t);

}  // namespace tec::model
