#include "tec/model.hpp"

#include <algorithm>
#include <cmath>

namespace tec::model {

using nn::Tensor;

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::kTec: return "tec";
    case Mode::kVanilla: return "vanilla";
    case Mode::kAecSeq2seq: return "aec";
  }
  return "tec";
}

Mode mode_from_name(const std::string& name) {
  if (name == "tec") return Mode::kTec;
  if (name == "vanilla") return Mode::kVanilla;
  if (name == "aec" || name == "aec_seq2seq") return Mode::kAecSeq2seq;
  fail("unknown mode \"" + name + "\" (expected tec|vanilla|aec)");
}

ModelConfig ModelConfig::table1(int vocab) {
  ModelConfig cfg;
  cfg.vocab_size = vocab;
  return cfg;
}

ModelConfig ModelConfig::toy(int vocab) {
  ModelConfig cfg;
  cfg.vocab_size = vocab;
  cfg.audio_conv_channels = 2;
  cfg.clstm_units = 16;
  cfg.clstm_substitute_bilstm = true;
  cfg.audio_bilstm_units = 16;
  cfg.embedding_dim = 32;
  cfg.text_conv_channels = 32;
  cfg.text_bilstm_units = 16;
  cfg.context_dim = 8;
  cfg.gmm_components = 2;
  cfg.prenet_units = 16;
  cfg.dec_lstm_units = 16;
  cfg.mel_dim = 8;
  cfg.postnet_channels = 32;
  return cfg;
}

ModelConfig ModelConfig::micro(int vocab) {
  ModelConfig cfg = toy(vocab);
  cfg.clstm_units = 8;
  cfg.audio_bilstm_units = 8;
  cfg.embedding_dim = 8;
  cfg.text_conv_channels = 8;
  cfg.text_bilstm_units = 8;
  cfg.prenet_units = 8;
  cfg.dec_lstm_units = 8;
  cfg.postnet_channels = 8;
  return cfg;
}

void ModelConfig::validate() const {
  require(vocab_size > 0, "model config: vocab_size must be positive");
  for (int v : {audio_conv_channels, clstm_units, audio_bilstm_units, embedding_dim,
                text_conv_channels, text_bilstm_units, context_dim, gmm_components,
                prenet_units, dec_lstm_units, mel_dim, postnet_channels})
    require(v > 0, "model config: all widths must be positive");
  if (mode == Mode::kTec)
    require(audio_enc_out_dim() == text_enc_out_dim(),
            "model config: encoder output widths must match across sources (audio " +
                std::to_string(audio_enc_out_dim()) + " vs text " +
                std::to_string(text_enc_out_dim()) + ")");
}

Tensor constant_from(const Matrix& m) {
  return Tensor::from({std::int64_t(m.rows), std::int64_t(m.cols)}, m.v);
}

Matrix to_matrix(const Tensor& t) {
  require(t.rank() == 2, "to_matrix: expected rank 2, got " + nn::shape_str(t.shape()));
  Matrix m(std::size_t(t.dim(0)), std::size_t(t.dim(1)));
  m.v = t.data();
  return m;
}

TecModel::TecModel(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg), params_(seed) {
  cfg_.validate();

  audio_enc_ = build_audio_encoder("audio_enc");
  if (cfg_.mode == Mode::kTec) {
    text_enc_ = build_text_encoder("text_enc");
  } else if (cfg_.mode == Mode::kAecSeq2seq) {
    audio_enc2_ = build_audio_encoder("audio_enc2");
  }

  attn_x_ = build_attention("attn_x", cfg_.audio_enc_out_dim());
  if (cfg_.mode == Mode::kTec) {
    attn_y_ = build_attention("attn_y", cfg_.text_enc_out_dim());
  } else if (cfg_.mode == Mode::kAecSeq2seq) {
    attn_y_ = build_attention("attn_y", cfg_.audio_enc_out_dim());
  }

  prenet0_ = nn::Dense(params_, "decoder/prenet0", cfg_.mel_dim, cfg_.prenet_units);
  prenet1_ = nn::Dense(params_, "decoder/prenet1", cfg_.prenet_units, cfg_.prenet_units);
  dec_lstm0_ = nn::LstmLayer(params_, "decoder/lstm0", cfg_.prenet_units + cfg_.context_dim,
                             cfg_.dec_lstm_units);
  dec_lstm1_ = nn::LstmLayer(params_, "decoder/lstm1", cfg_.dec_lstm_units, cfg_.dec_lstm_units);
  mel_linear_ = nn::Dense(params_, "decoder/mel_linear",
                          cfg_.dec_lstm_units + cfg_.context_dim, cfg_.mel_dim);
  stop_linear_ =
      nn::Dense(params_, "decoder/stop_linear", cfg_.dec_lstm_units + cfg_.context_dim, 2);

  // post-net: 5 conv layers, tanh on the first four, all batch-normalized
  postnet_conv_.emplace_back(params_, "decoder/postnet/conv0", 5, cfg_.mel_dim,
                             cfg_.postnet_channels, 1);
  postnet_bn_.emplace_back(params_, "decoder/postnet/bn0", cfg_.postnet_channels,
                           cfg_.bn_momentum, cfg_.bn_eps);
  for (int i = 1; i <= 3; ++i) {
    postnet_conv_.emplace_back(params_, "decoder/postnet/conv" + std::to_string(i), 5,
                               cfg_.postnet_channels, cfg_.postnet_channels, 1);
    postnet_bn_.emplace_back(params_, "decoder/postnet/bn" + std::to_string(i),
                             cfg_.postnet_channels, cfg_.bn_momentum, cfg_.bn_eps);
  }
  postnet_conv_.emplace_back(params_, "decoder/postnet/conv4", 5, cfg_.postnet_channels,
                             cfg_.mel_dim, 1);
  postnet_bn_.emplace_back(params_, "decoder/postnet/bn4", cfg_.mel_dim, cfg_.bn_momentum,
                           cfg_.bn_eps);
}

TecModel::AudioEncoder TecModel::build_audio_encoder(const std::string& prefix) {
  AudioEncoder enc;
  const int c = cfg_.audio_conv_channels;
  enc.conv0 = nn::Conv2dLayer(params_, prefix + "/conv0", 3, 3, 1, c, 2, 2);
  enc.bn_conv0 = nn::BatchNorm(params_, prefix + "/bn_conv0", c, cfg_.bn_momentum, cfg_.bn_eps);
  enc.conv1 = nn::Conv2dLayer(params_, prefix + "/conv1", 3, 3, c, c, 2, 2);
  enc.bn_conv1 = nn::BatchNorm(params_, prefix + "/bn_conv1", c, cfg_.bn_momentum, cfg_.bn_eps);

  // freq bins after the two stride-2 convs: ceil(ceil(D/2)/2)
  const std::int64_t f1 = (std::int64_t(cfg_.mel_dim) + 1) / 2;
  const std::int64_t f2 = (f1 + 1) / 2;

  if (cfg_.clstm_substitute_bilstm) {
    enc.clstm_substitute =
        nn::BiLstm(params_, prefix + "/clstm", f2 * c, cfg_.clstm_units);
  } else {
    enc.clstm = nn::BiConvLstm(params_, prefix + "/clstm", c, cfg_.clstm_units);
  }
  enc.bn_clstm = nn::BatchNorm(params_, prefix + "/bn_clstm", 2 * cfg_.clstm_units,
                               cfg_.bn_momentum, cfg_.bn_eps);

  std::int64_t in = cfg_.clstm_substitute_bilstm ? 2 * cfg_.clstm_units
                                                 : f2 * 2 * cfg_.clstm_units;
  for (int i = 0; i < 3; ++i) {
    enc.bilstm.emplace_back(params_, prefix + "/bilstm" + std::to_string(i), in,
                            cfg_.audio_bilstm_units);
    enc.bn_bilstm.emplace_back(params_, prefix + "/bn_bilstm" + std::to_string(i),
                               2 * cfg_.audio_bilstm_units, cfg_.bn_momentum, cfg_.bn_eps);
    in = 2 * cfg_.audio_bilstm_units;
  }
  return enc;
}

TecModel::TextEncoder TecModel::build_text_encoder(const std::string& prefix) {
  TextEncoder enc;
  enc.embedding = nn::Embedding(params_, prefix + "/embedding", cfg_.vocab_size,
                                cfg_.embedding_dim);
  std::int64_t in = cfg_.embedding_dim;
  for (int i = 0; i < 3; ++i) {
    enc.conv.emplace_back(params_, prefix + "/conv" + std::to_string(i), 5, in,
                          cfg_.text_conv_channels, 1);
    enc.bn_conv.emplace_back(params_, prefix + "/bn_conv" + std::to_string(i),
                             cfg_.text_conv_channels, cfg_.bn_momentum, cfg_.bn_eps);
    in = cfg_.text_conv_channels;
  }
  enc.bilstm = nn::BiLstm(params_, prefix + "/bilstm", in, cfg_.text_bilstm_units);
  enc.bn_bilstm = nn::BatchNorm(params_, prefix + "/bn_bilstm", 2 * cfg_.text_bilstm_units,
                                cfg_.bn_momentum, cfg_.bn_eps);
  return enc;
}

TecModel::Attention TecModel::build_attention(const std::string& prefix, int source_width) {
  Attention attn;
  attn.query_dense = nn::Dense(params_, prefix + "/query_dense",
                               cfg_.prenet_units + cfg_.context_dim, 3 * cfg_.gmm_components);
  attn.context_proj =
      nn::Dense(params_, prefix + "/context_proj", source_width, cfg_.context_dim);
  // start near unit width and a quarter-position advance per decode step
  nn::Parameter* bias = params_.find(prefix + "/query_dense/bias");
  for (int k = 0; k < cfg_.gmm_components; ++k)
    bias->tensor.data()[std::size_t(2 * cfg_.gmm_components + k)] = -1.4;
  return attn;
}

namespace {

Tensor flatten_bn(const nn::BatchNorm& bn, const Tensor& x3, bool training) {
  // [H,W,C] -> batch-norm over H*W rows -> [H,W,C]
  const std::int64_t h = x3.dim(0), w = x3.dim(1), c = x3.dim(2);
  Tensor flat = nn::reshape(x3, {h * w, c});
  return nn::reshape(bn.forward(flat, training), {h, w, c});
}

}  // namespace

Tensor TecModel::run_audio_encoder(AudioEncoder& enc, const Matrix& mel, bool training) {
  require(std::int64_t(mel.cols) == cfg_.mel_dim,
          "audio encoder: expected " + std::to_string(cfg_.mel_dim) + " mel bins, got " +
              std::to_string(mel.cols));
  require(mel.rows >= 4, "audio encoder: input too short, needs at least 4 frames, got " +
                             std::to_string(mel.rows));

  Tensor x = Tensor::from({std::int64_t(mel.rows), std::int64_t(mel.cols), 1}, mel.v);
  Tensor h = nn::relu(enc.conv0.forward(x));
  h = flatten_bn(enc.bn_conv0, h, training);
  h = nn::relu(enc.conv1.forward(h));
  h = flatten_bn(enc.bn_conv1, h, training);

  const std::int64_t t2 = h.dim(0), f2 = h.dim(1), c = h.dim(2);
  Tensor seq;
  if (cfg_.clstm_substitute_bilstm) {
    seq = nn::reshape(h, {t2, f2 * c});
    seq = nn::relu(enc.clstm_substitute.forward(seq));
    seq = enc.bn_clstm.forward(seq, training);
  } else {
    Tensor flat = nn::reshape(h, {t2, f2 * c});
    std::vector<Tensor> steps(std::size_t(t2));
    for (std::int64_t t = 0; t < t2; ++t)
      steps[std::size_t(t)] = nn::reshape(nn::slice_rows(flat, t, t + 1), {f2, c});
    std::vector<Tensor> out = enc.clstm.forward(steps);
    std::vector<Tensor> rows(out.size());
    for (std::size_t t = 0; t < out.size(); ++t) rows[t] = nn::relu(out[t]);
    Tensor stacked = nn::concat_rows(rows);  // [T*F, 2H]
    stacked = enc.bn_clstm.forward(stacked, training);
    seq = nn::reshape(stacked, {t2, f2 * 2 * cfg_.clstm_units});
  }

  for (std::size_t i = 0; i < enc.bilstm.size(); ++i) {
    seq = nn::relu(enc.bilstm[i].forward(seq));
    seq = enc.bn_bilstm[i].forward(seq, training);
  }
  return seq;
}

Tensor TecModel::encode_audio(const Matrix& mel, bool training) {
  return run_audio_encoder(*audio_enc_, mel, training);
}

Tensor TecModel::encode_playback(const Matrix& mel, bool training) {
  require(audio_enc2_.has_value(),
          "encode_playback: model has no playback encoder (mode " + mode_name(cfg_.mode) + ")");
  return run_audio_encoder(*audio_enc2_, mel, training);
}

Tensor TecModel::encode_text(const std::vector<int>& ids, bool training) {
  require(text_enc_.has_value(),
          "encode_text: model has no text encoder (mode " + mode_name(cfg_.mode) + ")");
  require(!ids.empty(), "encode_text: empty phoneme sequence");
  Tensor h = text_enc_->embedding.forward(ids);
  for (std::size_t i = 0; i < text_enc_->conv.size(); ++i) {
    h = nn::relu(text_enc_->conv[i].forward(h));
    h = text_enc_->bn_conv[i].forward(h, training);
  }
  h = nn::relu(text_enc_->bilstm.forward(h));
  return text_enc_->bn_bilstm.forward(h, training);
}

TecModel::Encoded TecModel::encode(const ModelInput& in, bool training) {
  require(in.mixture_mel != nullptr, "model: mixture features are required");
  Encoded enc;
  enc.hx = encode_audio(*in.mixture_mel, training);
  switch (cfg_.mode) {
    case Mode::kTec:
      enc.hy = encode_text(in.text_ids, training);
      break;
    case Mode::kAecSeq2seq:
      require(in.playback_mel != nullptr,
              "model: AEC-Seq2seq requires playback features as the side input");
      enc.hy = encode_playback(*in.playback_mel, training);
      break;
    case Mode::kVanilla:
      break;
  }
  return enc;
}

TecModel::AttentionState TecModel::init_attention_state() const {
  return {Tensor::zeros({1, cfg_.gmm_components}), Tensor::zeros({1, cfg_.context_dim})};
}

TecModel::DecoderState TecModel::init_decoder_state() const {
  DecoderState st;
  st.lstm1 = dec_lstm0_.initial_state();
  st.lstm2 = dec_lstm1_.initial_state();
  st.attn_x = init_attention_state();
  st.attn_y = init_attention_state();
  st.prev_frame = Tensor::zeros({1, cfg_.mel_dim});
  st.initialized = true;
  return st;
}

Tensor TecModel::gmm_attention_step(int source, AttentionState& state, const Tensor& query,
                                    const Tensor& h) {
  const Attention& attn = source == 0 ? *attn_x_ : *attn_y_;
  const std::int64_t K = cfg_.gmm_components;
  require(h.defined() && h.dim(0) >= 1, "attention: empty source");

  Tensor raw = attn.query_dense.forward(nn::concat_cols(query, state.context));
  Tensor alpha = nn::softmax_rows(nn::slice_cols(raw, 0, K));
  Tensor beta = nn::add(nn::softplus(nn::slice_cols(raw, K, 2 * K)),
                        Tensor::full({1, K}, 1e-6));
  Tensor delta = nn::softplus(nn::slice_cols(raw, 2 * K, 3 * K));
  Tensor kappa = nn::add(state.kappa, delta);

  Tensor phi = nn::gmm_weights(alpha, beta, kappa, h.dim(0));
  Tensor context = attn.context_proj.forward(nn::matmul(phi, h));

  state.kappa = kappa;
  state.context = context;
  return context;
}

TecModel::AttentionStep TecModel::multi_source_attention_step(DecoderState& state,
                                                              const Tensor& query,
                                                              const Encoded& enc) {
  AttentionStep out;
  out.cx = gmm_attention_step(0, state.attn_x, query, enc.hx);
  if (cfg_.mode == Mode::kVanilla) {
    out.context = out.cx;
    return out;
  }
  out.cy = gmm_attention_step(1, state.attn_y, query, enc.hy);
  require(out.cx.shape() == out.cy.shape(), "attention: context dimension mismatch " +
                                                nn::shape_str(out.cx.shape()) + " vs " +
                                                nn::shape_str(out.cy.shape()));
  out.context = nn::add(out.cx, out.cy);
  return out;
}

TecModel::StepOut TecModel::decoder_step(DecoderState& state, const Encoded& enc) {
  require(state.initialized, "decoder_step: state not initialized");

  Tensor q = nn::relu(prenet1_.forward(nn::relu(prenet0_.forward(state.prev_frame))));
  AttentionStep attn = multi_source_attention_step(state, q, enc);

  Tensor lstm_in = nn::concat_cols(q, attn.context);
  state.lstm1 = dec_lstm0_.step(lstm_in, state.lstm1);
  state.lstm2 = dec_lstm1_.step(state.lstm1.h, state.lstm2);

  Tensor features = nn::concat_cols(state.lstm2.h, attn.context);
  StepOut out;
  out.mel_pre = mel_linear_.forward(features);
  out.stop_logits = stop_linear_.forward(features);
  return out;
}

Tensor TecModel::postnet_forward(const Tensor& pre_seq, bool training) {
  Tensor h = pre_seq;
  for (std::size_t i = 0; i < postnet_conv_.size(); ++i) {
    h = postnet_conv_[i].forward(h);
    if (i + 1 < postnet_conv_.size()) h = nn::tanh_op(h);
    h = postnet_bn_[i].forward(h, training);
  }
  return nn::add(pre_seq, h);
}

TecModel::Forward TecModel::teacher_forced_forward(const ModelInput& in, const Matrix& target,
                                                   bool training) {
  require(!target.empty(), "teacher_forced_forward: empty target");
  require(std::int64_t(target.cols) == cfg_.mel_dim,
          "teacher_forced_forward: target has " + std::to_string(target.cols) +
              " mel bins, model expects " + std::to_string(cfg_.mel_dim));

  Encoded enc = encode(in, training);
  DecoderState state = init_decoder_state();

  const std::int64_t steps = std::int64_t(target.rows);
  std::vector<Tensor> pre_rows(std::size_t(steps));
  std::vector<Tensor> stop_rows(std::size_t(steps));
  for (std::int64_t t = 0; t < steps; ++t) {
    if (t > 0) {
      std::vector<double> prev(target.row(std::size_t(t - 1)),
                               target.row(std::size_t(t - 1)) + target.cols);
      state.prev_frame = Tensor::from({1, cfg_.mel_dim}, std::move(prev));
    }
    StepOut step = decoder_step(state, enc);
    pre_rows[std::size_t(t)] = step.mel_pre;
    stop_rows[std::size_t(t)] = step.stop_logits;
  }

  Forward fwd;
  fwd.pre = nn::concat_rows(pre_rows);
  fwd.post = postnet_forward(fwd.pre, training);
  fwd.stop_logits = nn::concat_rows(stop_rows);
  return fwd;
}

TecModel::LossResult TecModel::compute_loss(const Forward& fwd, const Matrix& target) {
  require(fwd.pre.dim(0) == std::int64_t(target.rows),
          "compute_loss: prediction length " + std::to_string(fwd.pre.dim(0)) +
              " does not match target length " + std::to_string(target.rows));
  Tensor z = constant_from(target);

  Tensor d_pre = nn::sub(fwd.pre, z);
  Tensor d_post = nn::sub(fwd.post, z);
  Tensor l2_pre = nn::sum_all(nn::mul(d_pre, d_pre));
  Tensor l2_post = nn::sum_all(nn::mul(d_post, d_post));
  Tensor l1_pre = nn::sum_all(nn::abs_op(d_pre));
  Tensor l1_post = nn::sum_all(nn::abs_op(d_post));

  std::vector<int> stop_targets(target.rows, 0);
  stop_targets.back() = 1;
  std::vector<double> weights(target.rows, 1.0);
  weights.back() = cfg_.stop_positive_weight;
  Tensor ce = nn::weighted_cross_entropy(fwd.stop_logits, stop_targets, weights);

  LossResult res;
  res.total = nn::add(nn::add(nn::add(l2_pre, l2_post), nn::add(l1_pre, l1_post)), ce);
  res.parts.l2_pre = l2_pre.value();
  res.parts.l2_post = l2_post.value();
  res.parts.l1_pre = l1_pre.value();
  res.parts.l1_post = l1_post.value();
  res.parts.stop_ce = ce.value();
  res.parts.total = res.total.value();
  return res;
}

TecModel::InferResult TecModel::infer(const ModelInput& in, const InferOptions& opts) {
  Encoded enc = encode(in, false);
  const int default_steps = int(4 * enc.hx.dim(0));
  const int max_steps = opts.max_steps > 0 ? opts.max_steps : std::max(1, default_steps);

  DecoderState state = init_decoder_state();
  std::vector<Tensor> pre_rows;
  bool stopped = false;
  int t = 0;
  for (; t < max_steps; ++t) {
    StepOut step = decoder_step(state, enc);
    pre_rows.push_back(step.mel_pre);
    state.prev_frame = step.mel_pre;

    const double l0 = step.stop_logits.data()[0];
    const double l1 = step.stop_logits.data()[1];
    const double p_stop = 1.0 / (1.0 + std::exp(l0 - l1));
    const bool stop_now = opts.stop_decision ? opts.stop_decision(t, p_stop)
                                             : p_stop > opts.stop_threshold;
    if (stop_now) {
      stopped = true;
      ++t;
      break;
    }
  }

  Tensor post = postnet_forward(nn::concat_rows(pre_rows), false);
  InferResult res;
  res.mel = to_matrix(post);
  res.truncated = !stopped;
  res.steps = t;
  return res;
}

std::map<std::string, double> TecModel::meta() const {
  return {
      {"mode", double(int(cfg_.mode))},
      {"vocab_size", double(cfg_.vocab_size)},
      {"audio_conv_channels", double(cfg_.audio_conv_channels)},
      {"clstm_units", double(cfg_.clstm_units)},
      {"clstm_substitute_bilstm", cfg_.clstm_substitute_bilstm ? 1.0 : 0.0},
      {"audio_bilstm_units", double(cfg_.audio_bilstm_units)},
      {"embedding_dim", double(cfg_.embedding_dim)},
      {"text_conv_channels", double(cfg_.text_conv_channels)},
      {"text_bilstm_units", double(cfg_.text_bilstm_units)},
      {"context_dim", double(cfg_.context_dim)},
      {"gmm_components", double(cfg_.gmm_components)},
      {"prenet_units", double(cfg_.prenet_units)},
      {"dec_lstm_units", double(cfg_.dec_lstm_units)},
      {"mel_dim", double(cfg_.mel_dim)},
      {"postnet_channels", double(cfg_.postnet_channels)},
      {"stop_positive_weight", cfg_.stop_positive_weight},
      {"bn_momentum", cfg_.bn_momentum},
      {"bn_eps", cfg_.bn_eps},
  };
}

void TecModel::save(const std::filesystem::path& path,
                    const std::map<std::string, double>& extra_meta) {
  std::map<std::string, double> all_meta = meta();
  for (const auto& [k, v] : extra_meta) all_meta["x/" + k] = v;
  nn::save_checkpoint(path, params_, all_meta);
}

TecModel::Restored TecModel::from_checkpoint(const std::filesystem::path& path) {
  nn::LoadedCheckpoint ckpt = nn::load_checkpoint(path);
  auto get = [&](const char* key) {
    auto it = ckpt.meta.find(key);
    require(it != ckpt.meta.end(),
            "checkpoint: missing meta entry \"" + std::string(key) + "\"");
    return it->second;
  };
  ModelConfig cfg;
  cfg.mode = Mode(int(get("mode")));
  cfg.vocab_size = int(get("vocab_size"));
  cfg.audio_conv_channels = int(get("audio_conv_channels"));
  cfg.clstm_units = int(get("clstm_units"));
  cfg.clstm_substitute_bilstm = get("clstm_substitute_bilstm") != 0.0;
  cfg.audio_bilstm_units = int(get("audio_bilstm_units"));
  cfg.embedding_dim = int(get("embedding_dim"));
  cfg.text_conv_channels = int(get("text_conv_channels"));
  cfg.text_bilstm_units = int(get("text_bilstm_units"));
  cfg.context_dim = int(get("context_dim"));
  cfg.gmm_components = int(get("gmm_components"));
  cfg.prenet_units = int(get("prenet_units"));
  cfg.dec_lstm_units = int(get("dec_lstm_units"));
  cfg.mel_dim = int(get("mel_dim"));
  cfg.postnet_channels = int(get("postnet_channels"));
  cfg.stop_positive_weight = get("stop_positive_weight");
  cfg.bn_momentum = get("bn_momentum");
  cfg.bn_eps = get("bn_eps");

  Restored out;
  out.model = std::make_unique<TecModel>(cfg, 0);
  nn::restore_params(out.model->params(), ckpt);
  for (const auto& [k, v] : ckpt.meta)
    if (k.rfind("x/", 0) == 0) out.meta[k.substr(2)] = v;
  return out;
}

std::unique_ptr<TecModel> make_model(Mode mode, ModelConfig cfg, std::uint64_t seed) {
  cfg.mode = mode;
  return std::make_unique<TecModel>(cfg, seed);
}

}  // namespace tec::model
