#include "tec/train.hpp"

#include <cmath>

#include "tec/rng.hpp"

namespace tec::model {

Trainer::Trainer(TecModel& model, TrainConfig cfg)
    : model_(model), cfg_(cfg), adam_(cfg.adam, cfg.lr) {
  require(cfg_.steps >= 0, "trainer: steps must be >= 0");
  require(cfg_.batch_size >= 1, "trainer: batch size must be >= 1");
}

LossBreakdown Trainer::train_step(const std::vector<const TrainItem*>& batch) {
  require(!batch.empty(), "train_step: empty batch");
  model_.params().zero_grads();

  nn::Tape tape;
  LossBreakdown mean;
  nn::Tensor total;
  {
    nn::Tape::Scope scope(tape);
    std::vector<nn::Tensor> losses;
    for (const TrainItem* item : batch) {
      ModelInput input;
      input.mixture_mel = &item->mixture_mel;
      input.text_ids = item->text_ids;
      input.playback_mel = item->playback_mel.empty() ? nullptr : &item->playback_mel;
      TecModel::Forward fwd = model_.teacher_forced_forward(input, item->target_mel, true);
      TecModel::LossResult loss = model_.compute_loss(fwd, item->target_mel);
      losses.push_back(loss.total);
      mean.l2_pre += loss.parts.l2_pre;
      mean.l2_post += loss.parts.l2_post;
      mean.l1_pre += loss.parts.l1_pre;
      mean.l1_post += loss.parts.l1_post;
      mean.stop_ce += loss.parts.stop_ce;
    }
    nn::Tensor sum = losses[0];
    for (std::size_t i = 1; i < losses.size(); ++i) sum = nn::add(sum, losses[i]);
    total = nn::scale(sum, 1.0 / double(losses.size()));
  }

  const double inv = 1.0 / double(batch.size());
  mean.l2_pre *= inv;
  mean.l2_post *= inv;
  mean.l1_pre *= inv;
  mean.l1_post *= inv;
  mean.stop_ce *= inv;
  mean.total = total.value();

  if (!std::isfinite(mean.total)) {
    // locate the worst parameter for the diagnostic
    std::string worst = "?";
    double worst_mag = -1.0;
    for (nn::Parameter* p : model_.params().trainable()) {
      for (double v : p->tensor.data()) {
        if (!std::isfinite(v)) {
          worst = p->name;
          worst_mag = std::numeric_limits<double>::infinity();
          break;
        }
        if (std::fabs(v) > worst_mag) {
          worst_mag = std::fabs(v);
          worst = p->name;
        }
      }
    }
    fail("train_step: non-finite loss at step " + std::to_string(step_) +
         " (worst parameter: " + worst + ")");
  }

  nn::backward(total, tape);
  adam_.step(model_.params().trainable());
  ++step_;
  return mean;
}

std::vector<LossBreakdown> Trainer::run(
    const std::vector<TrainItem>& items,
    const std::function<void(long, const LossBreakdown&)>& on_step) {
  require(!items.empty(), "trainer: no training items");
  Rng rng(cfg_.seed, "trainer");
  std::vector<LossBreakdown> history;
  history.reserve(std::size_t(cfg_.steps));

  for (long s = 0; s < cfg_.steps; ++s) {
    std::vector<const TrainItem*> batch;
    for (int b = 0; b < cfg_.batch_size; ++b) {
      const std::size_t idx = cfg_.shuffle
                                  ? rng.index(items.size())
                                  : std::size_t((s * cfg_.batch_size + b) % long(items.size()));
      batch.push_back(&items[idx]);
    }
    LossBreakdown loss = train_step(batch);
    history.push_back(loss);
    if (on_step) on_step(s, loss);
  }
  return history;
}

}  // namespace tec::model
