#pragma once

#include <functional>

#include "tec/model.hpp"

namespace tec::model {

/// One teacher-forcing example: features in, clean features out.
struct TrainItem {
  Matrix mixture_mel;
  std::vector<int> text_ids;
  Matrix playback_mel;  // used in AEC-Seq2seq mode
  Matrix target_mel;
  std::string id;
};

struct TrainConfig {
  long steps = 500;
  int batch_size = 1;
  nn::AdamConfig adam;
  nn::LrSchedule lr;
  std::uint64_t seed = 0;
  bool shuffle = true;
};

class Trainer {
 public:
  Trainer(TecModel& model, TrainConfig cfg);

  // Forward (teacher forcing) + backward + Adam over one batch; components
  // of the returned breakdown are means over the batch. Aborts with
  // diagnostics when the loss turns non-finite.
  LossBreakdown train_step(const std::vector<const TrainItem*>& batch);

  // Seeded loop over the item set; returns the per-step loss history.
  std::vector<LossBreakdown> run(const std::vector<TrainItem>& items,
                                 const std::function<void(long, const LossBreakdown&)>&
                                     on_step = nullptr);

  long step_index() const { return step_; }

 private:
  TecModel& model_;
  TrainConfig cfg_;
  nn::Adam adam_;
  long step_ = 0;
};

}  // namespace tec::model
