#pragma once

#include <unordered_map>
#include <vector>

#include "tec/layers.hpp"

namespace tec::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-6;
};

/// lr(t) = initial * (final/initial)^(min(t, decay_steps)/decay_steps).
struct LrSchedule {
  double initial = 1e-4;
  double final_lr = 1e-5;
  long decay_steps = 50000;

  double at(long step) const;
};

class Adam {
 public:
  Adam() = default;
  Adam(AdamConfig cfg, LrSchedule schedule) : cfg_(cfg), schedule_(schedule) {}

  // One bias-corrected update over all trainable parameters. Every parameter
  // must carry a gradient; a missing one is an error naming the parameter.
  void step(const std::vector<Parameter*>& params);

  long steps_taken() const { return t_; }
  const LrSchedule& schedule() const { return schedule_; }

 private:
  struct Moments {
    std::vector<double> m, v;
  };
  AdamConfig cfg_;
  LrSchedule schedule_;
  long t_ = 0;
  std::unordered_map<std::string, Moments> moments_;
};

}  // namespace tec::nn
