#include "tec/optimizer.hpp"

#include <cmath>

namespace tec::nn {

double LrSchedule::at(long step) const {
  const long clamped = std::min(step, decay_steps);
  const double frac = decay_steps > 0 ? double(clamped) / double(decay_steps) : 1.0;
  return initial * std::pow(final_lr / initial, frac);
}

void Adam::step(const std::vector<Parameter*>& params) {
  const double lr = schedule_.at(t_);
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, double(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, double(t_));

  for (Parameter* p : params) {
    require(p->tensor.grad_allocated(),
            "adam: missing gradient for parameter \"" + p->name + "\"");
    auto& mom = moments_[p->name];
    auto& data = p->tensor.data();
    const auto& grad = p->tensor.grad();
    if (mom.m.empty()) {
      mom.m.assign(data.size(), 0.0);
      mom.v.assign(data.size(), 0.0);
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double g = grad[i];
      mom.m[i] = cfg_.beta1 * mom.m[i] + (1.0 - cfg_.beta1) * g;
      mom.v[i] = cfg_.beta2 * mom.v[i] + (1.0 - cfg_.beta2) * g * g;
      const double m_hat = mom.m[i] / bc1;
      const double v_hat = mom.v[i] / bc2;
      data[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg_.eps);
    }
  }
}

}  // namespace tec::nn
