#include "bassim/control/pi_loop.hpp"

#include <algorithm>
#include <stdexcept>

namespace bassim::control {

PiLoop::PiLoop(double kp, double ki, double out_min, double out_max)
    : kp_(kp), ki_(ki), out_min_(out_min), out_max_(out_max) {
  if (out_min > out_max) throw std::invalid_argument("PiLoop: out_min > out_max");
  output_ = clamp(0.0);
}

double PiLoop::clamp(double v) const { return std::clamp(v, out_min_, out_max_); }

double PiLoop::step(double error, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("PiLoop: dt must be positive");
  const double candidate = integral_ + error * dt;
  const double unsaturated = kp_ * error + ki_ * candidate;
  const bool winding_up = unsaturated > out_max_ && error > 0.0;
  const bool winding_down = unsaturated < out_min_ && error < 0.0;
  if (!winding_up && !winding_down) integral_ = candidate;
  output_ = clamp(kp_ * error + ki_ * integral_);
  return output_;
}

}  // namespace bassim::control
