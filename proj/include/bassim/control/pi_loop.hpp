#pragma once

namespace bassim::control {

// PI controller with conditional-integration anti-windup: the integrator is
// frozen while the output is saturated and the error pushes further in.
class PiLoop {
 public:
  PiLoop(double kp, double ki, double out_min = 0.0, double out_max = 1.0);

  double step(double error, double dt);
  void reset() { integral_ = 0.0; output_ = clamp(0.0); }

  double output() const { return output_; }
  double integral() const { return integral_; }
  double kp() const { return kp_; }
  double ki() const { return ki_; }
  double out_min() const { return out_min_; }
  double out_max() const { return out_max_; }

 private:
  double clamp(double v) const;

  double kp_;
  double ki_;
  double out_min_;
  double out_max_;
  double integral_ = 0.0;
  double output_ = 0.0;
};

}  // namespace bassim::control
