#pragma once

#include <cstdint>
#include <vector>

#include "bassim/plant/plant.hpp"

namespace bassim::plant {

// Sensor readings handed to the field controllers in place of analog wiring.
struct MeasurementSet {
  std::vector<double> t_zone;
  std::vector<double> zone_flow;
  std::vector<double> reheat;
  double t_oa = 0.0;
  double t_ra = 0.0;
  double t_ma = 0.0;
  double t_sa = 0.0;
  double t_chw = 0.0;
  double q_coil_kw = 0.0;
  double valve_cool = 0.0;
  double oa_frac = 0.0;
  bool fan_on = false;
};

// Counter-based Gaussian noise: the draw for (channel, step) depends only on
// the seed, so readers never perturb each other's sequences.
class SensorNoise {
 public:
  SensorNoise(double sigma, std::uint64_t seed) : sigma_(sigma), seed_(seed) {}
  double sigma() const { return sigma_; }
  double sample(std::uint32_t channel, std::int64_t step) const;

 private:
  double sigma_;
  std::uint64_t seed_;
};

// Projection of the plant state; temperature channels carry noise.
MeasurementSet measurement_snapshot(const PlantState& state, const SensorNoise& noise, std::int64_t step);

}  // namespace bassim::plant
