#include "bassim/plant/measurement.hpp"

#include <cmath>
#include <numbers>

namespace bassim::plant {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double unit_open(std::uint64_t bits) {
  // 53 random bits mapped into (0, 1)
  return (static_cast<double>(bits >> 11) + 0.5) / 9007199254740992.0;
}

enum Channel : std::uint32_t { kOa = 1, kRa, kMa, kSa, kChw, kZoneBase = 100 };

}  // namespace

double SensorNoise::sample(std::uint32_t channel, std::int64_t step) const {
  if (sigma_ <= 0.0) return 0.0;
  const std::uint64_t key = splitmix64(seed_ ^ splitmix64((static_cast<std::uint64_t>(channel) << 40) ^
                                                          static_cast<std::uint64_t>(step)));
  const double u1 = unit_open(key);
  const double u2 = unit_open(splitmix64(key));
  return sigma_ * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

MeasurementSet measurement_snapshot(const PlantState& state, const SensorNoise& noise, std::int64_t step) {
  MeasurementSet m;
  m.t_zone.resize(state.t_zone.size());
  for (std::size_t i = 0; i < state.t_zone.size(); ++i)
    m.t_zone[i] = state.t_zone[i] + noise.sample(kZoneBase + static_cast<std::uint32_t>(i), step);
  m.zone_flow = state.m_dot;
  m.reheat = state.reheat;
  m.t_oa = state.t_oa + noise.sample(kOa, step);
  m.t_ra = state.t_ra + noise.sample(kRa, step);
  m.t_ma = state.t_ma + noise.sample(kMa, step);
  m.t_sa = state.t_sa + noise.sample(kSa, step);
  m.t_chw = state.t_chw + noise.sample(kChw, step);
  m.q_coil_kw = state.q_coil / 1000.0;
  m.valve_cool = state.valve_cool;
  m.oa_frac = state.oa_frac;
  m.fan_on = state.fan_on;
  return m;
}

}  // namespace bassim::plant
