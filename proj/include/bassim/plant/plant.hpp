#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bassim::plant {

inline constexpr double kCpAir = 1006.0;  // J/(kg K)

class PlantFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ZoneParams {
  std::string name;
  double capacitance = 5e6;  // J/K
  double ua_out = 200.0;     // W/K to outdoors (0 for the interior zone)
  double ua_core = 50.0;     // W/K to the interior zone
  double q_occ = 1000.0;     // W internal gain, occupied
  double q_unocc = 100.0;    // W internal gain, unoccupied
  double v_min = 0.3;        // kg/s
  double v_cool_max = 1.5;   // kg/s
};

struct PlantParams {
  std::vector<ZoneParams> zones;
  int interior_zone = -1;  // index of the zone the others exchange heat with, -1 for none
  double reheat_delta_max = 11.0;   // K at full reheat
  double fan_delta_t = 0.5;         // K fan heat
  double coil_approach = 2.0;       // K above chilled-water supply
  double chiller_capacity = 140e3;  // W
  double chw_flow_capacitance = 20e3;  // W/K, m_chw * cp_w
  double actuator_tau = 60.0;       // s
  double initial_zone_temp = 24.0;  // C
  double initial_chw_temp = 6.67;   // C

  // Five-zone office floor: four perimeter zones and an interior zone.
  static PlantParams five_zone_office();
  void validate() const;
};

struct PlantState {
  std::vector<double> t_zone;  // C
  double t_oa = 0.0;
  double t_ra = 0.0;
  double t_ma = 0.0;
  double t_sa = 0.0;
  double t_chw = 0.0;
  std::vector<double> m_dot;  // kg/s, first-order actuator state
  double valve_cool = 0.0;
  std::vector<double> reheat;
  bool fan_on = false;
  double oa_frac = 0.0;
  double q_coil = 0.0;  // W

  static PlantState initial(const PlantParams& params, double t_oa);
};

struct ControlCommand {
  std::vector<double> airflow_setpoint;  // kg/s per zone
  std::vector<double> reheat;            // 0..1 per zone
  double valve_cool = 0.0;
  bool fan_on = false;
  double oa_frac = 0.0;
  double chw_setpoint = 6.67;

  static ControlCommand idle(std::size_t zones);
  // Range-limits every value against the plant's declared actuator ranges.
  ControlCommand clamped(const PlantParams& params) const;
};

struct Exogenous {
  double t_oa = 20.0;
  bool occupied = false;
};

// One zone's energy balance; the building block of step_physics and of the
// single-zone oracles.
struct ZoneInputs {
  double t_oa = 0.0;
  double t_core = 0.0;
  double gain = 0.0;          // W
  double flow_capacity = 0.0;  // m_dot * cp, W/K
  double t_supply = 0.0;
};
double zone_derivative(const ZoneParams& zone, double t_zone, const ZoneInputs& in);

// Advances every continuous state by one forward-Euler step of dt seconds.
// Throws PlantFault when a temperature leaves [-40, 60] C or goes non-finite.
PlantState step_physics(const PlantParams& params, const PlantState& state, const ControlCommand& commands,
                        const Exogenous& exo, double dt);

// Largest dt for which the explicit scheme is stable for this parameter set.
double euler_stability_bound(const PlantParams& params);

}  // namespace bassim::plant
