#include "bassim/plant/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace bassim::plant {

PlantParams PlantParams::five_zone_office() {
  PlantParams p;
  const char* names[] = {"north", "east", "south", "west", "core"};
  for (const char* name : names) {
    ZoneParams z;
    z.name = name;
    z.q_occ = 3000.0;
    z.v_min = 0.2;
    p.zones.push_back(z);
  }
  p.zones[4].ua_out = 0.0;
  p.zones[4].ua_core = 0.0;
  p.interior_zone = 4;
  return p;
}

void PlantParams::validate() const {
  if (zones.empty()) throw std::invalid_argument("plant needs at least one zone");
  if (interior_zone >= static_cast<int>(zones.size())) throw std::invalid_argument("interior zone index out of range");
  for (const auto& z : zones) {
    if (z.capacitance <= 0 || z.ua_out < 0 || z.ua_core < 0 || z.q_occ < 0 || z.q_unocc < 0 || z.v_min < 0 ||
        z.v_cool_max < z.v_min)
      throw std::invalid_argument("zone '" + z.name + "' has out-of-range parameters");
  }
  if (interior_zone >= 0 && zones[static_cast<std::size_t>(interior_zone)].ua_out != 0.0)
    throw std::invalid_argument("interior zone must have ua_out = 0");
  if (actuator_tau <= 0 || chw_flow_capacitance <= 0) throw std::invalid_argument("non-positive plant constant");
}

PlantState PlantState::initial(const PlantParams& params, double t_oa) {
  PlantState s;
  const std::size_t n = params.zones.size();
  s.t_zone.assign(n, params.initial_zone_temp);
  s.m_dot.assign(n, 0.0);
  s.reheat.assign(n, 0.0);
  s.t_oa = t_oa;
  s.t_ra = params.initial_zone_temp;
  s.t_ma = params.initial_zone_temp;
  s.t_sa = params.initial_zone_temp;
  s.t_chw = params.initial_chw_temp;
  return s;
}

ControlCommand ControlCommand::idle(std::size_t zones) {
  ControlCommand c;
  c.airflow_setpoint.assign(zones, 0.0);
  c.reheat.assign(zones, 0.0);
  return c;
}

ControlCommand ControlCommand::clamped(const PlantParams& params) const {
  ControlCommand c = *this;
  const std::size_t n = params.zones.size();
  c.airflow_setpoint.resize(n, 0.0);
  c.reheat.resize(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    c.airflow_setpoint[i] = std::clamp(c.airflow_setpoint[i], 0.0, params.zones[i].v_cool_max);
    c.reheat[i] = std::clamp(c.reheat[i], 0.0, 1.0);
  }
  c.valve_cool = std::clamp(c.valve_cool, 0.0, 1.0);
  c.oa_frac = std::clamp(c.oa_frac, 0.0, 1.0);
  c.chw_setpoint = std::clamp(c.chw_setpoint, 2.0, 20.0);
  return c;
}

double zone_derivative(const ZoneParams& zone, double t_zone, const ZoneInputs& in) {
  const double q = zone.ua_out * (in.t_oa - t_zone) + zone.ua_core * (in.t_core - t_zone) + in.gain +
                   in.flow_capacity * (in.t_supply - t_zone);
  return q / zone.capacitance;
}

namespace {

void check_temp(const char* what, double v, std::size_t index = 0) {
  if (!std::isfinite(v) || v < -40.0 || v > 60.0) {
    std::ostringstream os;
    os << "plant fault: " << what;
    if (index) os << '[' << index - 1 << ']';
    os << " = " << v << " C outside [-40, 60]";
    throw PlantFault(os.str());
  }
}

}  // namespace

PlantState step_physics(const PlantParams& params, const PlantState& state, const ControlCommand& commands,
                        const Exogenous& exo, double dt) {
  const ControlCommand cmd = commands.clamped(params);
  const std::size_t n = params.zones.size();
  PlantState next = state;
  next.t_oa = exo.t_oa;
  next.fan_on = cmd.fan_on;
  next.valve_cool = cmd.fan_on ? cmd.valve_cool : 0.0;
  next.oa_frac = cmd.fan_on ? cmd.oa_frac : 0.0;
  next.reheat = cmd.reheat;

  // Air side: return, mixing, coil.
  const double total_flow = std::accumulate(state.m_dot.begin(), state.m_dot.end(), 0.0);
  if (total_flow > 1e-9) {
    double weighted = 0.0;
    for (std::size_t i = 0; i < n; ++i) weighted += state.m_dot[i] * state.t_zone[i];
    next.t_ra = weighted / total_flow;
  } else {
    next.t_ra = std::accumulate(state.t_zone.begin(), state.t_zone.end(), 0.0) / static_cast<double>(n);
  }
  next.t_ma = next.oa_frac * exo.t_oa + (1.0 - next.oa_frac) * next.t_ra;
  if (cmd.fan_on) {
    const double coil_in = next.t_ma + params.fan_delta_t;
    const double sa_min = state.t_chw + params.coil_approach;
    next.t_sa = coil_in > sa_min ? coil_in - next.valve_cool * (coil_in - sa_min) : coil_in;
    next.q_coil = total_flow * kCpAir * (coil_in - next.t_sa);
  } else {
    next.t_sa = next.t_ma;
    next.q_coil = 0.0;
  }

  // Chilled-water supply: holds setpoint until the coil load exceeds capacity.
  next.t_chw = next.q_coil <= params.chiller_capacity
                   ? cmd.chw_setpoint
                   : cmd.chw_setpoint + (next.q_coil - params.chiller_capacity) / params.chw_flow_capacitance;

  // Zones.
  const bool has_core = params.interior_zone >= 0;
  const double t_core = has_core ? state.t_zone[static_cast<std::size_t>(params.interior_zone)] : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const ZoneParams& z = params.zones[i];
    ZoneInputs in;
    in.t_oa = exo.t_oa;
    in.gain = exo.occupied ? z.q_occ : z.q_unocc;
    in.flow_capacity = cmd.fan_on ? state.m_dot[i] * kCpAir : 0.0;
    in.t_supply = next.t_sa + cmd.reheat[i] * params.reheat_delta_max;
    double d;
    if (has_core && static_cast<int>(i) == params.interior_zone) {
      double exchange = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) exchange += params.zones[j].ua_core * (state.t_zone[j] - state.t_zone[i]);
      in.t_core = state.t_zone[i];
      d = zone_derivative(z, state.t_zone[i], in) + exchange / z.capacitance;
    } else {
      in.t_core = has_core ? t_core : state.t_zone[i];
      d = zone_derivative(z, state.t_zone[i], in);
    }
    next.t_zone[i] = state.t_zone[i] + dt * d;
    check_temp("t_zone", next.t_zone[i], i + 1);

    const double target = cmd.fan_on ? cmd.airflow_setpoint[i] : 0.0;
    const double m = state.m_dot[i] + dt * (target - state.m_dot[i]) / params.actuator_tau;
    next.m_dot[i] = std::clamp(m, 0.0, z.v_cool_max);
  }
  check_temp("t_sa", next.t_sa);
  check_temp("t_ma", next.t_ma);
  check_temp("t_chw", next.t_chw);
  return next;
}

double euler_stability_bound(const PlantParams& params) {
  double bound = 2.0 * params.actuator_tau;
  for (std::size_t i = 0; i < params.zones.size(); ++i) {
    const ZoneParams& z = params.zones[i];
    double ua = z.ua_out + z.ua_core + z.v_cool_max * kCpAir;
    if (static_cast<int>(i) == params.interior_zone)
      for (std::size_t j = 0; j < params.zones.size(); ++j)
        if (j != i) ua += params.zones[j].ua_core;
    bound = std::min(bound, 2.0 * z.capacitance / ua);
  }
  return bound;
}

}  // namespace bassim::plant
