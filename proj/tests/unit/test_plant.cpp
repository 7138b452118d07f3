#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "bassim/plant/measurement.hpp"
#include "bassim/plant/plant.hpp"
#include "bassim/plant/weather.hpp"

using namespace bassim::plant;

namespace {

PlantParams single_zone(double capacitance) {
  PlantParams p;
  ZoneParams z;
  z.name = "z";
  z.capacitance = capacitance;
  z.ua_out = 200.0;
  z.ua_core = 0.0;
  z.q_occ = 1000.0;
  z.q_unocc = 0.0;
  z.v_min = 0.0;
  z.v_cool_max = 1.5;
  p.zones.push_back(z);
  p.fan_delta_t = 0.0;
  p.coil_approach = 2.0;
  return p;
}

PlantState settle(const PlantParams& p, PlantState s, const ControlCommand& cmd, const Exogenous& exo, double dt,
                  int steps) {
  for (int i = 0; i < steps; ++i) s = step_physics(p, s, cmd, exo, dt);
  return s;
}

}  // namespace

TEST_CASE("zone without airflow settles at the algebraic balance") {
  const PlantParams p = single_zone(1e6);
  const ControlCommand cmd = ControlCommand::idle(1);
  const Exogenous exo{30.0, true};
  const PlantState s = settle(p, PlantState::initial(p, 30.0), cmd, exo, 10.0, 20000);
  const double expected = 30.0 + 1000.0 / 200.0;
  CHECK(std::abs(s.t_zone[0] - expected) < 1e-9);
  CHECK(std::abs(s.t_zone[0] - 35.0) < 0.01);
}

TEST_CASE("zone with supply air settles at the weighted balance") {
  PlantParams p = single_zone(1e6);
  ControlCommand cmd = ControlCommand::idle(1);
  cmd.fan_on = true;
  cmd.valve_cool = 1.0;
  cmd.oa_frac = 0.0;
  cmd.chw_setpoint = 10.78;  // supply = chw + approach = 12.78
  const double m_dot = 503.0 / kCpAir;
  cmd.airflow_setpoint = {m_dot};
  const Exogenous exo{30.0, true};
  const PlantState s = settle(p, PlantState::initial(p, 30.0), cmd, exo, 5.0, 40000);
  CHECK(s.t_sa == doctest::Approx(12.78));
  const double expected = (200.0 * 30.0 + 1000.0 + 503.0 * 12.78) / (200.0 + 503.0);
  CHECK(std::abs(s.t_zone[0] - expected) < 0.01);
  CHECK(std::abs(s.t_zone[0] - 19.10) < 0.01);
}

TEST_CASE("single-zone step response tracks the analytic exponential") {
  PlantParams p = single_zone(2e5);
  p.zones[0].q_occ = 0.0;
  const double tau = p.zones[0].capacitance / p.zones[0].ua_out;  // 1000 s
  PlantState s = PlantState::initial(p, 30.0);
  const double t0 = s.t_zone[0];
  const Exogenous exo{30.0, true};
  const ControlCommand cmd = ControlCommand::idle(1);
  for (int i = 0; i < static_cast<int>(tau); ++i) s = step_physics(p, s, cmd, exo, 1.0);
  const double analytic_rise = (30.0 - t0) * (1.0 - std::exp(-1.0));
  const double simulated_rise = s.t_zone[0] - t0;
  CHECK(std::abs(simulated_rise - analytic_rise) <= 0.01 * std::abs(analytic_rise));
}

TEST_CASE("mixing with no outdoor air passes return air through") {
  const PlantParams p = PlantParams::five_zone_office();
  PlantState s = PlantState::initial(p, 31.0);
  for (std::size_t i = 0; i < s.t_zone.size(); ++i) {
    s.t_zone[i] = 22.0 + 0.7 * static_cast<double>(i);
    s.m_dot[i] = 0.2 + 0.1 * static_cast<double>(i);
  }
  ControlCommand cmd = ControlCommand::idle(p.zones.size());
  cmd.fan_on = true;
  cmd.oa_frac = 0.0;
  const PlantState next = step_physics(p, s, cmd, Exogenous{31.0, true}, 1.0);
  CHECK(next.t_ma == next.t_ra);
}

TEST_CASE("actuator lag reaches 63 percent after one time constant") {
  PlantParams p = single_zone(1e6);
  ControlCommand cmd = ControlCommand::idle(1);
  cmd.fan_on = true;
  cmd.airflow_setpoint = {1.0};
  PlantState s = PlantState::initial(p, 24.0);
  for (int i = 0; i < static_cast<int>(p.actuator_tau * 10); ++i) s = step_physics(p, s, cmd, Exogenous{24.0, true}, 0.1);
  CHECK(std::abs(s.m_dot[0] - (1.0 - std::exp(-1.0))) < 0.01 * (1.0 - std::exp(-1.0)));
}

TEST_CASE("commands are clamped to actuator ranges") {
  const PlantParams p = PlantParams::five_zone_office();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> wild(-10.0, 10.0);
  for (int trial = 0; trial < 2000; ++trial) {
    ControlCommand c = ControlCommand::idle(p.zones.size());
    for (auto& v : c.airflow_setpoint) v = wild(rng);
    for (auto& v : c.reheat) v = wild(rng);
    c.valve_cool = wild(rng);
    c.oa_frac = wild(rng);
    c.chw_setpoint = wild(rng) * 5;
    const ControlCommand k = c.clamped(p);
    for (std::size_t i = 0; i < p.zones.size(); ++i) {
      CHECK(k.airflow_setpoint[i] >= 0.0);
      CHECK(k.airflow_setpoint[i] <= p.zones[i].v_cool_max);
      CHECK(k.reheat[i] >= 0.0);
      CHECK(k.reheat[i] <= 1.0);
    }
    CHECK(k.valve_cool >= 0.0);
    CHECK(k.valve_cool <= 1.0);
    CHECK(k.oa_frac >= 0.0);
    CHECK(k.oa_frac <= 1.0);
  }
}

TEST_CASE("default plant is stable at the 1 s step and faults on runaway") {
  const PlantParams p = PlantParams::five_zone_office();
  CHECK(euler_stability_bound(p) > 1.0);
  CHECK_NOTHROW(p.validate());

  // Open-loop day with extreme but finite inputs stays bounded.
  PlantState s = PlantState::initial(p, 26.0);
  ControlCommand cmd = ControlCommand::idle(p.zones.size());
  cmd.fan_on = true;
  cmd.valve_cool = 1.0;
  cmd.airflow_setpoint.assign(p.zones.size(), 1.5);
  for (int i = 0; i < 86400; ++i) s = step_physics(p, s, cmd, Exogenous{WeatherSeries::synthetic_at(i / 3600.0), true}, 1.0);
  for (double t : s.t_zone) CHECK(std::isfinite(t));

  PlantParams tiny = single_zone(1.0);  // tiny capacitance: explicit Euler diverges at dt = 1
  CHECK(euler_stability_bound(tiny) < 1.0);
  PlantState bad = PlantState::initial(tiny, 30.0);
  CHECK_THROWS_AS(settle(tiny, bad, ControlCommand::idle(1), Exogenous{30.0, true}, 1.0, 100), PlantFault);
}

TEST_CASE("validation rejects an interior zone with an outdoor path") {
  PlantParams p = PlantParams::five_zone_office();
  p.zones[4].ua_out = 10.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("synthetic weather profile") {
  CHECK(WeatherSeries::synthetic_at(15.0) == doctest::Approx(32.0));
  CHECK(WeatherSeries::synthetic_at(9.0) == doctest::Approx(26.0));
  CHECK(WeatherSeries::synthetic().at_hour(24.0 * 212 + 15.0) == doctest::Approx(32.0));
}

TEST_CASE("weather csv coverage and interpolation") {
  std::ostringstream full, short_file;
  full << "hour,t_out_c\n";
  short_file << "hour,t_out_c\n";
  for (int h = 0; h < 24; ++h) {
    full << h << ',' << 20 + h << '\n';
    if (h < 23) short_file << h << ',' << 20 + h << '\n';
  }
  auto ok = parse_weather_csv(full.str(), 0.0, 24.0);
  REQUIRE(ok.has_value());
  CHECK(ok->at_hour(3.5) == doctest::Approx(23.5));

  auto missing = parse_weather_csv(short_file.str(), 0.0, 24.0);
  REQUIRE_FALSE(missing.has_value());
  CHECK(missing.error().message.find("hour 23") != std::string::npos);

  auto bad = parse_weather_csv("hour,t_out_c\n0,20\nx,21\n", 0.0, 1.0);
  REQUIRE_FALSE(bad.has_value());
  CHECK(bad.error().row == 3);
}

TEST_CASE("sensor noise statistics and determinism") {
  const SensorNoise noise(0.05, 42);
  double sum = 0, sq = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double x = noise.sample(3, i);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double sigma = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(sigma - 0.05) < 0.005);
  CHECK(noise.sample(3, 17) == SensorNoise(0.05, 42).sample(3, 17));
  CHECK(noise.sample(3, 17) != SensorNoise(0.05, 43).sample(3, 17));

  const PlantParams p = PlantParams::five_zone_office();
  const PlantState s = PlantState::initial(p, 28.0);
  const MeasurementSet quiet = measurement_snapshot(s, SensorNoise(0.0, 1), 5);
  CHECK(quiet.t_zone == s.t_zone);
  CHECK(quiet.t_oa == s.t_oa);
  CHECK(quiet.t_sa == s.t_sa);
  const MeasurementSet a = measurement_snapshot(s, noise, 9), b = measurement_snapshot(s, noise, 9);
  CHECK(a.t_zone == b.t_zone);
}
