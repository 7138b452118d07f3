#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "bassim/util/expected.hpp"

namespace bassim::plant {

struct WeatherError {
  std::size_t row = 0;  // 1-based CSV line, 0 when not row-specific
  std::string message;
};

// Outdoor dry-bulb series, hour-of-year indexed. Either hourly samples with
// linear interpolation, or the synthetic diurnal profile
// T(h) = 26 + 6 sin(2 pi (h - 9) / 24).
class WeatherSeries {
 public:
  static WeatherSeries synthetic();
  static WeatherSeries from_samples(std::vector<std::pair<double, double>> samples);

  double at_hour(double hour_of_year) const;
  bool is_synthetic() const { return samples_.empty(); }
  const std::vector<std::pair<double, double>>& samples() const { return samples_; }

  static double synthetic_at(double hour);

 private:
  std::vector<std::pair<double, double>> samples_;
};

// Parses `hour,t_out_c` CSV text and checks that every whole hour in
// [first_hour, first_hour + duration_h) has a sample.
Expected<WeatherSeries, WeatherError> parse_weather_csv(const std::string& text, double first_hour,
                                                        double duration_h);

// `source` is "synthetic" or a CSV path.
Expected<WeatherSeries, WeatherError> load_weather(const std::string& source, double first_hour, double duration_h);

}  // namespace bassim::plant
