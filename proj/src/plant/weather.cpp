#include "bassim/plant/weather.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace bassim::plant {

WeatherSeries WeatherSeries::synthetic() { return WeatherSeries{}; }

WeatherSeries WeatherSeries::from_samples(std::vector<std::pair<double, double>> samples) {
  WeatherSeries w;
  std::sort(samples.begin(), samples.end());
  w.samples_ = std::move(samples);
  return w;
}

double WeatherSeries::synthetic_at(double hour) {
  return 26.0 + 6.0 * std::sin(2.0 * std::numbers::pi * (hour - 9.0) / 24.0);
}

double WeatherSeries::at_hour(double hour_of_year) const {
  if (samples_.empty()) return synthetic_at(hour_of_year);
  if (hour_of_year <= samples_.front().first) return samples_.front().second;
  if (hour_of_year >= samples_.back().first) return samples_.back().second;
  auto hi = std::upper_bound(samples_.begin(), samples_.end(), hour_of_year,
                             [](double h, const auto& s) { return h < s.first; });
  auto lo = hi - 1;
  const double f = (hour_of_year - lo->first) / (hi->first - lo->first);
  return lo->second + f * (hi->second - lo->second);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

Expected<WeatherSeries, WeatherError> parse_weather_csv(const std::string& text, double first_hour,
                                                        double duration_h) {
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  std::vector<std::pair<double, double>> samples;
  double last_hour = -1e300;
  while (std::getline(in, line)) {
    ++row;
    std::string_view l = trim(line);
    if (l.empty() || l.front() == '#') continue;
    if (!header_seen) {
      if (l != "hour,t_out_c") return Unexpected{WeatherError{row, "expected header 'hour,t_out_c'"}};
      header_seen = true;
      continue;
    }
    auto comma = l.find(',');
    double hour = 0, temp = 0;
    if (comma == std::string_view::npos || !parse_double(l.substr(0, comma), hour) ||
        !parse_double(l.substr(comma + 1), temp))
      return Unexpected{WeatherError{row, "non-numeric weather row '" + std::string(l) + "'"}};
    if (hour <= last_hour) return Unexpected{WeatherError{row, "hour values must increase monotonically"}};
    last_hour = hour;
    samples.emplace_back(hour, temp);
  }
  if (!header_seen) return Unexpected{WeatherError{0, "empty weather file"}};

  std::set<long long> hours;
  for (const auto& s : samples)
    if (s.first == std::floor(s.first)) hours.insert(static_cast<long long>(s.first));
  const auto start = static_cast<long long>(std::floor(first_hour));
  const auto count = static_cast<long long>(std::ceil(duration_h));
  for (long long h = start; h < start + count; ++h) {
    if (!hours.contains(h))
      return Unexpected{WeatherError{0, "weather series does not cover hour " + std::to_string(h) + " (have " +
                                            std::to_string(samples.size()) + " rows for a " +
                                            std::to_string(count) + " h run)"}};
  }
  return WeatherSeries::from_samples(std::move(samples));
}

Expected<WeatherSeries, WeatherError> load_weather(const std::string& source, double first_hour, double duration_h) {
  if (source.empty() || source == "synthetic") return WeatherSeries::synthetic();
  std::ifstream f(source);
  if (!f) return Unexpected{WeatherError{0, "cannot open weather file '" + source + "'"}};
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_weather_csv(buf.str(), first_hour, duration_h);
}

}  // namespace bassim::plant
