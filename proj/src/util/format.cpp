#include "bassim/util/format.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>

namespace bassim {

std::string format_seconds(SimTime t) {
  std::int64_t us = t.micros();
  std::string out;
  if (us < 0) {
    out = "-";
    us = -us;
  }
  out += std::to_string(us / 1000000);
  std::int64_t frac = us % 1000000;
  if (frac == 0) return out;
  char buf[8];
  std::snprintf(buf, sizeof buf, "%06lld", static_cast<long long>(frac));
  std::string f(buf);
  while (!f.empty() && f.back() == '0') f.pop_back();
  return out + "." + f;
}

std::string format_float(float v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

std::string format_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace bassim
