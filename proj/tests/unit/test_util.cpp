#include "doctest.h"

#include "bassim/util/digest.hpp"
#include "bassim/util/format.hpp"
#include "bassim/util/sim_time.hpp"

using namespace bassim;

TEST_CASE("format_seconds is exact decimal") {
  CHECK(format_seconds(SimTime::from_micros(1'875'000)) == "1.875");
  CHECK(format_seconds(SimTime::from_whole_seconds(36000)) == "36000");
  CHECK(format_seconds(SimTime::from_micros(125)) == "0.000125");
  CHECK(format_seconds(SimTime{}) == "0");
}

TEST_CASE("float formatting round-trips") {
  for (float v : {22.5f, 35.0f, 12.78f, -0.1f, 1e-7f, 3.4e38f}) CHECK(std::stof(format_float(v)) == v);
  CHECK(format_float(22.5f) == "22.5");
  CHECK(std::stod(format_double(0.1)) == 0.1);
}

TEST_CASE("sha256 known answers") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
