#include "forgetting/rng.hpp"

#include <array>
#include <cstdint>
#include <vector>

#include "doctest.h"

using forgetting::Philox4x32;
using forgetting::UniformStream;

TEST_CASE("philox4x32-10 matches the published test vectors") {
  // Known-answer vectors from the reference implementation's kat_vectors.
  CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) ==
        std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu,
                                     0x9b00dbd8u});
  CHECK(Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu,
                           0xffffffffu},
                          {0xffffffffu, 0xffffffffu}) ==
        std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u,
                                     0x6d5451fdu});
  CHECK(Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu,
                           0x03707344u},
                          {0xa4093822u, 0x299f31d0u}) ==
        std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u,
                                     0x24126ea1u});
}

TEST_CASE("streams are reproducible") {
  UniformStream a(12345, 3);
  UniformStream b(12345, 3);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next() == b.next());
  }
}

TEST_CASE("distinct stream indices differ immediately") {
  UniformStream a(12345, 0);
  UniformStream b(12345, 1);
  int differing = 0;
  for (int i = 0; i < 10; ++i) {
    if (a.next() != b.next()) ++differing;
  }
  CHECK(differing == 10);
}

TEST_CASE("values stay strictly inside (0,1)") {
  UniformStream stream(0, 0);
  double lo = 1.0;
  double hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = stream.next();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
}

TEST_CASE("one million draws have the uniform mean within 3 sigma") {
  UniformStream stream(987654321, 0);
  double sum = 0.0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) sum += stream.next();
  const double mean = sum / n;
  // sigma of the mean is 1/sqrt(12 n) ~ 2.9e-4; 0.002 is a ~7 sigma bound.
  CHECK(std::abs(mean - 0.5) <= 0.002);
}

TEST_CASE("normal stream moments are sane") {
  forgetting::NormalStream normals(42, 0);
  double sum = 0.0;
  double sumsq = 0.0;
  const int n = 200'000;
  for (int i = 0; i < n; ++i) {
    const double z = normals.next();
    sum += z;
    sumsq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.02));
}
