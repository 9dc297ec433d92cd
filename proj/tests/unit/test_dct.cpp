#include <doctest.h>

#include <cmath>

#include "core/dct.hpp"
#include "support/corpus.hpp"
#include "support/oracles.hpp"

using namespace iqn;

namespace {

void random_block(iqntest::TestRng& rng, double out[64]) {
  for (int i = 0; i < 64; ++i)
    out[i] = static_cast<double>(rng.below(256));
}

}  // namespace

TEST_CASE("constant 128 transforms to all zeros") {
  double spatial[64], coeffs[64];
  for (auto& v : spatial)
    v = 128.0;
  forward_dct8(spatial, coeffs);
  for (double c : coeffs)
    CHECK(std::abs(c) <= 1e-12);
}

TEST_CASE("constant 128+c has DC 8c and zero AC") {
  for (double c : {1.0, 37.0, -50.0, 127.0}) {
    double spatial[64], coeffs[64];
    for (auto& v : spatial)
      v = 128.0 + c;
    forward_dct8(spatial, coeffs);
    CHECK(coeffs[0] == doctest::Approx(8.0 * c).epsilon(1e-12));
    for (int i = 1; i < 64; ++i)
      CHECK(std::abs(coeffs[i]) <= 1e-9);
  }
}

TEST_CASE("DC 8, zero AC inverts to all 129") {
  double coeffs[64] = {0};
  coeffs[0] = 8.0;
  double spatial[64];
  inverse_dct8(coeffs, spatial);
  for (double v : spatial)
    CHECK(v == doctest::Approx(129.0).epsilon(1e-12));
}

TEST_CASE("forward matches the naive quadruple-loop oracle") {
  iqntest::TestRng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    double spatial[64], ours[64], oracle[64];
    random_block(rng, spatial);
    forward_dct8(spatial, ours);
    iqntest::naive_dct8(spatial, oracle);
    for (int i = 0; i < 64; ++i)
      CHECK(std::abs(ours[i] - oracle[i]) <= 1e-9);
  }
}

TEST_CASE("inverse matches the naive oracle on random coefficients") {
  iqntest::TestRng rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    double coeffs[64], ours[64], oracle[64];
    for (auto& c : coeffs)
      c = rng.uniform(-512, 512);
    inverse_dct8(coeffs, ours);
    iqntest::naive_idct8(coeffs, oracle);
    for (int i = 0; i < 64; ++i)
      CHECK(std::abs(ours[i] - oracle[i]) <= 1e-9);
  }
}

TEST_CASE("round trip is the identity within 1e-9") {
  iqntest::TestRng rng(44);
  for (int trial = 0; trial < 200; ++trial) {
    double spatial[64], coeffs[64], back[64];
    random_block(rng, spatial);
    forward_dct8(spatial, coeffs);
    inverse_dct8(coeffs, back);
    for (int i = 0; i < 64; ++i)
      CHECK(std::abs(back[i] - spatial[i]) <= 1e-9);
  }
}

TEST_CASE("Parseval energy preservation") {
  iqntest::TestRng rng(45);
  for (int trial = 0; trial < 100; ++trial) {
    double spatial[64], coeffs[64];
    random_block(rng, spatial);
    forward_dct8(spatial, coeffs);
    double es = 0, ec = 0;
    for (int i = 0; i < 64; ++i) {
      double d = spatial[i] - 128.0;
      es += d * d;
      ec += coeffs[i] * coeffs[i];
    }
    CHECK(std::abs(es - ec) <= 1e-6 * std::max(1.0, es));
  }
}

TEST_CASE("gather_block reads row-major with stride") {
  std::vector<uint8_t> plane(16 * 16);
  for (size_t i = 0; i < plane.size(); ++i)
    plane[i] = static_cast<uint8_t>(i);
  double block[64];
  gather_block(plane.data(), 16, 8, 8, block);
  CHECK(block[0] == 8 * 16 + 8);
  CHECK(block[7] == 8 * 16 + 15);
  CHECK(block[63] == 15 * 16 + 15);
}
