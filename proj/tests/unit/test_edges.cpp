#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "core/edges.hpp"
#include "core/image.hpp"
#include "support/corpus.hpp"

using namespace iqn;

TEST_CASE("constant image has no edges") {
  PlanarImage img = PlanarImage::makeYOnly(32, 32, 90);
  EdgeMask m = canny(img, canny_main_defaults());
  CHECK(m.count() == 0);
}

TEST_CASE("vertical step edge localizes to the step column") {
  int w = 64, h = 32, step = 32;
  PlanarImage img = PlanarImage::makeYOnly(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      img.y[static_cast<size_t>(y) * w + x] = x < step ? 0 : 255;
  EdgeMask m = canny(img, canny_main_defaults());
  CHECK(m.count() >= static_cast<size_t>(h) / 2);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (m.at(x, y))
        REQUIRE(std::abs(x - step) <= 2);
}

TEST_CASE("detail detector fires at least as often as main") {
  auto corpus = iqntest::corpus20();
  for (const auto& img : corpus) {
    EdgeMask mainMask = canny(img, canny_main_defaults());
    EdgeMask detailMask = canny(img, canny_detail_defaults());
    CHECK(detailMask.count() >= mainMask.count());
  }
}

TEST_CASE("canny is deterministic") {
  PlanarImage img = iqntest::synth_image(3, 64, 64);
  EdgeMask a = canny(img, canny_detail_defaults());
  EdgeMask b = canny(img, canny_detail_defaults());
  CHECK(a.bits == b.bits);
}

TEST_CASE("canny is translation-equivariant away from borders") {
  // Content confined to [20,84) of a 104x104 constant canvas; windows offset
  // by (8,8) see identical pixels there, so masks must match exactly.
  PlanarImage big = PlanarImage::makeYOnly(104, 104, 128);
  PlanarImage content = iqntest::synth_image(11, 64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      big.y[static_cast<size_t>(y + 20) * 104 + (x + 20)] = content.y[static_cast<size_t>(y) * 64 + x];
  auto window = [&](int ox, int oy) {
    PlanarImage wimg = PlanarImage::makeYOnly(96, 96);
    for (int y = 0; y < 96; ++y)
      for (int x = 0; x < 96; ++x)
        wimg.y[static_cast<size_t>(y) * 96 + x] = big.y[static_cast<size_t>(y + oy) * 104 + (x + ox)];
    return wimg;
  };
  EdgeMask a = canny(window(0, 0), canny_detail_defaults());
  EdgeMask b = canny(window(8, 8), canny_detail_defaults());
  for (int y = 20; y < 84; ++y)
    for (int x = 20; x < 84; ++x)
      REQUIRE(a.at(x, y) == b.at(x - 8, y - 8));
}

TEST_CASE("canny parameter validation") {
  CannyParams p;
  p.low = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = CannyParams{};
  p.low = p.high;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = CannyParams{};
  p.sigma = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  PlanarImage tiny = PlanarImage::makeYOnly(4, 4);
  CHECK_THROWS_AS(canny(tiny, CannyParams{}), DimensionError);
}

namespace {

EdgeMask make_mask(int w, int h, std::initializer_list<int> ones) {
  EdgeMask m;
  m.width = w;
  m.height = h;
  m.bits.assign(static_cast<size_t>(w) * h, 0);
  for (int i : ones)
    m.bits[i] = 1;
  return m;
}

// Brute-force reference: set difference then Chebyshev-radius dilation.
EdgeMask minor_oracle(const EdgeMask& mainMask, const EdgeMask& detailMask, int r) {
  EdgeMask out;
  out.width = mainMask.width;
  out.height = mainMask.height;
  out.bits.assign(mainMask.bits.size(), 0);
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x) {
      bool hit = false;
      for (int ny = 0; ny < out.height && !hit; ++ny)
        for (int nx = 0; nx < out.width && !hit; ++nx)
          if (std::abs(nx - x) <= r && std::abs(ny - y) <= r &&
              detailMask.at(nx, ny) && !mainMask.at(nx, ny))
            hit = true;
      if (hit)
        out.bits[static_cast<size_t>(y) * out.width + x] = 1;
    }
  return out;
}

}  // namespace

TEST_CASE("minor edge mask") {
  SUBCASE("identical masks give an empty result") {
    EdgeMask m = make_mask(8, 8, {3, 9, 27});
    CHECK(minor_edge_mask(m, m, 1).count() == 0);
    CHECK(minor_edge_mask(m, m, 0).count() == 0);
  }
  SUBCASE("empty main leaves the dilated detail mask") {
    EdgeMask none = make_mask(8, 8, {});
    EdgeMask detail = make_mask(8, 8, {27});  // (3,3)
    EdgeMask out = minor_edge_mask(none, detail, 1);
    CHECK(out.count() == 9);
    for (int y = 2; y <= 4; ++y)
      for (int x = 2; x <= 4; ++x)
        CHECK(out.at(x, y));
  }
  SUBCASE("random masks match the brute-force oracle") {
    iqntest::TestRng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
      EdgeMask mainMask = make_mask(8, 8, {});
      EdgeMask detailMask = make_mask(8, 8, {});
      for (int i = 0; i < 64; ++i) {
        mainMask.bits[i] = rng.below(4) == 0;
        detailMask.bits[i] = rng.below(3) == 0;
      }
      for (int r : {0, 1, 2}) {
        EdgeMask got = minor_edge_mask(mainMask, detailMask, r);
        EdgeMask want = minor_oracle(mainMask, detailMask, r);
        REQUIRE(got.bits == want.bits);
      }
    }
  }
  SUBCASE("dimension mismatch") {
    EdgeMask a = make_mask(8, 8, {});
    EdgeMask b = make_mask(4, 4, {});
    CHECK_THROWS_AS(minor_edge_mask(a, b, 1), DimensionError);
  }
}

TEST_CASE("preserve_edges") {
  PlanarImage orig = iqntest::synth_image(6, 32, 32);
  PlanarImage filt = iqntest::synth_image(7, 32, 32);
  SUBCASE("empty mask keeps the filtered plane") {
    EdgeMask none = make_mask(32, 32, {});
    CHECK(preserve_edges(orig.y, filt.y, none) == filt.y);
  }
  SUBCASE("full mask keeps the original") {
    EdgeMask full = make_mask(32, 32, {});
    std::fill(full.bits.begin(), full.bits.end(), uint8_t{1});
    CHECK(preserve_edges(orig.y, filt.y, full) == orig.y);
  }
  SUBCASE("random mask selects per pixel and cannot increase MAE") {
    iqntest::TestRng rng(8);
    EdgeMask m = make_mask(32, 32, {});
    for (auto& b : m.bits)
      b = rng.below(2);
    auto out = preserve_edges(orig.y, filt.y, m);
    for (size_t i = 0; i < out.size(); ++i)
      REQUIRE(out[i] == (m.bits[i] ? orig.y[i] : filt.y[i]));
    CHECK(mae(out.data(), orig.y.data(), out.size()) <=
          mae(filt.y.data(), orig.y.data(), out.size()));
  }
  SUBCASE("dimension mismatch") {
    EdgeMask wrong = make_mask(4, 4, {});
    CHECK_THROWS_AS(preserve_edges(orig.y, filt.y, wrong), DimensionError);
  }
}
