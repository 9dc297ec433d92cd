#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/image.hpp"
#include "support/corpus.hpp"

using namespace iqn;

TEST_CASE("patch grid geometry") {
  SUBCASE("128x64 with 64-patches") {
    PatchGrid g = PatchGrid::forDims(128, 64, 64);
    CHECK(g.cols == 2);
    CHECK(g.rows == 1);
    REQUIRE(g.origins.size() == 2);
    CHECK(g.origins[0] == std::pair<int, int>{0, 0});
    CHECK(g.origins[1] == std::pair<int, int>{64, 0});
  }
  SUBCASE("448x256 tiles into 28 patches") {
    PatchGrid g = PatchGrid::forDims(448, 256, 64);
    CHECK(g.cols * g.rows == 28);
  }
}

TEST_CASE("crop_patches basics") {
  PlanarImage img = iqntest::synth_image(3, 128, 64);
  auto patches = crop_patches(img, 64);
  REQUIRE(patches.size() == 2);
  CHECK(patches[0].x == 0);
  CHECK(patches[1].x == 64);

  PlanarImage one = iqntest::synth_image(4, 64, 64);
  auto single = crop_patches(one, 64);
  REQUIRE(single.size() == 1);
  CHECK(single[0].pixels == one.y);
}

TEST_CASE("crop then assemble is the identity, order-independent") {
  for (uint64_t seed : {1ull, 2ull}) {
    // 100x56 forces padding in both axes.
    PlanarImage img = iqntest::synth_image(seed, 100, 56);
    auto patches = crop_patches(img, 64);
    CHECK(assemble_patches(patches, img.width, img.height) == img.y);
    std::reverse(patches.begin(), patches.end());
    CHECK(assemble_patches(patches, img.width, img.height) == img.y);
  }
}

TEST_CASE("assembling a zeroed patch changes only that region") {
  PlanarImage img = iqntest::synth_image(7, 128, 128);
  auto patches = crop_patches(img, 64);
  REQUIRE(patches.size() == 4);
  std::fill(patches[2].pixels.begin(), patches[2].pixels.end(), uint8_t{0});
  int px = patches[2].x, py = patches[2].y;
  auto plane = assemble_patches(patches, img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      bool inside = x >= px && x < px + 64 && y >= py && y < py + 64;
      uint8_t expect = inside ? 0 : img.y[static_cast<size_t>(y) * img.width + x];
      REQUIRE(plane[static_cast<size_t>(y) * img.width + x] == expect);
    }
  }
}

TEST_CASE("assemble rejects overlaps and gaps") {
  PlanarImage img = iqntest::synth_image(9, 128, 64);
  auto patches = crop_patches(img, 64);
  auto dup = patches;
  dup[1] = dup[0];
  CHECK_THROWS_AS(assemble_patches(dup, img.width, img.height), TilingError);
  auto gap = patches;
  gap.pop_back();
  CHECK_THROWS_AS(assemble_patches(gap, img.width, img.height), TilingError);
}

TEST_CASE("mae") {
  PlanarImage a = PlanarImage::makeYOnly(8, 8, 10);
  CHECK(mae_luma(a, a) == 0.0);
  PlanarImage b = PlanarImage::makeYOnly(8, 8, 13);
  CHECK(mae_luma(a, b) == doctest::Approx(3.0));
  CHECK(mae_luma(b, a) == mae_luma(a, b));

  iqntest::TestRng rng(11);
  PlanarImage r1 = PlanarImage::makeYOnly(8, 8);
  PlanarImage r2 = PlanarImage::makeYOnly(8, 8);
  for (int i = 0; i < 64; ++i) {
    r1.y[i] = static_cast<uint8_t>(rng.below(256));
    r2.y[i] = static_cast<uint8_t>(rng.below(256));
  }
  double ref = 0;  // straightforward two-loop reference
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x)
      ref += std::abs(static_cast<int>(r1.y[y * 8 + x]) - static_cast<int>(r2.y[y * 8 + x]));
  ref /= 64.0;
  CHECK(mae_luma(r1, r2) == doctest::Approx(ref).epsilon(1e-12));

  PlanarImage c = PlanarImage::makeYOnly(4, 4);
  CHECK_THROWS_AS(mae_luma(a, c), DimensionError);
}

TEST_CASE("psnr") {
  PlanarImage img = iqntest::synth_image(13, 32, 32);
  CHECK(std::isinf(psnr(img, img)));

  PlanarImage off = img;  // one gray level off everywhere: MSE exactly 1
  for (auto& v : off.y)
    v = static_cast<uint8_t>(v < 255 ? v + 1 : v - 1);
  CHECK(psnr(img, off) == doctest::Approx(48.1308).epsilon(1e-3 / 48.0));

  iqntest::TestRng rng(17);
  PlanarImage r = img;
  for (auto& v : r.y)
    v = static_cast<uint8_t>(rng.below(256));
  double mse = 0;
  for (size_t i = 0; i < img.y.size(); ++i) {
    double d = static_cast<double>(img.y[i]) - r.y[i];
    mse += d * d;
  }
  mse /= static_cast<double>(img.y.size());
  CHECK(psnr(img, r) == doctest::Approx(10 * std::log10(255.0 * 255.0 / mse)).epsilon(1e-9));
  CHECK(psnr(img, r) == psnr(r, img));

  PlanarImage other = PlanarImage::makeYOnly(16, 16);
  CHECK_THROWS_AS(psnr(img, other), DimensionError);
}

TEST_CASE("psnr strictly decreases as MSE increases") {
  PlanarImage base = PlanarImage::makeYOnly(16, 16, 100);
  double prev = std::numeric_limits<double>::infinity();
  for (int delta = 1; delta <= 32; delta *= 2) {
    PlanarImage moved = base;
    for (auto& v : moved.y)
      v = static_cast<uint8_t>(100 + delta);
    double p = psnr(base, moved);
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("blockiness") {
  SUBCASE("constant image is 0") {
    CHECK(blockiness(PlanarImage::makeYOnly(32, 32, 77)) == 0.0);
  }
  SUBCASE("per-block DC offsets are strictly positive") {
    PlanarImage img = PlanarImage::makeYOnly(64, 64);
    iqntest::TestRng rng(23);
    for (int by = 0; by < 64; by += 8)
      for (int bx = 0; bx < 64; bx += 8) {
        uint8_t level = static_cast<uint8_t>(40 + rng.below(176));
        for (int y = by; y < by + 8; ++y)
          for (int x = bx; x < bx + 8; ++x)
            img.y[static_cast<size_t>(y) * 64 + x] = level;
      }
    CHECK(blockiness(img) > 0.0);
  }
  SUBCASE("smooth horizontal ramp is ~0") {
    PlanarImage img = PlanarImage::makeYOnly(64, 32);
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 64; ++x)
        img.y[static_cast<size_t>(y) * 64 + x] = static_cast<uint8_t>(x * 2);
    CHECK(blockiness(img) <= 1e-6);
  }
  SUBCASE("8-periodic content is invariant to an 8-pixel shift") {
    // Same pixels in both windows, so the metric must match exactly.
    PlanarImage big = PlanarImage::makeYOnly(104, 104);
    iqntest::TestRng rng(29);
    uint8_t tile[8][8];
    for (auto& row : tile)
      for (auto& v : row)
        v = static_cast<uint8_t>(rng.below(256));
    for (int y = 0; y < 104; ++y)
      for (int x = 0; x < 104; ++x)
        big.y[static_cast<size_t>(y) * 104 + x] = tile[y % 8][x % 8];
    auto window = [&](int ox, int oy) {
      PlanarImage wimg = PlanarImage::makeYOnly(64, 64);
      for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x)
          wimg.y[static_cast<size_t>(y) * 64 + x] =
              big.y[static_cast<size_t>(y + oy) * 104 + (x + ox)];
      return wimg;
    };
    CHECK(blockiness(window(0, 0)) == blockiness(window(8, 8)));
  }
  SUBCASE("requires at least 16x16") {
    CHECK_THROWS_AS(blockiness(PlanarImage::makeYOnly(8, 8)), DimensionError);
  }
}

TEST_CASE("pad_plane replicates edges") {
  std::vector<uint8_t> plane = {1, 2, 3, 4, 5, 6};  // 3x2
  int pw = 0, ph = 0;
  auto padded = pad_plane(plane, 3, 2, 4, pw, ph);
  REQUIRE(pw == 4);
  REQUIRE(ph == 4);
  std::vector<uint8_t> expect = {1, 2, 3, 3, 4, 5, 6, 6, 4, 5, 6, 6, 4, 5, 6, 6};
  CHECK(padded == expect);
}

TEST_CASE("PlanarImage validation") {
  CHECK_THROWS_AS(PlanarImage::makeC420(15, 16), DimensionError);
  PlanarImage bad = PlanarImage::makeYOnly(4, 4);
  bad.y.pop_back();
  CHECK_THROWS_AS(bad.validate(), DimensionError);
  PlanarImage stray = PlanarImage::makeYOnly(4, 4);
  stray.cb.resize(4);
  CHECK_THROWS_AS(stray.validate(), DimensionError);
}
