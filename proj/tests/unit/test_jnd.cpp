#include <doctest.h>

#include <cmath>

#include "core/image.hpp"
#include "core/jnd.hpp"
#include "support/corpus.hpp"

using namespace iqn;

TEST_CASE("default weight matrix bands") {
  DctWeightMatrix m = DctWeightMatrix::defaults();
  m.validate();
  CHECK(m.w[0] == 0.0);
  CHECK(m.w[1] == 0.5);          // band 1
  CHECK(m.w[2 * 8 + 0] == 0.5);  // band 2
  CHECK(m.w[1 * 8 + 2] == 1.0);  // band 3
  CHECK(m.w[3 * 8 + 4] == 1.0);  // band 7
  CHECK(m.w[4 * 8 + 4] == 1.5);  // band 8
  CHECK(m.w[7 * 8 + 7] == 1.5);  // band 14
}

TEST_CASE("weight matrix validation") {
  DctWeightMatrix m = DctWeightMatrix::defaults();
  m.w[0] = 0.1;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = DctWeightMatrix::defaults();
  m.w[7 * 8 + 7] = 0.9;  // high band below the mid band
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = DctWeightMatrix::defaults();
  m.w[1] = -0.5;
  CHECK_THROWS_AS(m.validate(), ConfigError);
}

TEST_CASE("base JND threshold formula") {
  BaseJndModel model;  // c0=4, gamma=1, kappa=2
  double block[64];
  SUBCASE("flat mid-gray block") {
    for (auto& v : block)
      v = 128.0;
    CHECK(base_jnd(block, model) == doctest::Approx(4.0).epsilon(1e-12));
  }
  SUBCASE("flat white block") {
    for (auto& v : block)
      v = 255.0;
    CHECK(base_jnd(block, model) == doctest::Approx(7.96875).epsilon(1e-12));
  }
  SUBCASE("checkerboard block") {
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x)
        block[y * 8 + x] = ((x + y) & 1) ? 255.0 : 0.0;
    // mean 127.5, population stddev 127.5; plugging into the stated formula:
    double expect = 4.0 * (1.0 + 0.5 / 128.0) * (1.0 + 2.0 * 127.5 / 128.0);
    CHECK(expect == doctest::Approx(12.0155029296875).epsilon(1e-12));
    CHECK(base_jnd(block, model) == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("always positive on random blocks") {
    iqntest::TestRng rng(3);
    for (int t = 0; t < 100; ++t) {
      for (auto& v : block)
        v = static_cast<double>(rng.below(256));
      CHECK(base_jnd(block, model) > 0.0);
    }
  }
}

TEST_CASE("jnd_thresholds") {
  DctWeightMatrix w = DctWeightMatrix::defaults();
  SUBCASE("alpha 0 zeroes the matrix") {
    auto t = jnd_thresholds(4.0, w, 0.0);
    for (double v : t)
      CHECK(v == 0.0);
  }
  SUBCASE("unit AC weights scale to E*alpha") {
    DctWeightMatrix ones;
    for (auto& v : ones.w)
      v = 1.0;
    ones.w[0] = 0.0;
    auto t = jnd_thresholds(4.0, ones, 0.5);
    CHECK(t[0] == 0.0);
    for (int i = 1; i < 64; ++i)
      CHECK(t[i] == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("elementwise product against the default matrix") {
    auto t = jnd_thresholds(4.0, w, 1.0);
    for (int i = 0; i < 64; ++i)
      CHECK(t[i] == doctest::Approx(4.0 * w.w[i]).epsilon(1e-12));
    CHECK(t[0] == 0.0);
  }
}

TEST_CASE("shrink_block") {
  std::array<double, 64> t{};
  double coeffs[64] = {0};
  SUBCASE("zero thresholds are the identity") {
    iqntest::TestRng rng(4);
    double orig[64];
    for (int i = 0; i < 64; ++i)
      orig[i] = coeffs[i] = rng.uniform(-100, 100);
    shrink_block(coeffs, t);
    for (int i = 0; i < 64; ++i)
      CHECK(coeffs[i] == orig[i]);
  }
  SUBCASE("definition cases") {
    coeffs[1] = 10.0;
    coeffs[2] = -2.0;
    t.fill(3.0);
    shrink_block(coeffs, t);
    CHECK(coeffs[1] == doctest::Approx(7.0));
    CHECK(coeffs[2] == 0.0);
  }
  SUBCASE("random blocks match the per-element oracle") {
    iqntest::TestRng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      double in[64];
      std::array<double, 64> thr{};
      for (int i = 0; i < 64; ++i) {
        in[i] = coeffs[i] = rng.uniform(-200, 200);
        thr[i] = rng.uniform(0, 30);
      }
      shrink_block(coeffs, thr);
      for (int i = 0; i < 64; ++i) {
        double want = std::abs(in[i]) > thr[i]
                          ? (in[i] > 0 ? in[i] - thr[i] : in[i] + thr[i])
                          : 0.0;
        REQUIRE(coeffs[i] == doctest::Approx(want).epsilon(1e-12));
      }
    }
  }
}

namespace {

JndConfig plain_config(double alpha) {
  JndConfig cfg;
  cfg.alpha = alpha;
  cfg.overlap = false;
  cfg.edgePreserve = false;
  return cfg;
}

}  // namespace

TEST_CASE("inject_jnd identity cases") {
  PlanarImage img = iqntest::synth_image(6, 72, 48, true);
  SUBCASE("alpha 0 is bit-exact") {
    CHECK(inject_jnd(img, plain_config(0.0)) == img);
  }
  SUBCASE("constant images are untouched at any alpha") {
    PlanarImage flat = PlanarImage::makeC420(32, 32, 200, 100);
    CHECK(inject_jnd(flat, plain_config(1.0)) == flat);
  }
}

TEST_CASE("inject_jnd chroma passes through bit-exactly") {
  PlanarImage img = iqntest::synth_image(7, 64, 64, true);
  PlanarImage out = inject_jnd(img, plain_config(1.0));
  CHECK(out.cb == img.cb);
  CHECK(out.cr == img.cr);
  CHECK(out.y != img.y);  // filtering visibly does something on texture
}

TEST_CASE("inject_jnd MAE is monotone in alpha on the corpus") {
  auto corpus = iqntest::corpus20();
  for (const auto& img : corpus) {
    double m03 = mae_luma(img, inject_jnd(img, plain_config(0.3)));
    double m06 = mae_luma(img, inject_jnd(img, plain_config(0.6)));
    CHECK(m06 + 0.01 >= m03);
  }
}

TEST_CASE("per-block means survive injection within rounding") {
  PlanarImage img = iqntest::synth_image(8, 64, 64);
  PlanarImage out = inject_jnd(img, plain_config(1.0));
  for (int by = 0; by < 64; by += 8) {
    for (int bx = 0; bx < 64; bx += 8) {
      double inMean = 0, outMean = 0;
      for (int y = by; y < by + 8; ++y)
        for (int x = bx; x < bx + 8; ++x) {
          inMean += img.y[static_cast<size_t>(y) * 64 + x];
          outMean += out.y[static_cast<size_t>(y) * 64 + x];
        }
      REQUIRE(std::abs(inMean - outMean) / 64.0 <= 0.5);
    }
  }
}

TEST_CASE("inject_with_overlap") {
  PlanarImage img = iqntest::synth_image(9, 96, 64, true);
  SUBCASE("alpha 0 and constants are identities") {
    JndConfig cfg = plain_config(0.0);
    cfg.overlap = true;
    CHECK(inject_with_overlap(img, cfg) == img);
    PlanarImage flat = PlanarImage::makeC420(32, 32, 150);
    JndConfig one = plain_config(1.0);
    one.overlap = true;
    CHECK(inject_with_overlap(flat, one) == flat);
  }
  SUBCASE("border frame equals the plain injection") {
    JndConfig cfg = plain_config(1.0);
    PlanarImage plain = inject_jnd(img, cfg);
    PlanarImage over = inject_with_overlap(img, cfg);
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x)
        if (x < 4 || y < 4 || x >= img.width - 4 || y >= img.height - 4)
          REQUIRE(over.y[static_cast<size_t>(y) * img.width + x] ==
                  plain.y[static_cast<size_t>(y) * img.width + x]);
  }
  SUBCASE("requires at least 16x16") {
    PlanarImage tiny = PlanarImage::makeYOnly(8, 8, 10);
    CHECK_THROWS_AS(inject_with_overlap(tiny, plain_config(1.0)), DimensionError);
  }
  SUBCASE("reduces blockiness on most textured images") {
    auto corpus = iqntest::corpus20();
    int better = 0, total = 0;
    JndConfig cfg = plain_config(1.0);
    for (size_t i = 0; i < 8; ++i) {
      double without = blockiness(inject_jnd(corpus[i], cfg));
      double with = blockiness(inject_with_overlap(corpus[i], cfg));
      better += with <= without;
      ++total;
    }
    CHECK(better * 10 >= total * 9);
  }
}

TEST_CASE("prefilter composition") {
  PlanarImage img = iqntest::synth_image(10, 96, 96, true);
  SUBCASE("all enhancements off at alpha 0 is the identity") {
    JndConfig cfg = plain_config(0.0);
    CHECK(prefilter(img, cfg) == img);
  }
  SUBCASE("edge preservation restores exactly the minor-mask pixels") {
    JndConfig cfg;
    cfg.alpha = 1.0;
    cfg.edgePreserve = false;
    PlanarImage filtered = prefilter(img, cfg);
    cfg.edgePreserve = true;
    PlanarImage preserved = prefilter(img, cfg);
    EdgeMask minor = minor_edge_mask(canny(img, cfg.cannyMain), canny(img, cfg.cannyDetail),
                                     cfg.dilate);
    CHECK(minor.count() > 0);
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) {
        size_t i = static_cast<size_t>(y) * img.width + x;
        REQUIRE(preserved.y[i] == (minor.at(x, y) ? img.y[i] : filtered.y[i]));
      }
    CHECK(mae_luma(preserved, img) <= mae_luma(filtered, img));
  }
  SUBCASE("deterministic") {
    JndConfig cfg;
    cfg.alpha = 0.7;
    CHECK(prefilter(img, cfg) == prefilter(img, cfg));
  }
  SUBCASE("alpha monotone MAE with edge preservation off") {
    auto corpus = iqntest::corpus20();
    JndConfig cfg;
    cfg.edgePreserve = false;
    for (size_t i = 0; i < 6; ++i) {
      double prev = -1.0;
      for (double a : {0.2, 0.5, 0.8, 1.0}) {
        cfg.alpha = a;
        double m = mae_luma(corpus[i], prefilter(corpus[i], cfg));
        REQUIRE(m + 0.01 >= prev);
        prev = m;
      }
    }
  }
}

TEST_CASE("config validation") {
  JndConfig cfg;
  cfg.alpha = -0.1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = JndConfig{};
  cfg.alphaSet = {0.2, 0.2};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = JndConfig{};
  cfg.dilate = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK(JndConfig::defaultAlphaSet().size() == 10);
}
