#include "core/jnd.hpp"

#include <algorithm>
#include <cmath>

#include "core/dct.hpp"

namespace iqn {

DctWeightMatrix DctWeightMatrix::defaults() {
  DctWeightMatrix m;
  for (int u = 0; u < 8; ++u) {
    for (int v = 0; v < 8; ++v) {
      int b = band(u, v);
      double w = 0.0;
      if (b >= 1 && b <= 2)
        w = 0.5;
      else if (b >= 3 && b <= 7)
        w = 1.0;
      else if (b >= 8)
        w = 1.5;
      m.w[u * 8 + v] = w;
    }
  }
  return m;
}

void DctWeightMatrix::validate() const {
  if (w[0] != 0.0)
    throw ConfigError("DCT weight matrix must have w[0][0] == 0 (DC preserved)");
  double bandMax[15], bandMin[15];
  std::fill_n(bandMax, 15, -1.0);
  std::fill_n(bandMin, 15, 1e300);
  for (int u = 0; u < 8; ++u) {
    for (int v = 0; v < 8; ++v) {
      double x = w[u * 8 + v];
      if (x < 0)
        throw ConfigError("DCT weights must be nonnegative");
      int b = band(u, v);
      bandMax[b] = std::max(bandMax[b], x);
      bandMin[b] = std::min(bandMin[b], x);
    }
  }
  for (int b = 0; b + 1 < 15; ++b)
    if (bandMax[b] > bandMin[b + 1])
      throw ConfigError("DCT weights must be nondecreasing in band index u+v");
}

void BaseJndModel::validate() const {
  if (c0 <= 0 || gamma < 0 || kappa < 0)
    throw ConfigError("base JND model requires c0 > 0, gamma >= 0, kappa >= 0");
}

std::vector<double> JndConfig::defaultAlphaSet() {
  std::vector<double> a;
  for (int i = 1; i <= 10; ++i)
    a.push_back(i / 10.0);
  return a;
}

void JndConfig::validate() const {
  if (alpha < 0)
    throw ConfigError("alpha must be >= 0");
  weights.validate();
  base.validate();
  cannyMain.validate();
  cannyDetail.validate();
  if (dilate < 0)
    throw ConfigError("dilate must be >= 0");
  if (alphaSet.empty())
    throw ConfigError("alpha set must not be empty");
  for (size_t i = 0; i < alphaSet.size(); ++i) {
    if (alphaSet[i] < 0)
      throw ConfigError("alpha set values must be >= 0");
    if (i > 0 && alphaSet[i] <= alphaSet[i - 1])
      throw ConfigError("alpha set must be strictly increasing");
  }
}

double base_jnd(const double spatial[64], const BaseJndModel& m) {
  double sum = 0;
  for (int i = 0; i < 64; ++i)
    sum += spatial[i];
  double mean = sum / 64.0;
  double var = 0;
  for (int i = 0; i < 64; ++i) {
    double d = spatial[i] - mean;
    var += d * d;
  }
  double sd = std::sqrt(var / 64.0);
  return m.c0 * (1.0 + m.gamma * std::abs(mean - 128.0) / 128.0) * (1.0 + m.kappa * sd / 128.0);
}

std::array<double, 64> jnd_thresholds(double e, const DctWeightMatrix& w, double alpha) {
  std::array<double, 64> t;
  for (int i = 0; i < 64; ++i)
    t[i] = e * alpha * w.w[i];
  t[0] = 0.0;
  return t;
}

void shrink_block(double coeffs[64], const std::array<double, 64>& thresholds) {
  for (int i = 0; i < 64; ++i) {
    double mag = std::abs(coeffs[i]) - thresholds[i];
    coeffs[i] = mag > 0 ? std::copysign(mag, coeffs[i]) : 0.0;
  }
}

namespace {

std::vector<uint8_t> inject_plane(const std::vector<uint8_t>& plane, int w, int h,
                                  const JndConfig& cfg) {
  int pw = 0, ph = 0;
  std::vector<uint8_t> padded = pad_plane(plane, w, h, 8, pw, ph);
  std::vector<uint8_t> out(padded.size());
  double block[64];
  for (int by = 0; by < ph; by += 8) {
    for (int bx = 0; bx < pw; bx += 8) {
      gather_block(padded.data(), pw, bx, by, block);
      double e = base_jnd(block, cfg.base);
      std::array<double, 64> t = jnd_thresholds(e, cfg.weights, cfg.alpha);
      double coeffs[64];
      forward_dct8(block, coeffs);
      shrink_block(coeffs, t);
      inverse_dct8(coeffs, block);
      for (int yy = 0; yy < 8; ++yy) {
        uint8_t* dst = out.data() + static_cast<size_t>(by + yy) * pw + bx;
        for (int xx = 0; xx < 8; ++xx) {
          double v = std::round(block[yy * 8 + xx]);
          dst[xx] = static_cast<uint8_t>(std::clamp(v, 0.0, 255.0));
        }
      }
    }
  }
  if (pw == w && ph == h)
    return out;
  std::vector<uint8_t> cropped(static_cast<size_t>(w) * h);
  for (int yy = 0; yy < h; ++yy)
    std::copy_n(out.data() + static_cast<size_t>(yy) * pw, w,
                cropped.data() + static_cast<size_t>(yy) * w);
  return cropped;
}

}  // namespace

PlanarImage inject_jnd(const PlanarImage& img, const JndConfig& cfg) {
  cfg.validate();
  img.validate();
  if (cfg.alpha == 0.0)
    return img;
  PlanarImage out = img;
  out.y = inject_plane(img.y, img.width, img.height, cfg);
  return out;
}

PlanarImage inject_with_overlap(const PlanarImage& img, const JndConfig& cfg) {
  cfg.validate();
  img.validate();
  if (img.width < 16 || img.height < 16)
    throw DimensionError("overlap injection requires dims of at least 16x16");
  if (cfg.alpha == 0.0)
    return img;
  PlanarImage a = inject_jnd(img, cfg);
  // Inner region [4, W-4) x [4, H-4), filtered on its own 8x8 grid.
  int iw = img.width - 8, ih = img.height - 8;
  std::vector<uint8_t> inner(static_cast<size_t>(iw) * ih);
  for (int yy = 0; yy < ih; ++yy)
    std::copy_n(img.y.data() + static_cast<size_t>(yy + 4) * img.width + 4, iw,
                inner.data() + static_cast<size_t>(yy) * iw);
  std::vector<uint8_t> b = inject_plane(inner, iw, ih, cfg);
  for (int yy = 0; yy < ih; ++yy) {
    uint8_t* dst = a.y.data() + static_cast<size_t>(yy + 4) * img.width + 4;
    const uint8_t* src = b.data() + static_cast<size_t>(yy) * iw;
    for (int xx = 0; xx < iw; ++xx) {
      int sum = static_cast<int>(dst[xx]) + src[xx];
      dst[xx] = static_cast<uint8_t>((sum + 1) / 2);  // round half away from zero
    }
  }
  return a;
}

PlanarImage prefilter(const PlanarImage& img, const JndConfig& cfg) {
  cfg.validate();
  PlanarImage filtered = cfg.overlap && img.width >= 16 && img.height >= 16
                             ? inject_with_overlap(img, cfg)
                             : inject_jnd(img, cfg);
  if (!cfg.edgePreserve)
    return filtered;
  EdgeMask mainMask = canny(img, cfg.cannyMain);
  EdgeMask detailMask = canny(img, cfg.cannyDetail);
  EdgeMask minor = minor_edge_mask(mainMask, detailMask, cfg.dilate);
  filtered.y = preserve_edges(img.y, filtered.y, minor);
  return filtered;
}

}  // namespace iqn
