#include "core/edges.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace iqn {

size_t EdgeMask::count() const {
  return static_cast<size_t>(std::count(bits.begin(), bits.end(), uint8_t{1}));
}

void CannyParams::validate() const {
  if (sigma <= 0)
    throw ConfigError("canny sigma must be positive");
  if (!(0 < low && low < high))
    throw ConfigError("canny thresholds must satisfy 0 < low < high");
}

CannyParams canny_main_defaults() {
  return CannyParams{1.4, 60.0, 120.0};
}

CannyParams canny_detail_defaults() {
  return CannyParams{1.4, 20.0, 60.0};
}

namespace {

inline int clampi(int v, int lo, int hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

std::vector<double> gaussian_blur5(const std::vector<uint8_t>& in, int w, int h, double sigma) {
  double k[5];
  double sum = 0;
  for (int i = -2; i <= 2; ++i) {
    k[i + 2] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + 2];
  }
  for (double& v : k)
    v /= sum;
  std::vector<double> tmp(in.size()), out(in.size());
  for (int y = 0; y < h; ++y) {
    const uint8_t* row = in.data() + static_cast<size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      double s = 0;
      for (int i = -2; i <= 2; ++i)
        s += k[i + 2] * row[clampi(x + i, 0, w - 1)];
      tmp[static_cast<size_t>(y) * w + x] = s;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0;
      for (int i = -2; i <= 2; ++i)
        s += k[i + 2] * tmp[static_cast<size_t>(clampi(y + i, 0, h - 1)) * w + x];
      out[static_cast<size_t>(y) * w + x] = s;
    }
  }
  return out;
}

void sobel(const std::vector<double>& p, int w, int h, std::vector<double>& gx,
           std::vector<double>& gy) {
  gx.resize(p.size());
  gy.resize(p.size());
  auto at = [&](int x, int y) { return p[static_cast<size_t>(clampi(y, 0, h - 1)) * w + clampi(x, 0, w - 1)]; };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double tl = at(x - 1, y - 1), t = at(x, y - 1), tr = at(x + 1, y - 1);
      double l = at(x - 1, y), r = at(x + 1, y);
      double bl = at(x - 1, y + 1), b = at(x, y + 1), br = at(x + 1, y + 1);
      gx[static_cast<size_t>(y) * w + x] = (tr + 2 * r + br) - (tl + 2 * l + bl);
      gy[static_cast<size_t>(y) * w + x] = (bl + 2 * b + br) - (tl + 2 * t + tr);
    }
  }
}

}  // namespace

std::vector<double> sobel_magnitude(const std::vector<double>& plane, int w, int h) {
  std::vector<double> gx, gy;
  sobel(plane, w, h, gx, gy);
  std::vector<double> mag(plane.size());
  for (size_t i = 0; i < plane.size(); ++i)
    mag[i] = std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]) / 4.0;
  return mag;
}

EdgeMask canny(const std::vector<uint8_t>& luma, int w, int h, const CannyParams& p) {
  p.validate();
  if (w < 8 || h < 8)
    throw DimensionError("canny requires dims of at least 8x8");
  std::vector<double> blurred = gaussian_blur5(luma, w, h, p.sigma);
  std::vector<double> gx, gy;
  sobel(blurred, w, h, gx, gy);
  std::vector<double> mag(blurred.size());
  for (size_t i = 0; i < mag.size(); ++i)
    mag[i] = std::sqrt(gx[i] * gx[i] + gy[i] * gy[i]) / 4.0;

  auto magAt = [&](int x, int y) -> double {
    if (x < 0 || y < 0 || x >= w || y >= h)
      return 0.0;
    return mag[static_cast<size_t>(y) * w + x];
  };

  // 0 = suppressed, 1 = weak, 2 = strong.
  std::vector<uint8_t> map(mag.size(), 0);
  constexpr double pi = 3.14159265358979323846;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      size_t i = static_cast<size_t>(y) * w + x;
      double m = mag[i];
      if (m < p.low)
        continue;
      double angle = std::atan2(gy[i], gx[i]);
      if (angle < 0)
        angle += pi;  // direction is modulo 180 degrees
      int sector = static_cast<int>(std::floor(angle / (pi / 4.0) + 0.5)) & 3;
      int dx = 0, dy = 0;
      switch (sector) {
        case 0: dx = 1; dy = 0; break;    // gradient ~horizontal
        case 1: dx = 1; dy = 1; break;
        case 2: dx = 0; dy = 1; break;    // gradient ~vertical
        case 3: dx = -1; dy = 1; break;
      }
      // >= forward and > backward keeps exactly one pixel of a two-wide
      // plateau straddling a symmetric step.
      if (m >= magAt(x + dx, y + dy) && m > magAt(x - dx, y - dy))
        map[i] = m >= p.high ? 2 : 1;
    }
  }

  EdgeMask mask;
  mask.width = w;
  mask.height = h;
  mask.bits.assign(map.size(), 0);
  std::vector<size_t> stack;
  for (size_t i = 0; i < map.size(); ++i) {
    if (map[i] == 2 && !mask.bits[i]) {
      mask.bits[i] = 1;
      stack.push_back(i);
      while (!stack.empty()) {
        size_t cur = stack.back();
        stack.pop_back();
        int cx = static_cast<int>(cur % w), cy = static_cast<int>(cur / w);
        for (int ny = cy - 1; ny <= cy + 1; ++ny) {
          for (int nx = cx - 1; nx <= cx + 1; ++nx) {
            if (nx < 0 || ny < 0 || nx >= w || ny >= h)
              continue;
            size_t ni = static_cast<size_t>(ny) * w + nx;
            if (map[ni] != 0 && !mask.bits[ni]) {
              mask.bits[ni] = 1;
              stack.push_back(ni);
            }
          }
        }
      }
    }
  }
  return mask;
}

EdgeMask canny(const PlanarImage& img, const CannyParams& p) {
  return canny(img.y, img.width, img.height, p);
}

EdgeMask minor_edge_mask(const EdgeMask& main, const EdgeMask& detail, int dilateRadius) {
  if (main.width != detail.width || main.height != detail.height)
    throw DimensionError("minor_edge_mask: mask dimensions differ");
  if (dilateRadius < 0)
    throw ConfigError("dilation radius must be >= 0");
  int w = main.width, h = main.height;
  EdgeMask diff;
  diff.width = w;
  diff.height = h;
  diff.bits.resize(main.bits.size());
  for (size_t i = 0; i < diff.bits.size(); ++i)
    diff.bits[i] = detail.bits[i] && !main.bits[i] ? 1 : 0;
  if (dilateRadius == 0)
    return diff;
  EdgeMask out = diff;
  int r = dilateRadius;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (out.bits[static_cast<size_t>(y) * w + x])
        continue;
      bool hit = false;
      for (int ny = std::max(0, y - r); !hit && ny <= std::min(h - 1, y + r); ++ny)
        for (int nx = std::max(0, x - r); nx <= std::min(w - 1, x + r); ++nx)
          if (diff.bits[static_cast<size_t>(ny) * w + nx]) {
            hit = true;
            break;
          }
      if (hit)
        out.bits[static_cast<size_t>(y) * w + x] = 1;
    }
  }
  return out;
}

std::vector<uint8_t> preserve_edges(const std::vector<uint8_t>& original,
                                    const std::vector<uint8_t>& filtered,
                                    const EdgeMask& minor) {
  size_t n = static_cast<size_t>(minor.width) * minor.height;
  if (original.size() != n || filtered.size() != n)
    throw DimensionError("preserve_edges: plane dimensions differ from mask");
  std::vector<uint8_t> out(n);
  for (size_t i = 0; i < n; ++i)
    out[i] = minor.bits[i] ? original[i] : filtered[i];
  return out;
}

}  // namespace iqn
