#include "core/dct.hpp"

#include <cmath>

namespace iqn {

namespace {

// basis[u][x] = c(u)/2 * cos((2x+1)u*pi/16), c(0)=1/sqrt(2); rows orthonormal.
struct Basis {
  double b[8][8];
  Basis() {
    constexpr double pi = 3.14159265358979323846;
    for (int u = 0; u < 8; ++u) {
      double c = (u == 0) ? 1.0 / std::sqrt(2.0) : 1.0;
      for (int x = 0; x < 8; ++x)
        b[u][x] = 0.5 * c * std::cos((2 * x + 1) * u * pi / 16.0);
    }
  }
};

const Basis kBasis;

}  // namespace

void forward_dct8(const double spatial[64], double coeffs[64]) {
  const auto& b = kBasis.b;
  double tmp[64];  // rows transformed: tmp[y][v]
  for (int y = 0; y < 8; ++y) {
    for (int v = 0; v < 8; ++v) {
      double s = 0;
      for (int x = 0; x < 8; ++x)
        s += (spatial[y * 8 + x] - 128.0) * b[v][x];
      tmp[y * 8 + v] = s;
    }
  }
  for (int v = 0; v < 8; ++v) {
    for (int u = 0; u < 8; ++u) {
      double s = 0;
      for (int y = 0; y < 8; ++y)
        s += tmp[y * 8 + v] * b[u][y];
      coeffs[u * 8 + v] = s;
    }
  }
}

void inverse_dct8(const double coeffs[64], double spatial[64]) {
  const auto& b = kBasis.b;
  double tmp[64];  // columns inverted: tmp[y][v]
  for (int v = 0; v < 8; ++v) {
    for (int y = 0; y < 8; ++y) {
      double s = 0;
      for (int u = 0; u < 8; ++u)
        s += coeffs[u * 8 + v] * b[u][y];
      tmp[y * 8 + v] = s;
    }
  }
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      double s = 0;
      for (int v = 0; v < 8; ++v)
        s += tmp[y * 8 + v] * b[v][x];
      spatial[y * 8 + x] = s + 128.0;
    }
  }
}

void gather_block(const uint8_t* plane, int stride, int x0, int y0, double out[64]) {
  for (int yy = 0; yy < 8; ++yy) {
    const uint8_t* row = plane + static_cast<size_t>(y0 + yy) * stride + x0;
    for (int xx = 0; xx < 8; ++xx)
      out[yy * 8 + xx] = static_cast<double>(row[xx]);
  }
}

}  // namespace iqn
