#pragma once

#include <cmath>

// Independent textbook oracles used by tests only. These deliberately stay
// on the O(N^4) definitions so they share nothing with the library path.
namespace iqntest {

inline double dct_c(int u) {
  return u == 0 ? 1.0 / std::sqrt(2.0) : 1.0;
}

// F(u,v) = c(u)c(v)/4 * sum_x sum_y (s(y,x)-128) cos((2x+1)u pi/16) cos((2y+1)v pi/16)
inline void naive_dct8(const double spatial[64], double coeffs[64]) {
  constexpr double pi = 3.14159265358979323846;
  for (int u = 0; u < 8; ++u) {
    for (int v = 0; v < 8; ++v) {
      double sum = 0;
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
          sum += (spatial[y * 8 + x] - 128.0) * std::cos((2 * y + 1) * u * pi / 16.0) *
                 std::cos((2 * x + 1) * v * pi / 16.0);
      coeffs[u * 8 + v] = 0.25 * dct_c(u) * dct_c(v) * sum;
    }
  }
}

inline void naive_idct8(const double coeffs[64], double spatial[64]) {
  constexpr double pi = 3.14159265358979323846;
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      double sum = 0;
      for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v)
          sum += dct_c(u) * dct_c(v) * coeffs[u * 8 + v] * std::cos((2 * y + 1) * u * pi / 16.0) *
                 std::cos((2 * x + 1) * v * pi / 16.0);
      spatial[y * 8 + x] = 0.25 * sum + 128.0;
    }
  }
}

}  // namespace iqntest
