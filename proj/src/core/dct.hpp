#pragma once

#include <array>
#include <cstdint>

namespace iqn {

// 8x8 orthonormal type-II DCT of mean-centered samples (128 subtracted).
// Layout is row-major: index u*8+v with u the vertical frequency. A constant
// block of value 128+c transforms to DC = 8c with all AC zero, and
// sum(coeffs^2) == sum((sample-128)^2).
using Block8 = std::array<double, 64>;

void forward_dct8(const double spatial[64], double coeffs[64]);
void inverse_dct8(const double coeffs[64], double spatial[64]);

// Gathers an 8x8 block from a plane into doubles.
void gather_block(const uint8_t* plane, int stride, int x0, int y0, double out[64]);

}  // namespace iqn
