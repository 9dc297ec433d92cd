#pragma once

#include <cstdint>
#include <vector>

#include "core/image.hpp"

namespace iqn {

struct EdgeMask {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> bits;  // 1 = edge

  size_t count() const;
  bool at(int x, int y) const { return bits[static_cast<size_t>(y) * width + x] != 0; }
};

struct CannyParams {
  double sigma = 1.4;    // Gaussian blur, 5x5 kernel
  double low = 20.0;     // hysteresis thresholds on the normalized Sobel
  double high = 60.0;    // magnitude (a full-range step edge reads 255)

  void validate() const;
};

// Reference detector pair: "main" keeps strong contours, "detail" also fires
// on fine texture.
CannyParams canny_main_defaults();    // low 60, high 120
CannyParams canny_detail_defaults();  // low 20, high 60

// Gaussian blur (5x5, replicated borders), Sobel 3x3, non-maximum suppression
// over 4 quantized directions, hysteresis with 8-connectivity.
EdgeMask canny(const std::vector<uint8_t>& luma, int w, int h, const CannyParams& p);
EdgeMask canny(const PlanarImage& img, const CannyParams& p);

// detail AND NOT main, dilated by a square structuring element of the given
// radius (0 disables, 1 = 3x3).
EdgeMask minor_edge_mask(const EdgeMask& main, const EdgeMask& detail, int dilateRadius = 1);

// out[p] = original[p] where mask is set, else filtered[p].
std::vector<uint8_t> preserve_edges(const std::vector<uint8_t>& original,
                                    const std::vector<uint8_t>& filtered,
                                    const EdgeMask& minor);

// Sobel gradient magnitude scaled by 1/4 so that a full-range vertical or
// horizontal step edge reads 255. Shared by canny and the IQA proxy.
std::vector<double> sobel_magnitude(const std::vector<double>& plane, int w, int h);

}  // namespace iqn
