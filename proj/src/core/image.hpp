#pragma once

#include <cstdint>
#include <vector>

#include "core/errors.hpp"

namespace iqn {

enum class Subsampling { YOnly, C420 };

// Planar 8-bit image. Luma is width*height row-major; for 4:2:0 the chroma
// planes are (width/2)*(height/2) and width/height must be even. Dimensions
// are the true picture dimensions; operations that need 8- or 64-aligned
// grids pad per plane internally and crop back.
struct PlanarImage {
  int width = 0;
  int height = 0;
  Subsampling subsampling = Subsampling::YOnly;
  std::vector<uint8_t> y;
  std::vector<uint8_t> cb;
  std::vector<uint8_t> cr;

  int chromaWidth() const { return subsampling == Subsampling::C420 ? width / 2 : 0; }
  int chromaHeight() const { return subsampling == Subsampling::C420 ? height / 2 : 0; }
  bool hasChroma() const { return subsampling == Subsampling::C420; }

  static PlanarImage makeYOnly(int width, int height, uint8_t fill = 0);
  static PlanarImage makeC420(int width, int height, uint8_t fill = 0, uint8_t chromaFill = 128);

  // Throws DimensionError on inconsistent plane sizes or odd 4:2:0 dims.
  void validate() const;

  bool sameDims(const PlanarImage& o) const { return width == o.width && height == o.height; }
};

bool operator==(const PlanarImage& a, const PlanarImage& b);

// One luma tile plus its origin in the (padded) patch grid.
struct LumaPatch {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  std::vector<uint8_t> pixels;  // row-major w*h
};

// Patch tiling of a padded plane; origins are multiples of patchSize.
struct PatchGrid {
  int patchSize = 64;
  int cols = 0;
  int rows = 0;
  std::vector<std::pair<int, int>> origins;  // row-major order

  static PatchGrid forDims(int width, int height, int patchSize);
};

// Edge-replicated padding of a single plane up to multiples of `multiple`.
std::vector<uint8_t> pad_plane(const std::vector<uint8_t>& plane, int w, int h,
                               int multiple, int& paddedW, int& paddedH);

// Tiles the luma plane into patchSize x patchSize patches, padding by edge
// replication when the dims do not divide. Patch origins refer to the padded
// grid.
std::vector<LumaPatch> crop_patches(const PlanarImage& img, int patchSize);

// Inverse of crop_patches: rebuilds a width*height luma plane. The patches
// must exactly tile the padded grid (no overlaps, no gaps) or TilingError is
// thrown. Patch order is irrelevant.
std::vector<uint8_t> assemble_patches(const std::vector<LumaPatch>& patches, int width, int height);

double mae(const uint8_t* a, const uint8_t* b, size_t n);
double mae(const LumaPatch& a, const LumaPatch& b);
// Luma-plane MAE between two images of equal dimensions.
double mae_luma(const PlanarImage& a, const PlanarImage& b);

// Luma-only PSNR in dB; +infinity when the planes are identical.
double psnr(const PlanarImage& a, const PlanarImage& b);

// Blocking-artifact probe: mean |second difference| at stride-aligned row and
// column boundaries minus the same mean at all other offsets, clamped at 0.
// Stride 8 matches the codec grid; stride 64 probes for patch seams.
double blockiness(const PlanarImage& img, int stride = 8);

}  // namespace iqn
