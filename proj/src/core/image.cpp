#include "core/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace iqn {

PlanarImage PlanarImage::makeYOnly(int width, int height, uint8_t fill) {
  PlanarImage img;
  img.width = width;
  img.height = height;
  img.subsampling = Subsampling::YOnly;
  img.y.assign(static_cast<size_t>(width) * height, fill);
  return img;
}

PlanarImage PlanarImage::makeC420(int width, int height, uint8_t fill, uint8_t chromaFill) {
  PlanarImage img;
  img.width = width;
  img.height = height;
  img.subsampling = Subsampling::C420;
  img.y.assign(static_cast<size_t>(width) * height, fill);
  img.cb.assign(static_cast<size_t>(width / 2) * (height / 2), chromaFill);
  img.cr = img.cb;
  img.validate();
  return img;
}

void PlanarImage::validate() const {
  if (width <= 0 || height <= 0)
    throw DimensionError("image dimensions must be positive");
  if (y.size() != static_cast<size_t>(width) * height)
    throw DimensionError("luma plane size does not match dimensions");
  if (subsampling == Subsampling::C420) {
    if (width % 2 != 0 || height % 2 != 0)
      throw DimensionError("4:2:0 images require even dimensions");
    size_t c = static_cast<size_t>(width / 2) * (height / 2);
    if (cb.size() != c || cr.size() != c)
      throw DimensionError("chroma plane size does not match 4:2:0 dimensions");
  } else {
    if (!cb.empty() || !cr.empty())
      throw DimensionError("Y-only image must not carry chroma planes");
  }
}

bool operator==(const PlanarImage& a, const PlanarImage& b) {
  return a.width == b.width && a.height == b.height && a.subsampling == b.subsampling &&
         a.y == b.y && a.cb == b.cb && a.cr == b.cr;
}

PatchGrid PatchGrid::forDims(int width, int height, int patchSize) {
  PatchGrid g;
  g.patchSize = patchSize;
  g.cols = (width + patchSize - 1) / patchSize;
  g.rows = (height + patchSize - 1) / patchSize;
  g.origins.reserve(static_cast<size_t>(g.cols) * g.rows);
  for (int r = 0; r < g.rows; ++r)
    for (int c = 0; c < g.cols; ++c)
      g.origins.emplace_back(c * patchSize, r * patchSize);
  return g;
}

std::vector<uint8_t> pad_plane(const std::vector<uint8_t>& plane, int w, int h,
                               int multiple, int& paddedW, int& paddedH) {
  paddedW = ((w + multiple - 1) / multiple) * multiple;
  paddedH = ((h + multiple - 1) / multiple) * multiple;
  if (paddedW == w && paddedH == h)
    return plane;
  std::vector<uint8_t> out(static_cast<size_t>(paddedW) * paddedH);
  for (int yy = 0; yy < paddedH; ++yy) {
    int sy = std::min(yy, h - 1);
    const uint8_t* src = plane.data() + static_cast<size_t>(sy) * w;
    uint8_t* dst = out.data() + static_cast<size_t>(yy) * paddedW;
    std::memcpy(dst, src, static_cast<size_t>(w));
    std::fill(dst + w, dst + paddedW, src[w - 1]);
  }
  return out;
}

std::vector<LumaPatch> crop_patches(const PlanarImage& img, int patchSize) {
  img.validate();
  if (patchSize <= 0)
    throw DimensionError("patch size must be positive");
  int pw = 0, ph = 0;
  std::vector<uint8_t> padded = pad_plane(img.y, img.width, img.height, patchSize, pw, ph);
  PatchGrid grid = PatchGrid::forDims(img.width, img.height, patchSize);
  std::vector<LumaPatch> patches;
  patches.reserve(grid.origins.size());
  for (auto [ox, oy] : grid.origins) {
    LumaPatch p;
    p.x = ox;
    p.y = oy;
    p.w = patchSize;
    p.h = patchSize;
    p.pixels.resize(static_cast<size_t>(patchSize) * patchSize);
    for (int yy = 0; yy < patchSize; ++yy)
      std::memcpy(p.pixels.data() + static_cast<size_t>(yy) * patchSize,
                  padded.data() + static_cast<size_t>(oy + yy) * pw + ox,
                  static_cast<size_t>(patchSize));
    patches.push_back(std::move(p));
  }
  return patches;
}

std::vector<uint8_t> assemble_patches(const std::vector<LumaPatch>& patches, int width, int height) {
  if (patches.empty())
    throw TilingError("no patches to assemble");
  int patchSize = patches.front().w;
  if (patchSize <= 0 || patches.front().h != patchSize)
    throw TilingError("patches must be square");
  int pw = ((width + patchSize - 1) / patchSize) * patchSize;
  int ph = ((height + patchSize - 1) / patchSize) * patchSize;
  std::vector<uint8_t> cover(static_cast<size_t>(pw / patchSize) * (ph / patchSize), 0);
  std::vector<uint8_t> plane(static_cast<size_t>(width) * height, 0);
  for (const auto& p : patches) {
    if (p.w != patchSize || p.h != patchSize)
      throw TilingError("mixed patch sizes");
    if (p.x < 0 || p.y < 0 || p.x % patchSize != 0 || p.y % patchSize != 0 ||
        p.x + patchSize > pw || p.y + patchSize > ph)
      throw TilingError("patch origin outside the padded grid");
    if (p.pixels.size() != static_cast<size_t>(patchSize) * patchSize)
      throw TilingError("patch pixel buffer size mismatch");
    uint8_t& c = cover[static_cast<size_t>(p.y / patchSize) * (pw / patchSize) + p.x / patchSize];
    if (c)
      throw TilingError("overlapping patches");
    c = 1;
    int copyW = std::min(patchSize, width - p.x);
    int copyH = std::min(patchSize, height - p.y);
    for (int yy = 0; yy < copyH; ++yy)
      std::memcpy(plane.data() + static_cast<size_t>(p.y + yy) * width + p.x,
                  p.pixels.data() + static_cast<size_t>(yy) * patchSize,
                  static_cast<size_t>(copyW));
  }
  for (uint8_t c : cover)
    if (!c)
      throw TilingError("gap in patch tiling");
  return plane;
}

double mae(const uint8_t* a, const uint8_t* b, size_t n) {
  if (n == 0)
    throw DimensionError("mae over empty range");
  uint64_t sum = 0;
  for (size_t i = 0; i < n; ++i)
    sum += static_cast<uint64_t>(a[i] > b[i] ? a[i] - b[i] : b[i] - a[i]);
  return static_cast<double>(sum) / static_cast<double>(n);
}

double mae(const LumaPatch& a, const LumaPatch& b) {
  if (a.w != b.w || a.h != b.h)
    throw DimensionError("mae: patch dimensions differ");
  return mae(a.pixels.data(), b.pixels.data(), a.pixels.size());
}

double mae_luma(const PlanarImage& a, const PlanarImage& b) {
  if (!a.sameDims(b))
    throw DimensionError("mae: image dimensions differ");
  return mae(a.y.data(), b.y.data(), a.y.size());
}

double psnr(const PlanarImage& a, const PlanarImage& b) {
  if (!a.sameDims(b))
    throw DimensionError("psnr: image dimensions differ");
  uint64_t sse = 0;
  for (size_t i = 0; i < a.y.size(); ++i) {
    int d = static_cast<int>(a.y[i]) - static_cast<int>(b.y[i]);
    sse += static_cast<uint64_t>(d) * d;
  }
  if (sse == 0)
    return std::numeric_limits<double>::infinity();
  double mse = static_cast<double>(sse) / static_cast<double>(a.y.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double blockiness(const PlanarImage& img, int stride) {
  img.validate();
  if (img.width < 2 * stride || img.height < 2 * stride)
    throw DimensionError("blockiness requires dims of at least twice the stride");
  const uint8_t* p = img.y.data();
  int w = img.width, h = img.height;
  double sumB = 0, sumN = 0;
  size_t nB = 0, nN = 0;
  auto add = [&](int offsetInBlock, double d) {
    // A discontinuity between blocks straddles the last column of one block
    // and the first column of the next.
    if (offsetInBlock == 0 || offsetInBlock == stride - 1) {
      sumB += d;
      ++nB;
    } else {
      sumN += d;
      ++nN;
    }
  };
  for (int yy = 0; yy < h; ++yy) {
    const uint8_t* row = p + static_cast<size_t>(yy) * w;
    for (int x = 1; x + 1 < w; ++x)
      add(x % stride, std::abs(static_cast<int>(row[x - 1]) - 2 * row[x] + row[x + 1]));
  }
  for (int x = 0; x < w; ++x) {
    for (int yy = 1; yy + 1 < h; ++yy) {
      const uint8_t* col = p + static_cast<size_t>(yy) * w + x;
      add(yy % stride, std::abs(static_cast<int>(col[-w]) - 2 * col[0] + col[w]));
    }
  }
  if (nB == 0 || nN == 0)
    return 0.0;
  return std::max(0.0, sumB / static_cast<double>(nB) - sumN / static_cast<double>(nN));
}

}  // namespace iqn
