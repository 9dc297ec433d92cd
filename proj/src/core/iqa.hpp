#pragma once

#include <map>
#include <memory>
#include <string>
#include <tuple>

#include "core/image.hpp"

namespace iqn {

// Canonical candidate tag for a scale factor: "alpha-0.1", ..., "alpha-1.0".
// %.6g formatting absorbs float fuzz so 0.30000000000000004 and 0.3 share a
// tag; integral values keep one decimal ("1.0").
std::string alpha_tag(double alpha);
constexpr const char* kOrigRecTag = "orig-rec";

// Deterministic no-reference quality proxy on a luma patch, range [0, 10).
// Not a perceptual-fidelity claim; it exists so the selection loop has a
// monotone, reproducible stand-in for an external IQA model:
//
//   mag   = normalized Sobel magnitude per pixel
//   d     = mean |second difference| per pixel (both axes)
//   ring  = mean max(0, d - 2*mag - 8)  second differences not explained by
//                                       a local edge: ringing, checkerboards
//   block = excess |second difference| at 8x8-grid straddle offsets vs the
//           rest (codec seams fire it, natural content does not)
//   s     = max(0, mean(mag) - 2*ring - block) / 32
//   score = 10 * s / (s + 1)
//
// Blur and visible quantization noise drive the score down; horizontal and
// vertical flips leave it unchanged on 8-aligned patch sizes.
double proxy_score(const std::vector<uint8_t>& patch, int w, int h);
double proxy_score(const LumaPatch& patch);

struct ScoreKey {
  std::string imageId;
  int x = 0;
  int y = 0;
  std::string candidate;

  auto tie() const { return std::tie(imageId, x, y, candidate); }
  bool operator<(const ScoreKey& o) const { return tie() < o.tie(); }
};

// Externally computed scores, CSV header: image_id,patch_x,patch_y,candidate,score
struct ScoreTable {
  std::map<ScoreKey, double> values;
  int duplicateCount = 0;  // rows overwritten during load (last wins)

  bool contains(const ScoreKey& k) const { return values.count(k) != 0; }
  double at(const ScoreKey& k) const;  // throws MissingScoreError
};

ScoreTable file_scores(const std::string& path);

// Score provider used by dataset generation: the proxy computes, the file
// provider looks up.
class IqaProvider {
public:
  virtual ~IqaProvider() = default;
  virtual double score(const std::string& imageId, int px, int py, const std::string& candidate,
                       const LumaPatch& patch) const = 0;
};

std::unique_ptr<IqaProvider> make_proxy_provider();
std::unique_ptr<IqaProvider> make_file_provider(ScoreTable table);

}  // namespace iqn
