#pragma once

#include <array>
#include <vector>

#include "core/edges.hpp"
#include "core/image.hpp"

namespace iqn {

// Frequency-adaptive multipliers for the JND threshold. Entries are grouped
// by band index u+v: DC (0), low (1-2), mid (3-7), high (8-14). The DC weight
// is pinned to zero so block means survive filtering, and weights must be
// nondecreasing from band to band.
struct DctWeightMatrix {
  std::array<double, 64> w{};

  static DctWeightMatrix defaults();  // 0 / 0.5 / 1.0 / 1.5 per band group
  void validate() const;

  static int band(int u, int v) { return u + v; }
};

// Per-block threshold scalar: a luminance- plus contrast-masking model in the
// spirit of energy-reduced JND, one magnitude for all AC coefficients before
// DCT weighting.
struct BaseJndModel {
  double c0 = 4.0;     // threshold at flat mid-gray
  double gamma = 1.0;  // luminance masking gain
  double kappa = 2.0;  // contrast masking gain

  void validate() const;
};

struct JndConfig {
  double alpha = 1.0;
  DctWeightMatrix weights = DctWeightMatrix::defaults();
  BaseJndModel base;
  bool overlap = true;
  bool edgePreserve = true;
  CannyParams cannyMain = canny_main_defaults();
  CannyParams cannyDetail = canny_detail_defaults();
  int dilate = 1;
  std::vector<double> alphaSet = defaultAlphaSet();

  static std::vector<double> defaultAlphaSet();  // 0.1, 0.2, ..., 1.0
  void validate() const;
  JndConfig withAlpha(double a) const {
    JndConfig c = *this;
    c.alpha = a;
    return c;
  }
};

// E = c0 * (1 + gamma*|mean-128|/128) * (1 + kappa*stddev/128) over the 64
// spatial samples of one block; always positive.
double base_jnd(const double spatial[64], const BaseJndModel& m);

// T[u][v] = E * alpha * w[u][v], DC forced to zero.
std::array<double, 64> jnd_thresholds(double e, const DctWeightMatrix& w, double alpha);

// Soft shrinkage toward zero: c' = sign(c) * max(|c| - T, 0).
void shrink_block(double coeffs[64], const std::array<double, 64>& thresholds);

// Blockwise DCT-domain JND injection on luma; chroma passes through. alpha=0
// returns the input bit-exactly.
PlanarImage inject_jnd(const PlanarImage& img, const JndConfig& cfg);

// Averages the plain injection with a second injection on the grid shifted by
// (4,4); the 4-pixel border frame keeps the unshifted result.
PlanarImage inject_with_overlap(const PlanarImage& img, const JndConfig& cfg);

// The full prefilter: injection (with overlap when enabled), then minor-edge
// restoration from the original when edge preservation is enabled.
PlanarImage prefilter(const PlanarImage& img, const JndConfig& cfg);

}  // namespace iqn
