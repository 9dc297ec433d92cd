#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/image.hpp"

namespace iqn {

// Residual pixel-attention prefiltering network:
//   f = relu(conv5x5 1->C)
//   g = f * sigmoid(conv1x1 C->C)      (pixel attention)
//   h = relu(conv3x3 C->C)
//   y = clamp(x + conv3x3 C->1, 0, 1)
// All convolutions use edge-replicated padding, so output dims equal input
// dims. At C=16 this is 3,153 parameters and 3,104 MACs per pixel.
struct ParamLayout {
  int channels = 0;
  size_t conv1W = 0, conv1B = 0;
  size_t paW = 0, paB = 0;
  size_t conv2W = 0, conv2B = 0;
  size_t conv3W = 0, conv3B = 0;
  size_t total = 0;
};

ParamLayout param_layout(int channels);
size_t parameter_count(int channels);
size_t macs_per_pixel(int channels);

struct IqnetModel {
  int channels = 16;
  std::vector<double> params;  // flat, per param_layout

  static IqnetModel zeros(int channels);
  ParamLayout layout() const { return param_layout(channels); }
};

// Plain inference on a luma plane scaled to [0,1].
std::vector<double> forward(const IqnetModel& m, const std::vector<double>& x, int w, int h);

// out = features * sigmoid(1x1 conv of features); `features` holds `channels`
// planes of n pixels each.
void pixel_attention(const double* features, int channels, size_t n, const double* w,
                     const double* b, double* out);

// Activations retained for backpropagation.
struct ForwardCache {
  int w = 0, h = 0;
  std::vector<double> xPad;   // input, replicate-padded by 2
  std::vector<double> f;      // post-relu conv1 output
  std::vector<double> att;    // sigmoid attention map
  std::vector<double> gPad;   // attended features, padded by 1
  std::vector<double> hPad;   // post-relu conv2 output, padded by 1
  std::vector<double> res;    // conv3 residual
  std::vector<double> y;      // clamp(x + res)
  // scratch reused by backward
  std::vector<double> df, dgPad, dh, dhPad;
};

void forward_cached(const IqnetModel& m, const double* x, int w, int h, ForwardCache& cache);

// Accumulates parameter gradients into `grad` (size layout().total) given
// dL/dy. The clamp passes gradients through inside [0,1] and blocks them
// outside; relu and sigmoid are differentiated exactly.
void backward(const IqnetModel& m, const double* x, const ForwardCache& cache,
              const std::vector<double>& dLdy, double* grad);

// Whole-plane inference on 8-bit luma; chroma passes through untouched.
PlanarImage apply_model(const IqnetModel& m, const PlanarImage& img);

// Versioned binary container; round-trips bit-exactly.
void save_model(const IqnetModel& m, const std::string& path, const std::string& configHash = "");
IqnetModel load_model(const std::string& path, std::string* configHash = nullptr);

}  // namespace iqn
