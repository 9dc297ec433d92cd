#pragma once

#include <cstdint>
#include <vector>

#include "core/model.hpp"

namespace iqn {

enum class LossKind { Mse, L1 };

struct TrainConfig {
  int batchSize = 128;
  int patchSize = 64;
  int epochs = 2500;
  int stepsPerEpoch = 1;  // an "epoch" is stepsPerEpoch optimizer steps
  double lr0 = 1e-3;
  int lrHalveEveryEpochs = 250;
  double adamBeta1 = 0.9;
  double adamBeta2 = 0.999;
  double adamEps = 1e-8;
  uint64_t seed = 1;
  LossKind loss = LossKind::Mse;
  int channels = 16;
  int threads = 1;  // intra-batch fan-out; reduction order is fixed regardless

  void validate() const;
  int totalSteps() const { return epochs * stepsPerEpoch; }
  double lrAtStep(int step) const;  // lr0 * 0.5^floor(epoch/halveEvery)
};

// One supervised pair: the source image and its JND training target.
struct TrainPair {
  PlanarImage original;
  PlanarImage target;
};

struct TrainSample {
  const double* input = nullptr;   // patchSize^2 doubles in [0,1]
  const double* target = nullptr;
};

// Mean loss over the batch plus parameter gradients (`grad` is overwritten,
// size layout.total). Deterministic: items are reduced in index order.
double loss_and_gradients(const IqnetModel& m, const std::vector<TrainSample>& batch,
                          int patchSize, LossKind kind, std::vector<double>& grad,
                          int threads = 1);

// Deterministic fan-in-scaled uniform init; biases start at zero.
IqnetModel init_model(int channels, uint64_t seed);

struct TrainLogEntry {
  int step = 0;
  double lr = 0.0;
  double loss = 0.0;
};

// Adam over random 64x64 crops of the dataset. Bit-deterministic for a fixed
// seed and config. When lossTarget > 0, stops early once the running loss
// drops to lossTarget * initialLoss.
IqnetModel train(const std::vector<TrainPair>& dataset, const TrainConfig& cfg,
                 std::vector<TrainLogEntry>* log = nullptr, double lossTarget = 0.0);

}  // namespace iqn
