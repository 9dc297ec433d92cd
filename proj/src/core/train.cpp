#include "core/train.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace iqn {

namespace {

// mt19937_64 with an explicit 53-bit mapping so draws are identical across
// standard libraries.
class Rng {
public:
  explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  uint64_t next() {
    // xorshift64* is compact and has no library-dependent behavior
    uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545f4914f6cdd1dull;
  }

  double nextUnit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double nextUniform(double lo, double hi) { return lo + (hi - lo) * nextUnit(); }

  uint64_t nextBelow(uint64_t n) { return next() % n; }

private:
  uint64_t state_;
};

}  // namespace

void TrainConfig::validate() const {
  if (batchSize <= 0 || patchSize <= 0 || epochs <= 0 || stepsPerEpoch <= 0)
    throw ConfigError("batch size, patch size, epochs and steps-per-epoch must be positive");
  if (lr0 <= 0 || lrHalveEveryEpochs <= 0)
    throw ConfigError("learning rate and halving interval must be positive");
  if (!(adamBeta1 > 0 && adamBeta1 < 1 && adamBeta2 > 0 && adamBeta2 < 1 && adamEps > 0))
    throw ConfigError("Adam parameters out of range");
  if (channels <= 0)
    throw ConfigError("channel count must be positive");
  if (threads < 0)
    throw ConfigError("thread count must be >= 0");
}

double TrainConfig::lrAtStep(int step) const {
  int epoch = step / stepsPerEpoch;
  return lr0 * std::pow(0.5, epoch / lrHalveEveryEpochs);
}

IqnetModel init_model(int channels, uint64_t seed) {
  IqnetModel m = IqnetModel::zeros(channels);
  ParamLayout l = m.layout();
  Rng rng(seed);
  auto initRange = [&](size_t from, size_t count, double fanIn) {
    double b = std::sqrt(1.0 / fanIn);
    for (size_t i = 0; i < count; ++i)
      m.params[from + i] = rng.nextUniform(-b, b);
  };
  size_t c = static_cast<size_t>(channels);
  initRange(l.conv1W, 25 * c, 25.0);
  initRange(l.paW, c * c, static_cast<double>(c));
  initRange(l.conv2W, 9 * c * c, 9.0 * c);
  initRange(l.conv3W, 9 * c, 9.0 * c);
  // biases stay zero
  return m;
}

namespace {

struct ItemResult {
  double loss = 0.0;
  std::vector<double> grad;
};

void compute_item(const IqnetModel& m, const TrainSample& s, int patchSize, LossKind kind,
                  ForwardCache& cache, ItemResult& out) {
  size_t n = static_cast<size_t>(patchSize) * patchSize;
  forward_cached(m, s.input, patchSize, patchSize, cache);
  std::vector<double> dLdy(n);
  double loss = 0.0;
  double invN = 1.0 / static_cast<double>(n);
  if (kind == LossKind::Mse) {
    for (size_t i = 0; i < n; ++i) {
      double d = cache.y[i] - s.target[i];
      loss += d * d;
      dLdy[i] = 2.0 * d * invN;
    }
  } else {
    for (size_t i = 0; i < n; ++i) {
      double d = cache.y[i] - s.target[i];
      loss += std::abs(d);
      dLdy[i] = (d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0)) * invN;
    }
  }
  out.loss = loss * invN;
  std::fill(out.grad.begin(), out.grad.end(), 0.0);
  backward(m, s.input, cache, dLdy, out.grad.data());
}

}  // namespace

double loss_and_gradients(const IqnetModel& m, const std::vector<TrainSample>& batch,
                          int patchSize, LossKind kind, std::vector<double>& grad, int threads) {
  if (batch.empty())
    throw ConfigError("empty training batch");
  size_t nParams = m.layout().total;
  grad.assign(nParams, 0.0);

  std::vector<ItemResult> results(batch.size());
  for (auto& r : results)
    r.grad.resize(nParams);

  int nThreads = threads <= 0 ? static_cast<int>(std::thread::hardware_concurrency()) : threads;
  nThreads = std::max(1, std::min<int>(nThreads, static_cast<int>(batch.size())));
  if (nThreads == 1) {
    ForwardCache cache;
    for (size_t i = 0; i < batch.size(); ++i)
      compute_item(m, batch[i], patchSize, kind, cache, results[i]);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nThreads);
    for (int t = 0; t < nThreads; ++t) {
      pool.emplace_back([&, t]() {
        ForwardCache cache;
        for (size_t i = t; i < batch.size(); i += nThreads)
          compute_item(m, batch[i], patchSize, kind, cache, results[i]);
      });
    }
    for (auto& th : pool)
      th.join();
  }

  // Fixed-order reduction keeps results bit-identical for any thread count.
  double loss = 0.0;
  double invB = 1.0 / static_cast<double>(batch.size());
  for (const auto& r : results) {
    loss += r.loss;
    for (size_t i = 0; i < nParams; ++i)
      grad[i] += r.grad[i];
  }
  for (size_t i = 0; i < nParams; ++i)
    grad[i] *= invB;
  return loss * invB;
}

IqnetModel train(const std::vector<TrainPair>& dataset, const TrainConfig& cfg,
                 std::vector<TrainLogEntry>* log, double lossTarget) {
  cfg.validate();
  if (dataset.empty())
    throw ConfigError("training dataset is empty");

  struct Plane {
    int w = 0, h = 0;
    std::vector<double> input, target;
  };
  std::vector<Plane> planes;
  planes.reserve(dataset.size());
  for (const auto& pair : dataset) {
    pair.original.validate();
    pair.target.validate();
    if (!pair.original.sameDims(pair.target))
      throw DimensionError("training pair dimensions differ");
    if (pair.original.width < cfg.patchSize || pair.original.height < cfg.patchSize)
      throw ConfigError("dataset image smaller than the training patch");
    Plane p;
    p.w = pair.original.width;
    p.h = pair.original.height;
    p.input.resize(pair.original.y.size());
    p.target.resize(p.input.size());
    for (size_t i = 0; i < p.input.size(); ++i) {
      p.input[i] = pair.original.y[i] / 255.0;
      p.target[i] = pair.target.y[i] / 255.0;
    }
    planes.push_back(std::move(p));
  }

  IqnetModel model = init_model(cfg.channels, cfg.seed);
  size_t nParams = model.layout().total;
  std::vector<double> grad(nParams), adamM(nParams, 0.0), adamV(nParams, 0.0);

  Rng rng(cfg.seed ^ 0xda3e39cb94b95bdbull);
  size_t patchPixels = static_cast<size_t>(cfg.patchSize) * cfg.patchSize;
  std::vector<double> inputs(static_cast<size_t>(cfg.batchSize) * patchPixels);
  std::vector<double> targets(inputs.size());
  std::vector<TrainSample> batch(cfg.batchSize);

  double initialLoss = -1.0;
  double beta1T = 1.0, beta2T = 1.0;
  int totalSteps = cfg.totalSteps();
  for (int step = 0; step < totalSteps; ++step) {
    for (int bIdx = 0; bIdx < cfg.batchSize; ++bIdx) {
      const Plane& p = planes[rng.nextBelow(planes.size())];
      int maxX = p.w - cfg.patchSize;
      int maxY = p.h - cfg.patchSize;
      int ox = maxX ? static_cast<int>(rng.nextBelow(static_cast<uint64_t>(maxX) + 1)) : 0;
      int oy = maxY ? static_cast<int>(rng.nextBelow(static_cast<uint64_t>(maxY) + 1)) : 0;
      double* in = inputs.data() + bIdx * patchPixels;
      double* tg = targets.data() + bIdx * patchPixels;
      for (int yy = 0; yy < cfg.patchSize; ++yy) {
        size_t src = static_cast<size_t>(oy + yy) * p.w + ox;
        std::copy_n(p.input.data() + src, cfg.patchSize, in + static_cast<size_t>(yy) * cfg.patchSize);
        std::copy_n(p.target.data() + src, cfg.patchSize, tg + static_cast<size_t>(yy) * cfg.patchSize);
      }
      batch[bIdx] = TrainSample{in, tg};
    }

    double loss = loss_and_gradients(model, batch, cfg.patchSize, cfg.loss, grad, cfg.threads);
    if (initialLoss < 0)
      initialLoss = loss;

    double lr = cfg.lrAtStep(step);
    beta1T *= cfg.adamBeta1;
    beta2T *= cfg.adamBeta2;
    for (size_t i = 0; i < nParams; ++i) {
      adamM[i] = cfg.adamBeta1 * adamM[i] + (1 - cfg.adamBeta1) * grad[i];
      adamV[i] = cfg.adamBeta2 * adamV[i] + (1 - cfg.adamBeta2) * grad[i] * grad[i];
      double mHat = adamM[i] / (1 - beta1T);
      double vHat = adamV[i] / (1 - beta2T);
      model.params[i] -= lr * mHat / (std::sqrt(vHat) + cfg.adamEps);
    }

    if (log)
      log->push_back(TrainLogEntry{step, lr, loss});
    if (lossTarget > 0 && loss <= lossTarget * initialLoss)
      break;
  }
  return model;
}

}  // namespace iqn
