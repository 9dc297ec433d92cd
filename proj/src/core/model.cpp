#include "core/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace iqn {

ParamLayout param_layout(int channels) {
  if (channels <= 0)
    throw ConfigError("channel count must be positive");
  size_t c = static_cast<size_t>(channels);
  ParamLayout l;
  l.channels = channels;
  l.conv1W = 0;
  l.conv1B = l.conv1W + 25 * c;
  l.paW = l.conv1B + c;
  l.paB = l.paW + c * c;
  l.conv2W = l.paB + c;
  l.conv2B = l.conv2W + 9 * c * c;
  l.conv3W = l.conv2B + c;
  l.conv3B = l.conv3W + 9 * c;
  l.total = l.conv3B + 1;
  return l;
}

size_t parameter_count(int channels) {
  return param_layout(channels).total;
}

size_t macs_per_pixel(int channels) {
  size_t c = static_cast<size_t>(channels);
  return 25 * c + c * c + 9 * c * c + 9 * c;
}

IqnetModel IqnetModel::zeros(int channels) {
  IqnetModel m;
  m.channels = channels;
  m.params.assign(param_layout(channels).total, 0.0);
  return m;
}

namespace {

inline int clampi(int v, int lo, int hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

// Replicate-pads `plane` (h x w) by r on each side into dst ((h+2r)*(w+2r)).
void pad_replicate(const double* plane, int w, int h, int r, double* dst) {
  int pw = w + 2 * r;
  for (int y = -r; y < h + r; ++y) {
    const double* src = plane + static_cast<size_t>(clampi(y, 0, h - 1)) * w;
    double* d = dst + static_cast<size_t>(y + r) * pw;
    for (int x = 0; x < r; ++x)
      d[x] = src[0];
    std::memcpy(d + r, src, sizeof(double) * w);
    for (int x = 0; x < r; ++x)
      d[r + w + x] = src[w - 1];
  }
}

// Adjoint of pad_replicate: folds a padded gradient back onto the plane.
void unpad_adjoint(const double* dPadded, int w, int h, int r, double* dPlane) {
  int pw = w + 2 * r, ph = h + 2 * r;
  std::fill_n(dPlane, static_cast<size_t>(w) * h, 0.0);
  for (int py = 0; py < ph; ++py) {
    int y = clampi(py - r, 0, h - 1);
    const double* src = dPadded + static_cast<size_t>(py) * pw;
    double* dst = dPlane + static_cast<size_t>(y) * w;
    for (int px = 0; px < pw; ++px)
      dst[clampi(px - r, 0, w - 1)] += src[px];
  }
}

// Correlation of padded input (cin planes, (h+k-1)x(w+k-1)) with a
// [cout][cin][k][k] kernel; out gets cout planes of h*w.
void conv_forward(const double* padded, int cin, int w, int h, int k, const double* wts,
                  const double* bias, double* out, int cout) {
  int pw = w + k - 1;
  size_t pStride = static_cast<size_t>(pw) * (h + k - 1);
  size_t oStride = static_cast<size_t>(w) * h;
  for (int co = 0; co < cout; ++co) {
    double* oPlane = out + co * oStride;
    std::fill_n(oPlane, oStride, bias[co]);
    for (int ci = 0; ci < cin; ++ci) {
      const double* iPlane = padded + ci * pStride;
      const double* kBase = wts + (static_cast<size_t>(co) * cin + ci) * k * k;
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          double wv = kBase[ky * k + kx];
          for (int y = 0; y < h; ++y) {
            const double* irow = iPlane + static_cast<size_t>(y + ky) * pw + kx;
            double* orow = oPlane + static_cast<size_t>(y) * w;
            for (int x = 0; x < w; ++x)
              orow[x] += wv * irow[x];
          }
        }
      }
    }
  }
}

// Gradients w.r.t. kernel/bias and padded input for conv_forward.
void conv_backward(const double* padded, const double* dOut, int cin, int w, int h, int k,
                   const double* wts, int cout, double* dW, double* dB, double* dPadded) {
  int pw = w + k - 1;
  size_t pStride = static_cast<size_t>(pw) * (h + k - 1);
  size_t oStride = static_cast<size_t>(w) * h;
  if (dPadded)
    std::fill_n(dPadded, static_cast<size_t>(cin) * pStride, 0.0);
  for (int co = 0; co < cout; ++co) {
    const double* dPlane = dOut + co * oStride;
    double db = 0;
    for (size_t i = 0; i < oStride; ++i)
      db += dPlane[i];
    dB[co] += db;
    for (int ci = 0; ci < cin; ++ci) {
      const double* iPlane = padded + ci * pStride;
      double* dIPlane = dPadded ? dPadded + ci * pStride : nullptr;
      size_t kBase = (static_cast<size_t>(co) * cin + ci) * k * k;
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          double dw = 0;
          double wv = wts[kBase + ky * k + kx];
          for (int y = 0; y < h; ++y) {
            const double* irow = iPlane + static_cast<size_t>(y + ky) * pw + kx;
            const double* drow = dPlane + static_cast<size_t>(y) * w;
            if (dIPlane) {
              double* dirow = dIPlane + static_cast<size_t>(y + ky) * pw + kx;
              for (int x = 0; x < w; ++x) {
                dw += drow[x] * irow[x];
                dirow[x] += wv * drow[x];
              }
            } else {
              for (int x = 0; x < w; ++x)
                dw += drow[x] * irow[x];
            }
          }
          dW[kBase + ky * k + kx] += dw;
        }
      }
    }
  }
}

inline double sigmoid(double v) {
  return 1.0 / (1.0 + std::exp(-v));
}

}  // namespace

void pixel_attention(const double* features, int channels, size_t n, const double* w,
                     const double* b, double* out) {
  std::vector<double> att(static_cast<size_t>(channels) * n);
  for (int co = 0; co < channels; ++co) {
    double* a = att.data() + co * n;
    std::fill_n(a, n, b[co]);
    for (int ci = 0; ci < channels; ++ci) {
      double wv = w[static_cast<size_t>(co) * channels + ci];
      const double* f = features + ci * n;
      for (size_t i = 0; i < n; ++i)
        a[i] += wv * f[i];
    }
  }
  for (int co = 0; co < channels; ++co) {
    const double* f = features + co * n;
    double* a = att.data() + co * n;
    double* o = out + co * n;
    for (size_t i = 0; i < n; ++i)
      o[i] = f[i] * sigmoid(a[i]);
  }
}

void forward_cached(const IqnetModel& m, const double* x, int w, int h, ForwardCache& cache) {
  const ParamLayout l = m.layout();
  const int c = m.channels;
  const double* p = m.params.data();
  const size_t n = static_cast<size_t>(w) * h;
  cache.w = w;
  cache.h = h;

  cache.xPad.resize(static_cast<size_t>(w + 4) * (h + 4));
  pad_replicate(x, w, h, 2, cache.xPad.data());

  cache.f.resize(static_cast<size_t>(c) * n);
  conv_forward(cache.xPad.data(), 1, w, h, 5, p + l.conv1W, p + l.conv1B, cache.f.data(), c);
  for (double& v : cache.f)
    v = v > 0 ? v : 0.0;

  // Pixel attention; keep the sigmoid map for backward.
  cache.att.resize(static_cast<size_t>(c) * n);
  for (int co = 0; co < c; ++co) {
    double* a = cache.att.data() + co * n;
    std::fill_n(a, n, p[l.paB + co]);
    for (int ci = 0; ci < c; ++ci) {
      double wv = p[l.paW + static_cast<size_t>(co) * c + ci];
      const double* f = cache.f.data() + ci * n;
      for (size_t i = 0; i < n; ++i)
        a[i] += wv * f[i];
    }
    for (size_t i = 0; i < n; ++i)
      a[i] = sigmoid(a[i]);
  }

  size_t pStride1 = static_cast<size_t>(w + 2) * (h + 2);
  cache.gPad.resize(static_cast<size_t>(c) * pStride1);
  {
    std::vector<double> g(n);
    for (int ci = 0; ci < c; ++ci) {
      const double* f = cache.f.data() + ci * n;
      const double* a = cache.att.data() + ci * n;
      for (size_t i = 0; i < n; ++i)
        g[i] = f[i] * a[i];
      pad_replicate(g.data(), w, h, 1, cache.gPad.data() + ci * pStride1);
    }
  }

  std::vector<double> hPlane(static_cast<size_t>(c) * n);
  conv_forward(cache.gPad.data(), c, w, h, 3, p + l.conv2W, p + l.conv2B, hPlane.data(), c);
  for (double& v : hPlane)
    v = v > 0 ? v : 0.0;
  cache.hPad.resize(static_cast<size_t>(c) * pStride1);
  for (int ci = 0; ci < c; ++ci)
    pad_replicate(hPlane.data() + ci * n, w, h, 1, cache.hPad.data() + ci * pStride1);

  cache.res.resize(n);
  conv_forward(cache.hPad.data(), c, w, h, 3, p + l.conv3W, p + l.conv3B, cache.res.data(), 1);

  cache.y.resize(n);
  for (size_t i = 0; i < n; ++i)
    cache.y[i] = std::clamp(x[i] + cache.res[i], 0.0, 1.0);
}

std::vector<double> forward(const IqnetModel& m, const std::vector<double>& x, int w, int h) {
  if (x.size() != static_cast<size_t>(w) * h)
    throw DimensionError("forward: plane size mismatch");
  ForwardCache cache;
  forward_cached(m, x.data(), w, h, cache);
  return cache.y;
}

void backward(const IqnetModel& m, const double* x, const ForwardCache& cache,
              const std::vector<double>& dLdy, double* grad) {
  const ParamLayout l = m.layout();
  const int c = m.channels;
  const int w = cache.w, h = cache.h;
  const size_t n = static_cast<size_t>(w) * h;
  const double* p = m.params.data();
  auto& scratch = const_cast<ForwardCache&>(cache);

  // Clamp: pass-through inside [0,1].
  std::vector<double> dRes(n);
  for (size_t i = 0; i < n; ++i) {
    double pre = x[i] + cache.res[i];
    dRes[i] = (pre >= 0.0 && pre <= 1.0) ? dLdy[i] : 0.0;
  }

  size_t pStride1 = static_cast<size_t>(w + 2) * (h + 2);

  // conv3
  scratch.dhPad.resize(static_cast<size_t>(c) * pStride1);
  conv_backward(cache.hPad.data(), dRes.data(), c, w, h, 3, p + l.conv3W, 1, grad + l.conv3W,
                grad + l.conv3B, scratch.dhPad.data());
  scratch.dh.resize(static_cast<size_t>(c) * n);
  for (int ci = 0; ci < c; ++ci) {
    unpad_adjoint(scratch.dhPad.data() + ci * pStride1, w, h, 1, scratch.dh.data() + ci * n);
    // relu': h > 0 (hPad holds post-relu values; read interior)
    const double* hp = cache.hPad.data() + ci * pStride1;
    double* dh = scratch.dh.data() + ci * n;
    for (int y = 0; y < h; ++y) {
      const double* hrow = hp + static_cast<size_t>(y + 1) * (w + 2) + 1;
      double* drow = dh + static_cast<size_t>(y) * w;
      for (int xx = 0; xx < w; ++xx)
        if (hrow[xx] <= 0.0)
          drow[xx] = 0.0;
    }
  }

  // conv2
  scratch.dgPad.resize(static_cast<size_t>(c) * pStride1);
  conv_backward(cache.gPad.data(), scratch.dh.data(), c, w, h, 3, p + l.conv2W, c,
                grad + l.conv2W, grad + l.conv2B, scratch.dgPad.data());

  // g = f * att
  scratch.df.resize(static_cast<size_t>(c) * n);
  std::vector<double> dAttPre(static_cast<size_t>(c) * n);
  {
    std::vector<double> dg(n);
    for (int ci = 0; ci < c; ++ci) {
      unpad_adjoint(scratch.dgPad.data() + ci * pStride1, w, h, 1, dg.data());
      const double* f = cache.f.data() + ci * n;
      const double* a = cache.att.data() + ci * n;
      double* df = scratch.df.data() + ci * n;
      double* dap = dAttPre.data() + ci * n;
      for (size_t i = 0; i < n; ++i) {
        df[i] = dg[i] * a[i];
        dap[i] = dg[i] * f[i] * a[i] * (1.0 - a[i]);  // through the sigmoid
      }
    }
  }

  // 1x1 attention conv: dW, dB, and input contribution back into df.
  for (int co = 0; co < c; ++co) {
    const double* dap = dAttPre.data() + co * n;
    double db = 0;
    for (size_t i = 0; i < n; ++i)
      db += dap[i];
    grad[l.paB + co] += db;
    for (int ci = 0; ci < c; ++ci) {
      const double* f = cache.f.data() + ci * n;
      double* df = scratch.df.data() + ci * n;
      double wv = p[l.paW + static_cast<size_t>(co) * c + ci];
      double dw = 0;
      for (size_t i = 0; i < n; ++i) {
        dw += dap[i] * f[i];
        df[i] += wv * dap[i];
      }
      grad[l.paW + static_cast<size_t>(co) * c + ci] += dw;
    }
  }

  // relu' of conv1, then conv1 weight/bias gradients (input grad not needed).
  for (int ci = 0; ci < c; ++ci) {
    const double* f = cache.f.data() + ci * n;
    double* df = scratch.df.data() + ci * n;
    for (size_t i = 0; i < n; ++i)
      if (f[i] <= 0.0)
        df[i] = 0.0;
  }
  conv_backward(cache.xPad.data(), scratch.df.data(), 1, w, h, 5, p + l.conv1W, c,
                grad + l.conv1W, grad + l.conv1B, nullptr);
}

PlanarImage apply_model(const IqnetModel& m, const PlanarImage& img) {
  img.validate();
  size_t n = img.y.size();
  std::vector<double> x(n);
  for (size_t i = 0; i < n; ++i)
    x[i] = img.y[i] / 255.0;
  std::vector<double> y = forward(m, x, img.width, img.height);
  PlanarImage out = img;
  for (size_t i = 0; i < n; ++i) {
    double v = std::round(y[i] * 255.0);
    out.y[i] = static_cast<uint8_t>(std::clamp(v, 0.0, 255.0));
  }
  return out;
}

namespace {

constexpr char kMagic[4] = {'I', 'Q', 'N', 'M'};
constexpr uint32_t kFormatVersion = 1;

template <typename T>
void write_pod(std::ofstream& f, const T& v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void read_pod(std::ifstream& f, T& v, const std::string& path) {
  f.read(reinterpret_cast<char*>(&v), sizeof v);
  if (static_cast<size_t>(f.gcount()) != sizeof v)
    throw ModelFormatError("truncated model file: " + path);
}

}  // namespace

void save_model(const IqnetModel& m, const std::string& path, const std::string& configHash) {
  if (m.params.size() != m.layout().total)
    throw ModelFormatError("model parameter vector does not match its layout");
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f)
    throw IoError("cannot write model: " + path);
  f.write(kMagic, 4);
  write_pod(f, kFormatVersion);
  write_pod(f, static_cast<uint32_t>(m.channels));
  const uint32_t kernels[4] = {5, 1, 3, 3};
  for (uint32_t k : kernels)
    write_pod(f, k);
  write_pod(f, static_cast<uint64_t>(m.params.size()));
  write_pod(f, static_cast<uint32_t>(configHash.size()));
  f.write(configHash.data(), static_cast<std::streamsize>(configHash.size()));
  f.write(reinterpret_cast<const char*>(m.params.data()),
          static_cast<std::streamsize>(m.params.size() * sizeof(double)));
  if (!f)
    throw IoError("model write failed: " + path);
}

IqnetModel load_model(const std::string& path, std::string* configHash) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw IoError("cannot open model: " + path);
  char magic[4];
  f.read(magic, 4);
  if (f.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0)
    throw ModelFormatError("not an IQNet model file: " + path);
  uint32_t version = 0, channels = 0;
  read_pod(f, version, path);
  if (version != kFormatVersion)
    throw ModelFormatError("unsupported model format version " + std::to_string(version));
  read_pod(f, channels, path);
  uint32_t kernels[4];
  for (uint32_t& k : kernels)
    read_pod(f, k, path);
  if (kernels[0] != 5 || kernels[1] != 1 || kernels[2] != 3 || kernels[3] != 3)
    throw ModelFormatError("unexpected layer shapes in model: " + path);
  uint64_t count = 0;
  read_pod(f, count, path);
  uint32_t hashLen = 0;
  read_pod(f, hashLen, path);
  if (hashLen > 4096)
    throw ModelFormatError("implausible config hash length in model: " + path);
  std::string hash(hashLen, '\0');
  f.read(hash.data(), hashLen);
  if (static_cast<size_t>(f.gcount()) != hashLen)
    throw ModelFormatError("truncated model file: " + path);
  IqnetModel m;
  m.channels = static_cast<int>(channels);
  if (count != m.layout().total)
    throw ModelFormatError("parameter count does not match architecture: " + path);
  m.params.resize(count);
  f.read(reinterpret_cast<char*>(m.params.data()),
         static_cast<std::streamsize>(count * sizeof(double)));
  if (static_cast<size_t>(f.gcount()) != count * sizeof(double))
    throw ModelFormatError("truncated model file: " + path);
  if (configHash)
    *configHash = hash;
  return m;
}

}  // namespace iqn
