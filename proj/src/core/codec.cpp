#include "core/codec.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "core/dct.hpp"
#include "core/image_io.hpp"
#include "core/process.hpp"

namespace iqn {

void CodecConfig::validate() const {
  if (qp < 0 || qp > 63)
    throw ConfigError("qp must be in [0, 63], got " + std::to_string(qp));
  if (codec == CodecKind::External && externalCommand.empty())
    throw ConfigError("external codec requires a command");
}

double qstep(int qp) {
  return std::exp2((qp - 4) / 6.0);
}

uint32_t coeff_cost_bits(int64_t q) {
  if (q == 0)
    return 0;
  uint64_t a = static_cast<uint64_t>(q < 0 ? -q : q);
  uint32_t log2 = 0;
  while (a >> (log2 + 1))
    ++log2;
  return 2 * log2 + 3;
}

uint32_t quantize_block(double coeffs[64], double step) {
  uint32_t bits = 4;  // end-of-block
  for (int i = 0; i < 64; ++i) {
    auto q = static_cast<int64_t>(std::round(coeffs[i] / step));
    bits += coeff_cost_bits(q);
    coeffs[i] = static_cast<double>(q) * step;
  }
  return bits;
}

namespace {

uint64_t code_plane(const std::vector<uint8_t>& in, int w, int h, double step,
                    std::vector<uint8_t>& out) {
  int pw = 0, ph = 0;
  std::vector<uint8_t> padded = pad_plane(in, w, h, 8, pw, ph);
  std::vector<uint8_t> rec(padded.size());
  uint64_t bits = 0;
  double block[64];
  for (int by = 0; by < ph; by += 8) {
    for (int bx = 0; bx < pw; bx += 8) {
      gather_block(padded.data(), pw, bx, by, block);
      double coeffs[64];
      forward_dct8(block, coeffs);
      bits += quantize_block(coeffs, step);
      inverse_dct8(coeffs, block);
      for (int yy = 0; yy < 8; ++yy) {
        uint8_t* dst = rec.data() + static_cast<size_t>(by + yy) * pw + bx;
        for (int xx = 0; xx < 8; ++xx) {
          double v = std::round(block[yy * 8 + xx]);
          dst[xx] = static_cast<uint8_t>(std::clamp(v, 0.0, 255.0));
        }
      }
    }
  }
  out.resize(static_cast<size_t>(w) * h);
  for (int yy = 0; yy < h; ++yy)
    std::copy_n(rec.data() + static_cast<size_t>(yy) * pw, w,
                out.data() + static_cast<size_t>(yy) * w);
  return bits;
}

}  // namespace

CodecResult surrogate_encode(const PlanarImage& img, const CodecConfig& cfg) {
  cfg.validate();
  img.validate();
  double step = qstep(cfg.qp);
  CodecResult res;
  res.reconstructed = img;
  res.bits = code_plane(img.y, img.width, img.height, step, res.reconstructed.y);
  if (img.hasChroma()) {
    res.bits += code_plane(img.cb, img.chromaWidth(), img.chromaHeight(), step,
                           res.reconstructed.cb);
    res.bits += code_plane(img.cr, img.chromaWidth(), img.chromaHeight(), step,
                           res.reconstructed.cr);
  }
  return res;
}

namespace {

std::string substitute(const std::string& arg, const std::string& in, const std::string& out,
                       int qp) {
  std::string s = arg;
  auto replace_all = [&s](const std::string& from, const std::string& to) {
    for (size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size())
      s.replace(pos, from.size(), to);
  };
  replace_all("{in}", in);
  replace_all("{out}", out);
  replace_all("{qp}", std::to_string(qp));
  return s;
}

}  // namespace

CodecResult external_encode(const PlanarImage& img, const CodecConfig& cfg) {
  cfg.validate();
  img.validate();
  if (!img.hasChroma())
    throw ExternalCodecError("external codec adapter hands frames over as Y4M; Y-only images are not supported");
  TempDir dir;
  std::string inPath = dir.path() + "/in.y4m";
  std::string outPath = dir.path() + "/out.y4m";
  save_image(img, inPath, FileFormat::Y4m);

  std::vector<std::string> argv;
  argv.reserve(cfg.externalCommand.size());
  for (const auto& a : cfg.externalCommand)
    argv.push_back(substitute(a, inPath, outPath, cfg.qp));
  ProcessResult proc = run_process(argv);
  if (proc.exitCode != 0) {
    std::string tail = proc.output.size() > 2000 ? proc.output.substr(proc.output.size() - 2000)
                                                 : proc.output;
    throw ExternalCodecError("external codec exited with " + std::to_string(proc.exitCode) +
                             ": " + tail);
  }
  if (!std::filesystem::exists(outPath))
    throw ExternalCodecError("external codec produced no output file");

  CodecResult res;
  res.reconstructed = load_image(outPath, FileFormat::Y4m);
  if (!res.reconstructed.sameDims(img))
    throw DimensionError("external codec changed frame dimensions");

  // Prefer an explicit `bits=N` report; otherwise treat the reconstruction
  // file itself as the bitstream.
  bool reported = false;
  size_t pos = 0;
  while ((pos = proc.output.find("bits=", pos)) != std::string::npos) {
    if (pos == 0 || proc.output[pos - 1] == '\n' || proc.output[pos - 1] == ' ') {
      char* end = nullptr;
      unsigned long long v = std::strtoull(proc.output.c_str() + pos + 5, &end, 10);
      if (end != proc.output.c_str() + pos + 5) {
        res.bits = v;
        reported = true;
      }
    }
    pos += 5;
  }
  if (!reported)
    res.bits = static_cast<uint64_t>(std::filesystem::file_size(outPath)) * 8;
  return res;
}

CodecResult encode(const PlanarImage& img, const CodecConfig& cfg) {
  return cfg.codec == CodecKind::Surrogate ? surrogate_encode(img, cfg) : external_encode(img, cfg);
}

}  // namespace iqn
