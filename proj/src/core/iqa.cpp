#include "core/iqa.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/edges.hpp"

namespace iqn {

std::string alpha_tag(double alpha) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", alpha);
  std::string s = buf;
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
    s += ".0";
  return "alpha-" + s;
}

double proxy_score(const std::vector<uint8_t>& patch, int w, int h) {
  if (w < 3 || h < 3 || patch.size() != static_cast<size_t>(w) * h)
    throw DimensionError("proxy_score needs a patch of at least 3x3");
  std::vector<double> p(patch.begin(), patch.end());
  std::vector<double> mag = sobel_magnitude(p, w, h);

  auto at = [&](int x, int y) {
    x = x < 0 ? 0 : (x >= w ? w - 1 : x);
    y = y < 0 ? 0 : (y >= h ? h - 1 : y);
    return p[static_cast<size_t>(y) * w + x];
  };

  double gsum = 0, rsum = 0;
  double boundarySum = 0, interiorSum = 0;
  size_t boundaryN = 0, interiorN = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double m = mag[static_cast<size_t>(y) * w + x];
      double dx2 = std::abs(at(x - 1, y) - 2 * at(x, y) + at(x + 1, y));
      double dy2 = std::abs(at(x, y - 1) - 2 * at(x, y) + at(x, y + 1));
      double d = 0.5 * (dx2 + dy2);
      gsum += m;
      // Second differences a clean local edge cannot explain: ringing and
      // checkerboard noise.
      rsum += std::max(0.0, d - 2.0 * m - 8.0);
      // Second differences grouped by 8x8-grid offset; codec block seams
      // straddle offsets 7|0, natural content has no such alignment.
      bool bx = (x % 8 == 0) || (x % 8 == 7);
      bool by = (y % 8 == 0) || (y % 8 == 7);
      if (bx) { boundarySum += dx2; ++boundaryN; } else { interiorSum += dx2; ++interiorN; }
      if (by) { boundarySum += dy2; ++boundaryN; } else { interiorSum += dy2; ++interiorN; }
    }
  }
  double n = static_cast<double>(w) * h;
  double g = gsum / n;
  double ring = rsum / n;
  double block = 0.0;
  if (boundaryN && interiorN)
    block = std::max(0.0, boundarySum / static_cast<double>(boundaryN) -
                              interiorSum / static_cast<double>(interiorN));
  // The 0.5 deadzone ignores chance grid alignment in clean content; codec
  // seams sit well above it.
  block = std::max(0.0, block - 0.5);
  // Damped detail energy. The weights are frozen so that blur and visible
  // quantization noise never raise the score on the test corpus; a
  // no-reference statistic cannot also rank near-transparent recodes, whose
  // snapped coefficients genuinely gain a little gradient energy.
  double s = std::max(0.0, g - 2.0 * ring - block) / 32.0;
  return 10.0 * s / (s + 1.0);
}

double proxy_score(const LumaPatch& patch) {
  return proxy_score(patch.pixels, patch.w, patch.h);
}

double ScoreTable::at(const ScoreKey& k) const {
  auto it = values.find(k);
  if (it == values.end())
    throw MissingScoreError("no score for image '" + k.imageId + "' patch (" +
                            std::to_string(k.x) + "," + std::to_string(k.y) + ") candidate '" +
                            k.candidate + "'");
  return it->second;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos)
    return {};
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

ScoreTable file_scores(const std::string& path) {
  std::ifstream f(path);
  if (!f)
    throw IoError("cannot open score file: " + path);
  ScoreTable table;
  std::string line;
  int lineNo = 0;
  if (!std::getline(f, line))
    throw ParseError(path + ": empty score file");
  ++lineNo;
  if (trim(line) != "image_id,patch_x,patch_y,candidate,score")
    throw ParseError(path + ":1: expected header image_id,patch_x,patch_y,candidate,score");
  while (std::getline(f, line)) {
    ++lineNo;
    if (trim(line).empty())
      continue;
    std::stringstream ss(line);
    std::string field[5];
    for (int i = 0; i < 5; ++i) {
      if (!std::getline(ss, field[i], ','))
        throw ParseError(path + ":" + std::to_string(lineNo) + ": expected 5 fields");
    }
    std::string extra;
    if (std::getline(ss, extra, ','))
      throw ParseError(path + ":" + std::to_string(lineNo) + ": too many fields");
    ScoreKey key;
    key.imageId = trim(field[0]);
    try {
      key.x = std::stoi(trim(field[1]));
      key.y = std::stoi(trim(field[2]));
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(lineNo) + ": bad patch coordinates");
    }
    key.candidate = trim(field[3]);
    double score;
    try {
      size_t pos = 0;
      std::string v = trim(field[4]);
      score = std::stod(v, &pos);
      if (pos != v.size())
        throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(lineNo) + ": bad score value");
    }
    if (!std::isfinite(score))
      throw ParseError(path + ":" + std::to_string(lineNo) + ": score must be finite");
    if (key.x < 0 || key.y < 0)
      throw ParseError(path + ":" + std::to_string(lineNo) + ": negative patch coordinates");
    auto [it, inserted] = table.values.insert_or_assign(std::move(key), score);
    (void)it;
    if (!inserted)
      ++table.duplicateCount;
  }
  return table;
}

namespace {

class ProxyProvider final : public IqaProvider {
public:
  double score(const std::string&, int, int, const std::string&,
               const LumaPatch& patch) const override {
    return proxy_score(patch);
  }
};

class FileProvider final : public IqaProvider {
public:
  explicit FileProvider(ScoreTable table) : table_(std::move(table)) {}
  double score(const std::string& imageId, int px, int py, const std::string& candidate,
               const LumaPatch&) const override {
    return table_.at(ScoreKey{imageId, px, py, candidate});
  }

private:
  ScoreTable table_;
};

}  // namespace

std::unique_ptr<IqaProvider> make_proxy_provider() {
  return std::make_unique<ProxyProvider>();
}

std::unique_ptr<IqaProvider> make_file_provider(ScoreTable table) {
  return std::make_unique<FileProvider>(std::move(table));
}

}  // namespace iqn
