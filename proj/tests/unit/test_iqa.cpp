#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "core/codec.hpp"
#include "core/iqa.hpp"
#include "support/corpus.hpp"

using namespace iqn;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("iqnet-iqa-test-" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string file(const std::string& name) const { return (dir / name).string(); }
};

std::vector<LumaPatch> corpus_patches(size_t count) {
  std::vector<LumaPatch> out;
  for (uint64_t seed = 1; out.size() < count; ++seed) {
    auto patches = crop_patches(iqntest::synth_image(seed, 128, 128), 64);
    for (auto& p : patches) {
      out.push_back(std::move(p));
      if (out.size() == count)
        break;
    }
  }
  return out;
}

LumaPatch box_blur3(const LumaPatch& p) {
  LumaPatch out = p;
  auto at = [&](int x, int y) {
    x = std::clamp(x, 0, p.w - 1);
    y = std::clamp(y, 0, p.h - 1);
    return static_cast<int>(p.pixels[static_cast<size_t>(y) * p.w + x]);
  };
  for (int y = 0; y < p.h; ++y)
    for (int x = 0; x < p.w; ++x) {
      int sum = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          sum += at(x + dx, y + dy);
      out.pixels[static_cast<size_t>(y) * p.w + x] = static_cast<uint8_t>((sum + 4) / 9);
    }
  return out;
}

}  // namespace

TEST_CASE("alpha tags") {
  CHECK(alpha_tag(0.1) == "alpha-0.1");
  CHECK(alpha_tag(0.25) == "alpha-0.25");
  CHECK(alpha_tag(1.0) == "alpha-1.0");
  CHECK(alpha_tag(0.1 + 0.2) == "alpha-0.3");  // float fuzz collapses
  CHECK(alpha_tag(2.0) == "alpha-2.0");
}

TEST_CASE("proxy score basics") {
  LumaPatch flat;
  flat.w = flat.h = 64;
  flat.pixels.assign(64 * 64, 128);
  CHECK(proxy_score(flat) == 0.0);

  auto patches = corpus_patches(4);
  for (const auto& p : patches) {
    double s1 = proxy_score(p);
    double s2 = proxy_score(p);
    CHECK(s1 == s2);
    CHECK(s1 >= 0.0);
    CHECK(s1 < 10.0);
  }
  CHECK_THROWS_AS(proxy_score(std::vector<uint8_t>(4, 0), 2, 2), DimensionError);
}

TEST_CASE("proxy score is invariant under flips") {
  auto patches = corpus_patches(10);
  for (const auto& p : patches) {
    LumaPatch hflip = p, vflip = p;
    for (int y = 0; y < p.h; ++y)
      for (int x = 0; x < p.w; ++x) {
        hflip.pixels[static_cast<size_t>(y) * p.w + x] =
            p.pixels[static_cast<size_t>(y) * p.w + (p.w - 1 - x)];
        vflip.pixels[static_cast<size_t>(y) * p.w + x] =
            p.pixels[static_cast<size_t>(p.h - 1 - y) * p.w + x];
      }
    CHECK(proxy_score(hflip) == doctest::Approx(proxy_score(p)).epsilon(1e-12));
    CHECK(proxy_score(vflip) == doctest::Approx(proxy_score(p)).epsilon(1e-12));
  }
}

TEST_CASE("blur never raises the proxy score on 50 corpus patches") {
  auto patches = corpus_patches(50);
  for (const auto& p : patches)
    CHECK(proxy_score(p) >= proxy_score(box_blur3(p)));
}

TEST_CASE("quantization noise never raises the proxy score") {
  auto patches = corpus_patches(20);
  CodecConfig cfg;
  cfg.qp = 37;
  for (const auto& p : patches) {
    PlanarImage img = PlanarImage::makeYOnly(p.w, p.h);
    img.y = p.pixels;
    PlanarImage rec = surrogate_encode(img, cfg).reconstructed;
    CHECK(proxy_score(p.pixels, p.w, p.h) >= proxy_score(rec.y, rec.width, rec.height));
  }
}

TEST_CASE("score CSV parsing") {
  Scratch s;
  SUBCASE("empty file with header") {
    std::string path = s.file("empty.csv");
    std::ofstream(path) << "image_id,patch_x,patch_y,candidate,score\n";
    ScoreTable t = file_scores(path);
    CHECK(t.values.empty());
    CHECK(t.duplicateCount == 0);
  }
  SUBCASE("three rows retrievable by exact key") {
    std::string path = s.file("three.csv");
    std::ofstream(path) << "image_id,patch_x,patch_y,candidate,score\n"
                        << "img1,0,0,orig-rec,5.25\n"
                        << "img1,0,0,alpha-0.1,5.5\n"
                        << "img2,64,128,alpha-1.0,3\n";
    ScoreTable t = file_scores(path);
    REQUIRE(t.values.size() == 3);
    CHECK(t.at({"img1", 0, 0, "orig-rec"}) == 5.25);
    CHECK(t.at({"img1", 0, 0, "alpha-0.1"}) == 5.5);
    CHECK(t.at({"img2", 64, 128, "alpha-1.0"}) == 3.0);
    CHECK_THROWS_AS(t.at({"img3", 0, 0, "orig-rec"}), MissingScoreError);
  }
  SUBCASE("duplicate keys: last wins with a warning count") {
    std::string path = s.file("dup.csv");
    std::ofstream(path) << "image_id,patch_x,patch_y,candidate,score\n"
                        << "img1,0,0,orig-rec,1.0\n"
                        << "img1,0,0,orig-rec,2.0\n";
    ScoreTable t = file_scores(path);
    CHECK(t.values.size() == 1);
    CHECK(t.duplicateCount == 1);
    CHECK(t.at({"img1", 0, 0, "orig-rec"}) == 2.0);
  }
  SUBCASE("malformed rows name the line") {
    std::string path = s.file("bad.csv");
    std::ofstream(path) << "image_id,patch_x,patch_y,candidate,score\n"
                        << "img1,0,0,orig-rec,1.0\n"
                        << "img1,zero,0,orig-rec,1.0\n";
    CHECK_THROWS_WITH_AS(file_scores(path), doctest::Contains(":3:"), ParseError);

    std::string missing = s.file("missing-cols.csv");
    std::ofstream(missing) << "image_id,patch_x,patch_y,candidate,score\n"
                           << "img1,0,0\n";
    CHECK_THROWS_AS(file_scores(missing), ParseError);

    std::string header = s.file("bad-header.csv");
    std::ofstream(header) << "id,x,y,candidate,score\n";
    CHECK_THROWS_AS(file_scores(header), ParseError);
  }
}

TEST_CASE("providers") {
  auto patches = corpus_patches(1);
  auto proxy = make_proxy_provider();
  CHECK(proxy->score("any", 0, 0, "orig-rec", patches[0]) ==
        doctest::Approx(proxy_score(patches[0])));

  ScoreTable table;
  table.values[{"img", 0, 0, "alpha-0.5"}] = 7.5;
  auto file = make_file_provider(table);
  CHECK(file->score("img", 0, 0, "alpha-0.5", patches[0]) == 7.5);
  CHECK_THROWS_AS(file->score("img", 64, 0, "alpha-0.5", patches[0]), MissingScoreError);
}
