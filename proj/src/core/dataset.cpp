#include "core/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "core/image_io.hpp"
#include "core/version.hpp"

namespace iqn {

using nlohmann::json;

void GenOptions::validate() const {
  codec.validate();
  jnd.validate();
  if (patchSize <= 0 || patchSize % 8 != 0)
    throw ConfigError("patch size must be a positive multiple of 8");
  if (smoothThreshold < 0)
    throw ConfigError("smooth threshold must be >= 0");
  if (epsilon < 0)
    throw ConfigError("epsilon must be >= 0");
  if (qp != codec.qp)
    throw ConfigError("GenOptions qp and codec qp disagree");
}

bool is_smooth(double maeAtMinAlpha, double threshold) {
  if (maeAtMinAlpha < 0)
    throw ConfigError("MAE must be >= 0");
  return maeAtMinAlpha <= threshold;
}

double select_scale(double origScore, const std::vector<SelectionCandidate>& candidates,
                    bool smooth, double epsilon) {
  if (candidates.empty())
    throw SelectionError("no candidates to select from");
  for (size_t i = 1; i < candidates.size(); ++i)
    if (candidates[i].alpha <= candidates[i - 1].alpha)
      throw SelectionError("candidates must be sorted by strictly ascending alpha");

  std::vector<SelectionCandidate> remaining;
  if (smooth) {
    double gate = 1.2 * candidates.front().mae;
    for (const auto& c : candidates)
      if (c.mae <= gate)
        remaining.push_back(c);
  } else {
    remaining = candidates;
  }
  // The smallest alpha always passes its own gate.

  const SelectionCandidate* best = nullptr;
  for (const auto& c : remaining) {
    if (c.score < origScore)
      continue;
    if (!best || c.score < best->score ||
        (c.score == best->score && c.alpha > best->alpha))
      best = &c;
  }
  if (best)
    return best->alpha;

  for (auto it = remaining.rbegin(); it != remaining.rend(); ++it)
    if (it->score >= origScore - epsilon)
      return it->alpha;

  return remaining.front().alpha;
}

GenResult generate_training_image(const PlanarImage& img, const std::string& imageId,
                                  const GenOptions& opts, const IqaProvider& iqa) {
  opts.validate();
  img.validate();
  const std::vector<double>& alphas = opts.jnd.alphaSet;

  // Step 1: prefilter at every candidate scale.
  std::vector<PlanarImage> filtered;
  filtered.reserve(alphas.size());
  for (double a : alphas)
    filtered.push_back(prefilter(img, opts.jnd.withAlpha(a)));

  // Step 2: encode and reconstruct the original and every candidate.
  CodecResult origRec = encode(img, opts.codec);
  std::vector<PlanarImage> recs;
  recs.reserve(alphas.size());
  for (const auto& f : filtered)
    recs.push_back(encode(f, opts.codec).reconstructed);

  // Step 3: crop every reconstruction into patches.
  std::vector<LumaPatch> origPatches = crop_patches(origRec.reconstructed, opts.patchSize);
  std::vector<std::vector<LumaPatch>> recPatches;
  recPatches.reserve(alphas.size());
  for (const auto& r : recs)
    recPatches.push_back(crop_patches(r, opts.patchSize));
  std::vector<std::vector<LumaPatch>> filteredPatches;
  filteredPatches.reserve(alphas.size());
  for (const auto& f : filtered)
    filteredPatches.push_back(crop_patches(f, opts.patchSize));

  // Step 4: per-patch IQA-guided selection.
  GenResult result;
  std::vector<LumaPatch> outPatches;
  outPatches.reserve(origPatches.size());
  for (size_t p = 0; p < origPatches.size(); ++p) {
    const LumaPatch& op = origPatches[p];
    PatchRecord rec;
    rec.imageId = imageId;
    rec.x = op.x;
    rec.y = op.y;
    rec.origScore = iqa.score(imageId, op.x, op.y, kOrigRecTag, op);
    std::vector<SelectionCandidate> cands;
    cands.reserve(alphas.size());
    for (size_t ai = 0; ai < alphas.size(); ++ai) {
      SelectionCandidate c;
      c.alpha = alphas[ai];
      c.mae = mae(recPatches[ai][p], op);
      c.score = iqa.score(imageId, op.x, op.y, alpha_tag(alphas[ai]), recPatches[ai][p]);
      rec.maeByAlpha[c.alpha] = c.mae;
      rec.scoreByAlpha[c.alpha] = c.score;
      cands.push_back(c);
    }
    rec.smooth = is_smooth(cands.front().mae, opts.smoothThreshold);
    rec.chosenAlpha = select_scale(rec.origScore, cands, rec.smooth, opts.epsilon);

    size_t chosenIdx = std::find(alphas.begin(), alphas.end(), rec.chosenAlpha) - alphas.begin();
    outPatches.push_back(filteredPatches[chosenIdx][p]);
    result.patches.push_back(std::move(rec));
  }

  // Step 5: assemble from the prefiltered originals; chroma passes through.
  result.trainingImage = img;
  result.trainingImage.y = assemble_patches(outPatches, img.width, img.height);
  return result;
}

namespace {

std::string alpha_key(double alpha) {
  std::string tag = alpha_tag(alpha);
  return tag.substr(std::string("alpha-").size());
}

json patch_to_json(const PatchRecord& p) {
  json j;
  j["x"] = p.x;
  j["y"] = p.y;
  j["smooth"] = p.smooth;
  j["orig_score"] = p.origScore;
  j["chosen_alpha"] = p.chosenAlpha;
  json maeJ = json::object(), scoreJ = json::object();
  for (const auto& [a, v] : p.maeByAlpha)
    maeJ[alpha_key(a)] = v;
  for (const auto& [a, v] : p.scoreByAlpha)
    scoreJ[alpha_key(a)] = v;
  j["mae"] = maeJ;
  j["scores"] = scoreJ;
  return j;
}

PatchRecord patch_from_json(const json& j, const std::string& imageId,
                            const std::vector<double>& alphaSet) {
  PatchRecord p;
  p.imageId = imageId;
  p.x = j.at("x").get<int>();
  p.y = j.at("y").get<int>();
  p.smooth = j.at("smooth").get<bool>();
  p.origScore = j.at("orig_score").get<double>();
  p.chosenAlpha = j.at("chosen_alpha").get<double>();
  for (double a : alphaSet) {
    std::string key = alpha_key(a);
    p.maeByAlpha[a] = j.at("mae").at(key).get<double>();
    p.scoreByAlpha[a] = j.at("scores").at(key).get<double>();
  }
  return p;
}

void validate_manifest(const DatasetManifest& m) {
  if (m.alphaSet.empty())
    throw ParseError("manifest: empty alpha set");
  for (const auto& img : m.images) {
    PatchGrid grid = PatchGrid::forDims(img.width, img.height, m.patchSize);
    if (img.patches.size() != grid.origins.size())
      throw ParseError("manifest: image '" + img.id + "' has " +
                       std::to_string(img.patches.size()) + " patches, expected " +
                       std::to_string(grid.origins.size()));
    std::vector<uint8_t> seen(grid.origins.size(), 0);
    for (const auto& p : img.patches) {
      if (p.x % m.patchSize || p.y % m.patchSize)
        throw ParseError("manifest: patch origin not aligned in image '" + img.id + "'");
      int c = p.x / m.patchSize, r = p.y / m.patchSize;
      if (c < 0 || r < 0 || c >= grid.cols || r >= grid.rows)
        throw ParseError("manifest: patch origin outside image '" + img.id + "'");
      uint8_t& s = seen[static_cast<size_t>(r) * grid.cols + c];
      if (s)
        throw ParseError("manifest: duplicate patch in image '" + img.id + "'");
      s = 1;
      if (std::find(m.alphaSet.begin(), m.alphaSet.end(), p.chosenAlpha) == m.alphaSet.end())
        throw ParseError("manifest: chosen alpha not in alpha set in image '" + img.id + "'");
      if (p.smooth) {
        double minAlphaMae = p.maeByAlpha.at(m.alphaSet.front());
        if (p.maeByAlpha.at(p.chosenAlpha) > 1.2 * minAlphaMae + 1e-12)
          throw ParseError("manifest: smooth patch violates the MAE gate in image '" + img.id +
                           "'");
      }
    }
  }
}

}  // namespace

void write_manifest(const DatasetManifest& manifest, const std::string& path) {
  validate_manifest(manifest);
  json j;
  j["tool_version"] = manifest.toolVersion;
  j["codec"] = {{"id", manifest.codecId}, {"qp", manifest.qp}};
  j["patch_size"] = manifest.patchSize;
  j["alpha_set"] = manifest.alphaSet;
  j["config_hash"] = manifest.configHash;
  json images = json::array();
  for (const auto& img : manifest.images) {
    json ij;
    ij["id"] = img.id;
    ij["source"] = img.sourcePath;
    ij["output"] = img.outputFile;
    ij["width"] = img.width;
    ij["height"] = img.height;
    json patches = json::array();
    for (const auto& p : img.patches)
      patches.push_back(patch_to_json(p));
    ij["patches"] = patches;
    images.push_back(ij);
  }
  j["images"] = images;
  std::ofstream f(path, std::ios::trunc);
  if (!f)
    throw IoError("cannot write manifest: " + path);
  f << j.dump(2) << "\n";
  if (!f)
    throw IoError("manifest write failed: " + path);
}

DatasetManifest read_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f)
    throw IoError("cannot open manifest: " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ParseError("manifest " + path + ": " + e.what());
  }
  DatasetManifest m;
  try {
    m.toolVersion = j.at("tool_version").get<std::string>();
    m.codecId = j.at("codec").at("id").get<std::string>();
    m.qp = j.at("codec").at("qp").get<int>();
    m.patchSize = j.at("patch_size").get<int>();
    m.alphaSet = j.at("alpha_set").get<std::vector<double>>();
    m.configHash = j.at("config_hash").get<std::string>();
    for (const auto& ij : j.at("images")) {
      ManifestImage img;
      img.id = ij.at("id").get<std::string>();
      img.sourcePath = ij.at("source").get<std::string>();
      img.outputFile = ij.at("output").get<std::string>();
      img.width = ij.at("width").get<int>();
      img.height = ij.at("height").get<int>();
      for (const auto& pj : ij.at("patches"))
        img.patches.push_back(patch_from_json(pj, img.id, m.alphaSet));
      m.images.push_back(std::move(img));
    }
  } catch (const json::exception& e) {
    throw ParseError("manifest " + path + ": " + e.what());
  }
  validate_manifest(m);
  return m;
}

std::unique_ptr<IqaProvider> make_provider_from_spec(const std::string& spec) {
  if (spec == "proxy")
    return make_proxy_provider();
  if (spec.rfind("file:", 0) == 0)
    return make_file_provider(file_scores(spec.substr(5)));
  throw ConfigError("unknown IQA provider '" + spec + "' (expected proxy or file:PATH)");
}

GenRunSummary gen_dataset_run(const GenRunOptions& opts) {
  namespace fs = std::filesystem;
  opts.gen.validate();
  std::unique_ptr<IqaProvider> provider = make_provider_from_spec(opts.iqa);
  if (!fs::is_directory(opts.inDir))
    throw IoError("input directory not found: " + opts.inDir);
  fs::create_directories(opts.outDir);

  std::vector<fs::path> inputs;
  for (const auto& entry : fs::directory_iterator(opts.inDir)) {
    if (!entry.is_regular_file())
      continue;
    auto fmt = format_from_path(entry.path().string());
    if (fmt == FileFormat::Pgm || fmt == FileFormat::Y4m)
      inputs.push_back(entry.path());
  }
  std::sort(inputs.begin(), inputs.end());
  if (inputs.empty())
    throw IoError("no .pgm or .y4m images in " + opts.inDir);

  DatasetManifest manifest;
  manifest.toolVersion = kVersion;
  manifest.codecId = opts.gen.codec.codec == CodecKind::Surrogate ? "surrogate" : "external";
  manifest.qp = opts.gen.qp;
  manifest.patchSize = opts.gen.patchSize;
  manifest.alphaSet = opts.gen.jnd.alphaSet;
  manifest.configHash = opts.configHash;

  GenRunSummary summary;
  double alphaSum = 0.0;
  for (const auto& path : inputs) {
    FileFormat fmt = *format_from_path(path.string());
    PlanarImage img = load_image(path.string(), fmt);
    std::string id = path.stem().string();
    GenResult res = generate_training_image(img, id, opts.gen, *provider);

    ManifestImage mi;
    mi.id = id;
    mi.sourcePath = fs::absolute(path).string();
    mi.outputFile = id + (img.hasChroma() ? ".train.y4m" : ".train.pgm");
    mi.width = img.width;
    mi.height = img.height;
    mi.patches = res.patches;
    save_image(res.trainingImage, (fs::path(opts.outDir) / mi.outputFile).string(),
               img.hasChroma() ? FileFormat::Y4m : FileFormat::Pgm);

    for (const auto& p : mi.patches)
      alphaSum += p.chosenAlpha;
    summary.patchCount += static_cast<int>(mi.patches.size());
    ++summary.imageCount;
    manifest.images.push_back(std::move(mi));
  }
  summary.meanChosenAlpha = summary.patchCount ? alphaSum / summary.patchCount : 0.0;
  summary.manifestPath = (fs::path(opts.outDir) / "manifest.json").string();
  write_manifest(manifest, summary.manifestPath);
  return summary;
}

}  // namespace iqn
