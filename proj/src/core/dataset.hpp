#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/codec.hpp"
#include "core/iqa.hpp"
#include "core/jnd.hpp"

namespace iqn {

// Selection state of one 64x64 patch.
struct PatchRecord {
  std::string imageId;
  int x = 0;
  int y = 0;
  bool smooth = false;
  double origScore = 0.0;
  std::map<double, double> maeByAlpha;    // alpha -> MAE(JND-rec, orig-rec)
  std::map<double, double> scoreByAlpha;  // alpha -> IQA score of JND-rec
  double chosenAlpha = 0.0;
};

struct GenOptions {
  int qp = 27;  // base QP: trained once here, applied at every QP
  CodecConfig codec;
  JndConfig jnd;
  int patchSize = 64;
  double smoothThreshold = 1.5;  // MAE at the smallest alpha, gray levels
  double epsilon = 0.1;          // acceptable score shortfall, 0-10 scale

  void validate() const;
};

// A patch is smooth when even the gentlest filtering barely moves it.
bool is_smooth(double maeAtMinAlpha, double threshold);

struct SelectionCandidate {
  double alpha = 0.0;
  double score = 0.0;
  double mae = 0.0;
};

// Chooses the scale for one patch. Candidates must be sorted by strictly
// ascending alpha. Rules, in order:
//   1. smooth patches drop candidates with mae > 1.2 * mae(smallest alpha);
//   2. among candidates scoring >= origScore, take the lowest such score and
//      break ties toward the largest alpha;
//   3. otherwise the largest alpha scoring >= origScore - epsilon;
//   4. otherwise the smallest remaining alpha.
double select_scale(double origScore, const std::vector<SelectionCandidate>& candidates,
                    bool smooth, double epsilon);

// The five-step generation flow for one image: prefilter at every alpha,
// encode originals and candidates at the base QP, crop reconstructions to
// patches, select per patch, and assemble the output from the prefiltered
// (not reconstructed) images. Deterministic given options and provider.
struct GenResult {
  PlanarImage trainingImage;
  std::vector<PatchRecord> patches;
};

GenResult generate_training_image(const PlanarImage& img, const std::string& imageId,
                                  const GenOptions& opts, const IqaProvider& iqa);

struct ManifestImage {
  std::string id;
  std::string sourcePath;  // original pixels, as given at generation time
  std::string outputFile;  // training image, relative to the manifest
  int width = 0;
  int height = 0;
  std::vector<PatchRecord> patches;
};

struct DatasetManifest {
  std::string toolVersion;
  std::string codecId;  // "surrogate" or "external"
  int qp = 27;
  int patchSize = 64;
  std::vector<double> alphaSet;
  std::string configHash;
  std::vector<ManifestImage> images;
};

// JSON round trip with sorted keys and stable number formatting. Reading
// validates that every patch of every image appears exactly once and that
// smooth patches respect the MAE gate.
void write_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest read_manifest(const std::string& path);

// Directory-level run: loads .pgm/.y4m images from inDir (sorted by name),
// writes <stem>.train.pgm|.y4m plus manifest.json into outDir.
struct GenRunOptions {
  std::string inDir;
  std::string outDir;
  GenOptions gen;
  std::string iqa = "proxy";  // "proxy" or "file:<csv>"
  std::string configHash;
};

struct GenRunSummary {
  int imageCount = 0;
  int patchCount = 0;
  double meanChosenAlpha = 0.0;
  std::string manifestPath;
};

GenRunSummary gen_dataset_run(const GenRunOptions& opts);

std::unique_ptr<IqaProvider> make_provider_from_spec(const std::string& spec);

}  // namespace iqn
