#pragma once

#include <string>
#include <vector>

#include "core/codec.hpp"
#include "core/model.hpp"

namespace iqn {

struct EvalInput {
  std::string id;
  PlanarImage image;
};

struct EvalOptions {
  std::vector<int> qps{22, 27, 32, 37};
  CodecConfig codec;  // qp field is overridden per row
  int jobs = 1;
};

struct EvalRow {
  std::string id;
  int qp = 0;
  uint64_t bitsAnchor = 0;
  uint64_t bitsFiltered = 0;
  double bitrateSavingPct = 0.0;  // 100*(anchor-filtered)/anchor
  double psnrAnchor = 0.0;        // vs the source image
  double psnrFiltered = 0.0;
  double psnrDrop = 0.0;
  double blockinessDelta = 0.0;   // filtered recon minus anchor recon
  std::string error;              // nonempty when this row failed
};

struct Aggregate {
  double min = 0.0, mean = 0.0, max = 0.0;
};

struct RunReport {
  std::vector<EvalRow> rows;  // (image, qp) order, images as given
  Aggregate savingPct, psnrDrop, blockinessDelta;
  int failures = 0;
};

// Encodes every image as-is (anchor) and after model prefiltering at every
// QP. Row order is deterministic regardless of --jobs.
RunReport eval_run(const IqnetModel& model, const std::vector<EvalInput>& images,
                   const EvalOptions& opts);

std::vector<EvalInput> load_corpus(const std::string& dir);

// Frozen CSV layout:
// id,qp,bits_anchor,bits_filtered,bitrate_saving_pct,psnr_anchor,
// psnr_filtered,psnr_drop,blockiness_delta,error
void write_report_csv(const RunReport& report, const std::string& path);
void write_report_json(const RunReport& report, const std::string& path,
                       const std::string& configHash);

}  // namespace iqn
