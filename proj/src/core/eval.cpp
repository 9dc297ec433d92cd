#include "core/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "core/image_io.hpp"

namespace iqn {

namespace {

double psnr_drop(double anchor, double filtered) {
  if (std::isinf(anchor) && std::isinf(filtered))
    return 0.0;  // both lossless
  return anchor - filtered;
}

Aggregate aggregate_of(const std::vector<EvalRow>& rows, double EvalRow::*field) {
  Aggregate a;
  bool first = true;
  double sum = 0;
  size_t n = 0;
  for (const auto& r : rows) {
    if (!r.error.empty())
      continue;
    double v = r.*field;
    if (first) {
      a.min = a.max = v;
      first = false;
    } else {
      a.min = std::min(a.min, v);
      a.max = std::max(a.max, v);
    }
    sum += v;
    ++n;
  }
  a.mean = n ? sum / static_cast<double>(n) : 0.0;
  return a;
}

}  // namespace

RunReport eval_run(const IqnetModel& model, const std::vector<EvalInput>& images,
                   const EvalOptions& opts) {
  if (images.empty())
    throw ConfigError("eval: empty corpus");
  if (opts.qps.empty())
    throw ConfigError("eval: empty QP list");

  RunReport report;
  report.rows.resize(images.size() * opts.qps.size());

  auto evalImage = [&](size_t imgIdx) {
    const EvalInput& in = images[imgIdx];
    for (size_t qi = 0; qi < opts.qps.size(); ++qi) {
      EvalRow& row = report.rows[imgIdx * opts.qps.size() + qi];
      row.id = in.id;
      row.qp = opts.qps[qi];
      try {
        PlanarImage filtered = apply_model(model, in.image);
        CodecConfig cfg = opts.codec;
        cfg.qp = row.qp;
        CodecResult anchor = encode(in.image, cfg);
        CodecResult filt = encode(filtered, cfg);
        row.bitsAnchor = anchor.bits;
        row.bitsFiltered = filt.bits;
        row.bitrateSavingPct =
            anchor.bits ? 100.0 * (static_cast<double>(anchor.bits) - static_cast<double>(filt.bits)) /
                              static_cast<double>(anchor.bits)
                        : 0.0;
        row.psnrAnchor = psnr(in.image, anchor.reconstructed);
        row.psnrFiltered = psnr(in.image, filt.reconstructed);
        row.psnrDrop = psnr_drop(row.psnrAnchor, row.psnrFiltered);
        row.blockinessDelta =
            blockiness(filt.reconstructed) - blockiness(anchor.reconstructed);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };

  int jobs = std::max(1, opts.jobs);
  if (jobs == 1 || images.size() == 1) {
    for (size_t i = 0; i < images.size(); ++i)
      evalImage(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    int n = std::min<int>(jobs, static_cast<int>(images.size()));
    for (int t = 0; t < n; ++t) {
      pool.emplace_back([&]() {
        for (size_t i = next.fetch_add(1); i < images.size(); i = next.fetch_add(1))
          evalImage(i);
      });
    }
    for (auto& th : pool)
      th.join();
  }

  for (const auto& r : report.rows)
    if (!r.error.empty())
      ++report.failures;
  report.savingPct = aggregate_of(report.rows, &EvalRow::bitrateSavingPct);
  report.psnrDrop = aggregate_of(report.rows, &EvalRow::psnrDrop);
  report.blockinessDelta = aggregate_of(report.rows, &EvalRow::blockinessDelta);
  return report;
}

std::vector<EvalInput> load_corpus(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    throw IoError("corpus directory not found: " + dir);
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file())
      continue;
    auto fmt = format_from_path(entry.path().string());
    if (fmt == FileFormat::Pgm || fmt == FileFormat::Y4m)
      paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty())
    throw IoError("no .pgm or .y4m images in " + dir);
  std::vector<EvalInput> corpus;
  corpus.reserve(paths.size());
  for (const auto& p : paths)
    corpus.push_back(EvalInput{p.stem().string(), load_image(p.string(), *format_from_path(p.string()))});
  return corpus;
}

namespace {

std::string fmt_double(double v) {
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

nlohmann::json aggregate_json(const Aggregate& a) {
  return {{"min", a.min}, {"mean", a.mean}, {"max", a.max}};
}

}  // namespace

void write_report_csv(const RunReport& report, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f)
    throw IoError("cannot write report: " + path);
  f << "id,qp,bits_anchor,bits_filtered,bitrate_saving_pct,psnr_anchor,psnr_filtered,"
       "psnr_drop,blockiness_delta,error\n";
  for (const auto& r : report.rows) {
    f << r.id << ',' << r.qp << ',' << r.bitsAnchor << ',' << r.bitsFiltered << ','
      << fmt_double(r.bitrateSavingPct) << ',' << fmt_double(r.psnrAnchor) << ','
      << fmt_double(r.psnrFiltered) << ',' << fmt_double(r.psnrDrop) << ','
      << fmt_double(r.blockinessDelta) << ',' << r.error << '\n';
  }
  if (!f)
    throw IoError("report write failed: " + path);
}

void write_report_json(const RunReport& report, const std::string& path,
                       const std::string& configHash) {
  nlohmann::json j;
  j["config_hash"] = configHash;
  j["failures"] = report.failures;
  j["aggregate"] = {{"bitrate_saving_pct", aggregate_json(report.savingPct)},
                    {"psnr_drop", aggregate_json(report.psnrDrop)},
                    {"blockiness_delta", aggregate_json(report.blockinessDelta)}};
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json rj;
    rj["id"] = r.id;
    rj["qp"] = r.qp;
    if (r.error.empty()) {
      rj["bits_anchor"] = r.bitsAnchor;
      rj["bits_filtered"] = r.bitsFiltered;
      rj["bitrate_saving_pct"] = r.bitrateSavingPct;
      rj["psnr_anchor"] = std::isinf(r.psnrAnchor) ? 1e9 : r.psnrAnchor;
      rj["psnr_filtered"] = std::isinf(r.psnrFiltered) ? 1e9 : r.psnrFiltered;
      rj["psnr_drop"] = r.psnrDrop;
      rj["blockiness_delta"] = r.blockinessDelta;
    } else {
      rj["error"] = r.error;
    }
    rows.push_back(rj);
  }
  j["rows"] = rows;
  std::ofstream f(path, std::ios::trunc);
  if (!f)
    throw IoError("cannot write report: " + path);
  f << j.dump(2) << "\n";
}

}  // namespace iqn
