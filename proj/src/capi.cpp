#include "iqnet/iqnet.h"

#include <cstring>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "core/config.hpp"
#include "core/dataset.hpp"
#include "core/eval.hpp"
#include "core/image_io.hpp"
#include "core/train.hpp"
#include "core/version.hpp"

using nlohmann::json;

struct iqn_image_s {
  iqn::PlanarImage img;
};

struct iqn_model_s {
  iqn::IqnetModel model;
  std::string configHash;
};

struct iqn_scores_s {
  iqn::ScoreTable table;
};

namespace {

thread_local std::string g_lastError;

iqn_status status_of(iqn::ErrorKind kind) {
  switch (kind) {
    case iqn::ErrorKind::Io: return IQN_E_IO;
    case iqn::ErrorKind::Parse: return IQN_E_PARSE;
    case iqn::ErrorKind::Dimension: return IQN_E_DIMENSION;
    case iqn::ErrorKind::Tiling: return IQN_E_TILING;
    case iqn::ErrorKind::Config: return IQN_E_CONFIG;
    case iqn::ErrorKind::Selection: return IQN_E_SELECTION;
    case iqn::ErrorKind::MissingScore: return IQN_E_MISSING_SCORE;
    case iqn::ErrorKind::ExternalCodec: return IQN_E_EXTERNAL_CODEC;
    case iqn::ErrorKind::ModelFormat: return IQN_E_MODEL_FORMAT;
    case iqn::ErrorKind::Internal: return IQN_E_INTERNAL;
  }
  return IQN_E_INTERNAL;
}

template <typename Fn>
iqn_status guarded(Fn&& fn) {
  try {
    fn();
    return IQN_OK;
  } catch (const iqn::Error& e) {
    g_lastError = e.what();
    return status_of(e.kind());
  } catch (const json::exception& e) {
    g_lastError = e.what();
    return IQN_E_PARSE;
  } catch (const std::exception& e) {
    g_lastError = e.what();
    return IQN_E_INTERNAL;
  }
}

iqn_status invalid_argument(const char* what) {
  g_lastError = what;
  return IQN_E_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json parse_options(const char* options_json, const char* what) {
  if (options_json == nullptr || options_json[0] == '\0')
    return json::object();
  json j = json::parse(options_json, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw iqn::ParseError(std::string(what) + ": options must be a JSON object");
  return j;
}

json patch_records_json(const std::vector<iqn::PatchRecord>& records) {
  json arr = json::array();
  for (const auto& p : records) {
    json pj;
    pj["x"] = p.x;
    pj["y"] = p.y;
    pj["smooth"] = p.smooth;
    pj["orig_score"] = p.origScore;
    pj["chosen_alpha"] = p.chosenAlpha;
    json maeJ = json::object(), scoreJ = json::object();
    for (const auto& [a, v] : p.maeByAlpha)
      maeJ[iqn::alpha_tag(a)] = v;
    for (const auto& [a, v] : p.scoreByAlpha)
      scoreJ[iqn::alpha_tag(a)] = v;
    pj["mae"] = maeJ;
    pj["scores"] = scoreJ;
    arr.push_back(pj);
  }
  return arr;
}

iqn::GenOptions gen_options_from_options(const json& j) {
  iqn::GenOptions opts;
  if (j.contains("gen")) {
    opts = iqn::gen_options_from_json(j.at("gen"));
  } else {
    json g = json::object();
    if (j.contains("qp"))
      g["qp"] = j.at("qp");
    if (j.contains("codec"))
      g["codec"] = j.at("codec");
    if (j.contains("jnd"))
      g["jnd"] = j.at("jnd");
    if (j.contains("patch_size"))
      g["patch_size"] = j.at("patch_size");
    if (j.contains("smooth_threshold"))
      g["smooth_threshold"] = j.at("smooth_threshold");
    if (j.contains("epsilon"))
      g["epsilon"] = j.at("epsilon");
    if (g.contains("codec") && !g.at("codec").contains("qp") && g.contains("qp"))
      g.at("codec")["qp"] = g.at("qp");
    opts = iqn::gen_options_from_json(g);
  }
  if (j.contains("alphas"))
    opts.jnd.alphaSet = iqn::parse_alpha_set(j.at("alphas").get<std::string>());
  opts.jnd.validate();
  return opts;
}

}  // namespace

extern "C" {

const char* iqn_version(void) {
  return iqn::kVersion;
}

const char* iqn_status_name(iqn_status status) {
  switch (status) {
    case IQN_OK: return "ok";
    case IQN_E_IO: return "io-error";
    case IQN_E_PARSE: return "parse-error";
    case IQN_E_DIMENSION: return "dimension-error";
    case IQN_E_TILING: return "tiling-error";
    case IQN_E_CONFIG: return "config-error";
    case IQN_E_SELECTION: return "selection-error";
    case IQN_E_MISSING_SCORE: return "missing-score-error";
    case IQN_E_EXTERNAL_CODEC: return "external-codec-error";
    case IQN_E_MODEL_FORMAT: return "model-format-error";
    case IQN_E_INVALID_ARGUMENT: return "invalid-argument";
    case IQN_E_INTERNAL: return "internal-error";
  }
  return "unknown";
}

const char* iqn_last_error(void) {
  return g_lastError.c_str();
}

void iqn_string_free(char* s) {
  std::free(s);
}

iqn_status iqn_image_load(const char* path, const char* format, int width, int height,
                          int frame_index, iqn_image** out) {
  if (!path || !out)
    return invalid_argument("iqn_image_load: path and out are required");
  return guarded([&]() {
    iqn::FileFormat fmt;
    if (format && *format) {
      fmt = iqn::parse_format_name(format);
    } else {
      auto guess = iqn::format_from_path(path);
      if (!guess)
        throw iqn::ConfigError(std::string("cannot infer format from path: ") + path);
      fmt = *guess;
    }
    iqn::LoadOptions opts;
    opts.width = width;
    opts.height = height;
    opts.frameIndex = frame_index;
    *out = new iqn_image_s{iqn::load_image(path, fmt, opts)};
  });
}

iqn_status iqn_image_save(const iqn_image* img, const char* path, const char* format) {
  if (!img || !path)
    return invalid_argument("iqn_image_save: img and path are required");
  return guarded([&]() {
    iqn::FileFormat fmt;
    if (format && *format) {
      fmt = iqn::parse_format_name(format);
    } else {
      auto guess = iqn::format_from_path(path);
      if (!guess)
        throw iqn::ConfigError(std::string("cannot infer format from path: ") + path);
      fmt = *guess;
    }
    iqn::save_image(img->img, path, fmt);
  });
}

iqn_status iqn_image_from_luma(const uint8_t* luma, int width, int height, iqn_image** out) {
  if (!luma || !out)
    return invalid_argument("iqn_image_from_luma: luma and out are required");
  return guarded([&]() {
    iqn::PlanarImage img = iqn::PlanarImage::makeYOnly(width, height);
    std::memcpy(img.y.data(), luma, img.y.size());
    img.validate();
    *out = new iqn_image_s{std::move(img)};
  });
}

void iqn_image_free(iqn_image* img) {
  delete img;
}

int iqn_image_width(const iqn_image* img) {
  return img ? img->img.width : 0;
}

int iqn_image_height(const iqn_image* img) {
  return img ? img->img.height : 0;
}

int iqn_image_has_chroma(const iqn_image* img) {
  return img && img->img.hasChroma() ? 1 : 0;
}

const uint8_t* iqn_image_luma(const iqn_image* img) {
  return img ? img->img.y.data() : nullptr;
}

iqn_status iqn_mae(const iqn_image* a, const iqn_image* b, double* out) {
  if (!a || !b || !out)
    return invalid_argument("iqn_mae: a, b and out are required");
  return guarded([&]() { *out = iqn::mae_luma(a->img, b->img); });
}

iqn_status iqn_psnr(const iqn_image* a, const iqn_image* b, double* out) {
  if (!a || !b || !out)
    return invalid_argument("iqn_psnr: a, b and out are required");
  return guarded([&]() { *out = iqn::psnr(a->img, b->img); });
}

iqn_status iqn_blockiness(const iqn_image* img, double* out) {
  if (!img || !out)
    return invalid_argument("iqn_blockiness: img and out are required");
  return guarded([&]() { *out = iqn::blockiness(img->img); });
}

iqn_status iqn_prefilter(const iqn_image* img, const char* options_json, double alpha,
                         iqn_image** out) {
  if (!img || !out)
    return invalid_argument("iqn_prefilter: img and out are required");
  return guarded([&]() {
    json j = parse_options(options_json, "iqn_prefilter");
    iqn::JndConfig cfg = j.contains("jnd") ? iqn::jnd_config_from_json(j.at("jnd"))
                                           : iqn::jnd_config_from_json(j);
    cfg.alpha = alpha;
    *out = new iqn_image_s{iqn::prefilter(img->img, cfg)};
  });
}

iqn_status iqn_encode(const iqn_image* img, const char* codec_json, iqn_image** recon,
                      uint64_t* bits) {
  if (!img || !recon || !bits)
    return invalid_argument("iqn_encode: img, recon and bits are required");
  return guarded([&]() {
    json j = parse_options(codec_json, "iqn_encode");
    iqn::CodecConfig cfg = j.empty() ? iqn::CodecConfig{} : iqn::codec_config_from_json(j);
    iqn::CodecResult res = iqn::encode(img->img, cfg);
    *bits = res.bits;
    *recon = new iqn_image_s{std::move(res.reconstructed)};
  });
}

iqn_status iqn_iqa_proxy_score(const iqn_image* patch, double* out) {
  if (!patch || !out)
    return invalid_argument("iqn_iqa_proxy_score: patch and out are required");
  return guarded(
      [&]() { *out = iqn::proxy_score(patch->img.y, patch->img.width, patch->img.height); });
}

iqn_status iqn_scores_load(const char* csv_path, iqn_scores** out, int* duplicate_count) {
  if (!csv_path || !out)
    return invalid_argument("iqn_scores_load: csv_path and out are required");
  return guarded([&]() {
    iqn::ScoreTable table = iqn::file_scores(csv_path);
    if (duplicate_count)
      *duplicate_count = table.duplicateCount;
    *out = new iqn_scores_s{std::move(table)};
  });
}

void iqn_scores_free(iqn_scores* scores) {
  delete scores;
}

iqn_status iqn_generate_training_image(const iqn_image* img, const char* image_id,
                                       const char* options_json, const iqn_scores* scores,
                                       iqn_image** out, char** records_json) {
  if (!img || !image_id || !out)
    return invalid_argument("iqn_generate_training_image: img, image_id and out are required");
  return guarded([&]() {
    json j = parse_options(options_json, "iqn_generate_training_image");
    iqn::GenOptions opts = gen_options_from_options(j);
    std::unique_ptr<iqn::IqaProvider> provider =
        scores ? iqn::make_file_provider(scores->table) : iqn::make_proxy_provider();
    iqn::GenResult res = iqn::generate_training_image(img->img, image_id, opts, *provider);
    if (records_json)
      *records_json = dup_string(patch_records_json(res.patches).dump());
    *out = new iqn_image_s{std::move(res.trainingImage)};
  });
}

iqn_status iqn_gen_dataset_run(const char* options_json, char** summary_json) {
  if (!options_json)
    return invalid_argument("iqn_gen_dataset_run: options_json is required");
  return guarded([&]() {
    json j = parse_options(options_json, "iqn_gen_dataset_run");
    iqn::GenRunOptions opts;
    if (!j.contains("in_dir") || !j.contains("out_dir"))
      throw iqn::ConfigError("gen-dataset options need in_dir and out_dir");
    opts.inDir = j.at("in_dir").get<std::string>();
    opts.outDir = j.at("out_dir").get<std::string>();
    opts.gen = gen_options_from_options(j);
    if (j.contains("iqa"))
      opts.iqa = j.at("iqa").get<std::string>();
    opts.configHash = iqn::config_hash(iqn::gen_options_to_json(opts.gen));
    iqn::GenRunSummary s = iqn::gen_dataset_run(opts);
    if (summary_json) {
      json sj{{"images", s.imageCount},
              {"patches", s.patchCount},
              {"mean_chosen_alpha", s.meanChosenAlpha},
              {"manifest", s.manifestPath},
              {"config_hash", opts.configHash}};
      *summary_json = dup_string(sj.dump());
    }
  });
}

iqn_status iqn_model_load(const char* path, iqn_model** out) {
  if (!path || !out)
    return invalid_argument("iqn_model_load: path and out are required");
  return guarded([&]() {
    auto* m = new iqn_model_s;
    m->model = iqn::load_model(path, &m->configHash);
    *out = m;
  });
}

iqn_status iqn_model_save(const iqn_model* model, const char* path) {
  if (!model || !path)
    return invalid_argument("iqn_model_save: model and path are required");
  return guarded([&]() { iqn::save_model(model->model, path, model->configHash); });
}

void iqn_model_free(iqn_model* model) {
  delete model;
}

iqn_status iqn_model_info(const iqn_model* model, char** info_json) {
  if (!model || !info_json)
    return invalid_argument("iqn_model_info: model and info_json are required");
  return guarded([&]() {
    json j{{"channels", model->model.channels},
           {"parameters", iqn::parameter_count(model->model.channels)},
           {"macs_per_pixel", iqn::macs_per_pixel(model->model.channels)},
           {"config_hash", model->configHash}};
    *info_json = dup_string(j.dump());
  });
}

iqn_status iqn_model_apply(const iqn_model* model, const iqn_image* img, iqn_image** out) {
  if (!model || !img || !out)
    return invalid_argument("iqn_model_apply: model, img and out are required");
  return guarded([&]() { *out = new iqn_image_s{iqn::apply_model(model->model, img->img)}; });
}

iqn_status iqn_train_run(const char* options_json, iqn_model** out, char** log_json) {
  if (!options_json || !out)
    return invalid_argument("iqn_train_run: options_json and out are required");
  return guarded([&]() {
    json j = parse_options(options_json, "iqn_train_run");
    if (!j.contains("manifest"))
      throw iqn::ConfigError("train options need a manifest path");
    std::string manifestPath = j.at("manifest").get<std::string>();
    std::filesystem::path datasetDir =
        j.contains("dataset_dir") ? std::filesystem::path(j.at("dataset_dir").get<std::string>())
                                  : std::filesystem::path(manifestPath).parent_path();

    iqn::TrainConfig cfg =
        j.contains("train") ? iqn::train_config_from_json(j.at("train")) : iqn::TrainConfig{};

    iqn::DatasetManifest manifest = iqn::read_manifest(manifestPath);
    std::vector<iqn::TrainPair> pairs;
    pairs.reserve(manifest.images.size());
    for (const auto& mi : manifest.images) {
      iqn::TrainPair pair;
      auto srcFmt = iqn::format_from_path(mi.sourcePath);
      if (!srcFmt)
        throw iqn::ConfigError("cannot infer format of source image " + mi.sourcePath);
      pair.original = iqn::load_image(mi.sourcePath, *srcFmt);
      std::string outPath = (datasetDir / mi.outputFile).string();
      auto outFmt = iqn::format_from_path(outPath);
      if (!outFmt)
        throw iqn::ConfigError("cannot infer format of training image " + outPath);
      pair.target = iqn::load_image(outPath, *outFmt);
      pairs.push_back(std::move(pair));
    }

    std::vector<iqn::TrainLogEntry> log;
    iqn::IqnetModel trained = iqn::train(pairs, cfg, &log);
    auto* m = new iqn_model_s;
    m->model = std::move(trained);
    m->configHash = iqn::config_hash(iqn::train_config_to_json(cfg));
    *out = m;
    if (log_json) {
      json lj = json::array();
      for (const auto& e : log)
        lj.push_back({{"step", e.step}, {"lr", e.lr}, {"loss", e.loss}});
      *log_json = dup_string(lj.dump());
    }
  });
}

iqn_status iqn_eval_run(const char* options_json, char** report_json) {
  if (!options_json)
    return invalid_argument("iqn_eval_run: options_json is required");
  return guarded([&]() {
    json j = parse_options(options_json, "iqn_eval_run");
    if (!j.contains("corpus_dir") || !j.contains("model"))
      throw iqn::ConfigError("eval options need corpus_dir and model");
    iqn::IqnetModel model = iqn::load_model(j.at("model").get<std::string>());
    std::vector<iqn::EvalInput> corpus = iqn::load_corpus(j.at("corpus_dir").get<std::string>());
    iqn::EvalOptions opts;
    if (j.contains("qps"))
      opts.qps = j.at("qps").get<std::vector<int>>();
    if (j.contains("codec"))
      opts.codec = iqn::codec_config_from_json(j.at("codec"));
    if (j.contains("jobs"))
      opts.jobs = j.at("jobs").get<int>();
    iqn::RunReport report = iqn::eval_run(model, corpus, opts);
    std::string hash = iqn::config_hash(j);
    if (j.contains("out_csv"))
      iqn::write_report_csv(report, j.at("out_csv").get<std::string>());
    if (j.contains("out_json"))
      iqn::write_report_json(report, j.at("out_json").get<std::string>(), hash);
    if (report_json) {
      json rj{{"failures", report.failures},
              {"rows", report.rows.size()},
              {"config_hash", hash},
              {"aggregate",
               {{"bitrate_saving_pct",
                 {{"min", report.savingPct.min},
                  {"mean", report.savingPct.mean},
                  {"max", report.savingPct.max}}},
                {"psnr_drop",
                 {{"min", report.psnrDrop.min},
                  {"mean", report.psnrDrop.mean},
                  {"max", report.psnrDrop.max}}}}}};
      *report_json = dup_string(rj.dump());
    }
    if (report.failures == static_cast<int>(report.rows.size()))
      throw iqn::IoError("every evaluation row failed");
  });
}

iqn_status iqn_config_hash(const char* options_json, char** hash) {
  if (!options_json || !hash)
    return invalid_argument("iqn_config_hash: options_json and hash are required");
  return guarded([&]() {
    json j = parse_options(options_json, "iqn_config_hash");
    *hash = dup_string(iqn::config_hash(j));
  });
}

}  // extern "C"
