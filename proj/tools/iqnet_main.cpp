// iqnet command-line front end. Talks to the core exclusively through the
// public C API; everything here is flag parsing and option-JSON assembly.

#include <cinttypes>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "iqnet/iqnet.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CliError {
  std::string message;
};

[[noreturn]] void fail(const std::string& msg) {
  throw CliError{msg};
}

void check(iqn_status status, const std::string& what) {
  if (status != IQN_OK)
    fail(what + ": [" + iqn_status_name(status) + "] " + iqn_last_error());
}

std::string take_string(char* s) {
  std::string out = s ? s : "";
  iqn_string_free(s);
  return out;
}

void print_run_line(const std::string& command, json summary) {
  char* hash = nullptr;
  check(iqn_config_hash(summary.dump().c_str(), &hash), "config hash");
  summary["command"] = command;
  summary["config_hash"] = take_string(hash);
  std::printf("%s\n", summary.dump().c_str());
}

struct ImageHandle {
  iqn_image* img = nullptr;
  ~ImageHandle() { iqn_image_free(img); }
};

struct ModelHandle {
  iqn_model* model = nullptr;
  ~ModelHandle() { iqn_model_free(model); }
};

// Shared --in/--format/--width/--height/--frame handling.
struct InputFlags {
  std::string path;
  std::string format;
  int width = 0;
  int height = 0;
  int frame = 0;

  void attach(CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("--in", path, "input image (.pgm, .y4m, .yuv/.i420)");
    if (required)
      opt->required();
    cmd->add_option("--format", format, "input format override: pgm|i420|y4m");
    cmd->add_option("--width", width, "frame width (raw I420 input)");
    cmd->add_option("--height", height, "frame height (raw I420 input)");
    cmd->add_option("--frame", frame, "frame index (Y4M input)");
  }

  iqn_image* load() const {
    iqn_image* img = nullptr;
    check(iqn_image_load(path.c_str(), format.empty() ? nullptr : format.c_str(), width, height,
                         frame, &img),
          "load " + path);
    return img;
  }
};

// JND/prefilter flags shared by prefilter and gen-dataset.
struct JndFlags {
  std::string configPath;
  bool noOverlap = false;
  bool noEdgePreserve = false;
  double cannySigma = -1;
  std::string cannyMain, cannyDetail;
  int edgeDilate = -1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", configPath, "JSON config file (flags override it)");
    cmd->add_flag("--no-overlap", noOverlap, "disable boundary overlap");
    cmd->add_flag("--no-edge-preserve", noEdgePreserve, "disable minor-edge restoration");
    cmd->add_option("--canny-sigma", cannySigma, "Gaussian sigma for both edge detectors");
    cmd->add_option("--canny-main", cannyMain, "main detector thresholds low,high");
    cmd->add_option("--canny-detail", cannyDetail, "detail detector thresholds low,high");
    cmd->add_option("--edge-dilate", edgeDilate, "minor-edge dilation radius (0 disables)");
  }

  static json parse_pair(const std::string& spec, const char* what) {
    auto comma = spec.find(',');
    if (comma == std::string::npos)
      fail(std::string(what) + " expects low,high");
    try {
      return json::array(
          {std::stod(spec.substr(0, comma)), std::stod(spec.substr(comma + 1))});
    } catch (const std::exception&) {
      fail(std::string(what) + " expects numeric low,high");
    }
  }

  // Builds the "jnd" options block: config file first, flags on top.
  json merged() const {
    json j = json::object();
    if (!configPath.empty()) {
      std::ifstream f(configPath);
      if (!f)
        fail("cannot open config: " + configPath);
      try {
        f >> j;
      } catch (const std::exception& e) {
        fail("config " + configPath + ": " + e.what());
      }
      if (j.contains("jnd"))
        j = j.at("jnd");
    }
    if (noOverlap)
      j["overlap"] = false;
    if (noEdgePreserve)
      j["edge_preserve"] = false;
    json canny = j.contains("canny") ? j.at("canny") : json::object();
    if (cannySigma > 0)
      canny["sigma"] = cannySigma;
    if (!cannyMain.empty())
      canny["main"] = parse_pair(cannyMain, "--canny-main");
    if (!cannyDetail.empty())
      canny["detail"] = parse_pair(cannyDetail, "--canny-detail");
    if (edgeDilate >= 0)
      canny["dilate"] = edgeDilate;
    if (!canny.empty())
      j["canny"] = canny;
    return j;
  }
};

json codec_block(const std::string& spec, int qp) {
  json codec{{"qp", qp}};
  if (spec == "surrogate") {
    codec["id"] = "surrogate";
  } else if (spec.rfind("external:", 0) == 0) {
    codec["id"] = "external";
    json cmd = json::array();
    std::string rest = spec.substr(9);
    size_t pos = 0;
    while (pos < rest.size()) {
      size_t space = rest.find(' ', pos);
      if (space == std::string::npos)
        space = rest.size();
      if (space > pos)
        cmd.push_back(rest.substr(pos, space - pos));
      pos = space + 1;
    }
    if (cmd.empty())
      fail("external codec needs a command after external:");
    codec["command"] = cmd;
  } else {
    fail("--codec must be surrogate or external:CMD");
  }
  return codec;
}

int cmd_prefilter(const InputFlags& in, const JndFlags& jnd, const std::string& outPath,
                  double alpha) {
  ImageHandle src;
  src.img = in.load();
  json options{{"jnd", jnd.merged()}};
  ImageHandle filtered;
  check(iqn_prefilter(src.img, options.dump().c_str(), alpha, &filtered.img), "prefilter");
  check(iqn_image_save(filtered.img, outPath.c_str(), nullptr), "save " + outPath);
  print_run_line("prefilter",
                 json{{"in", in.path}, {"out", outPath}, {"alpha", alpha}, {"jnd", options["jnd"]}});
  return kExitOk;
}

int cmd_gen_dataset(const std::string& inDir, const std::string& outDir, int qp,
                    const std::string& alphas, const std::string& iqa, const std::string& codec,
                    const JndFlags& jnd) {
  json options{{"in_dir", inDir}, {"out_dir", outDir},   {"qp", qp},
               {"alphas", alphas}, {"iqa", iqa},          {"codec", codec_block(codec, qp)},
               {"jnd", jnd.merged()}};
  char* summary = nullptr;
  check(iqn_gen_dataset_run(options.dump().c_str(), &summary), "gen-dataset");
  json s = json::parse(take_string(summary));
  s["options"] = options;
  print_run_line("gen-dataset", s);
  return kExitOk;
}

int cmd_train(const std::string& datasetDir, const std::string& manifest,
              const std::string& outPath, json trainBlock, const std::string& logPath) {
  json options{{"manifest", manifest}, {"train", trainBlock}};
  if (!datasetDir.empty())
    options["dataset_dir"] = datasetDir;
  ModelHandle model;
  char* log = nullptr;
  check(iqn_train_run(options.dump().c_str(), &model.model, logPath.empty() ? nullptr : &log),
        "train");
  check(iqn_model_save(model.model, outPath.c_str()), "save model " + outPath);
  if (!logPath.empty()) {
    std::ofstream f(logPath, std::ios::trunc);
    if (!f)
      fail("cannot write loss log: " + logPath);
    f << take_string(log) << "\n";
  }
  char* info = nullptr;
  check(iqn_model_info(model.model, &info), "model info");
  json summary{{"model", outPath}, {"info", json::parse(take_string(info))}, {"options", options}};
  print_run_line("train", summary);
  return kExitOk;
}

int cmd_infer(const InputFlags& in, const std::string& modelPath, const std::string& outPath) {
  ModelHandle model;
  check(iqn_model_load(modelPath.c_str(), &model.model), "load model " + modelPath);
  ImageHandle src;
  src.img = in.load();
  ImageHandle out;
  check(iqn_model_apply(model.model, src.img, &out.img), "apply model");
  check(iqn_image_save(out.img, outPath.c_str(), nullptr), "save " + outPath);
  print_run_line("infer", json{{"in", in.path}, {"out", outPath}, {"model", modelPath}});
  return kExitOk;
}

int cmd_eval(const std::string& corpusDir, const std::string& modelPath, const std::string& qps,
             const std::string& codec, const std::string& outCsv, const std::string& outJson,
             int jobs) {
  json qpArr = json::array();
  size_t pos = 0;
  while (pos <= qps.size()) {
    size_t comma = qps.find(',', pos);
    if (comma == std::string::npos)
      comma = qps.size();
    try {
      qpArr.push_back(std::stoi(qps.substr(pos, comma - pos)));
    } catch (const std::exception&) {
      fail("--qps expects a comma-separated integer list");
    }
    pos = comma + 1;
  }
  json options{{"corpus_dir", corpusDir}, {"model", modelPath}, {"qps", qpArr},
               {"codec", codec_block(codec, qpArr.empty() ? 27 : qpArr[0].get<int>())},
               {"jobs", jobs}};
  if (!outCsv.empty())
    options["out_csv"] = outCsv;
  if (!outJson.empty())
    options["out_json"] = outJson;
  char* report = nullptr;
  check(iqn_eval_run(options.dump().c_str(), &report), "eval");
  json r = json::parse(take_string(report));
  r["options"] = options;
  print_run_line("eval", r);
  return kExitOk;
}

// Surrogate codec runner; doubles as the reference external-encoder adapter
// (it reads {in}, writes the reconstruction to {out} and prints bits=N).
int cmd_encode(const InputFlags& in, const std::string& outPath, int qp) {
  ImageHandle src;
  src.img = in.load();
  json codec{{"id", "surrogate"}, {"qp", qp}};
  ImageHandle recon;
  uint64_t bits = 0;
  check(iqn_encode(src.img, codec.dump().c_str(), &recon.img, &bits), "encode");
  check(iqn_image_save(recon.img, outPath.c_str(), nullptr), "save " + outPath);
  std::printf("bits=%" PRIu64 "\n", bits);
  print_run_line("encode", json{{"in", in.path}, {"out", outPath}, {"qp", qp}, {"bits", bits}});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IQNet JND prefiltering toolkit"};
  app.set_version_flag("--version", iqn_version());
  app.require_subcommand(1);

  // prefilter
  auto* pre = app.add_subcommand("prefilter", "apply the JND prefilter to one image");
  InputFlags preIn;
  preIn.attach(pre);
  JndFlags preJnd;
  preJnd.attach(pre);
  std::string preOut;
  double preAlpha = 1.0;
  pre->add_option("--out", preOut, "output image path")->required();
  pre->add_option("--alpha", preAlpha, "JND scale factor")->required();

  // gen-dataset
  auto* gen = app.add_subcommand("gen-dataset", "generate IQA-selected training images");
  std::string genIn, genOut, genAlphas = "0.1..1.0:0.1", genIqa = "proxy", genCodec = "surrogate";
  int genQp = 27;
  JndFlags genJnd;
  gen->add_option("--in", genIn, "directory of source images (.pgm/.y4m)")->required();
  gen->add_option("--out", genOut, "output directory")->required();
  gen->add_option("--qp", genQp, "base QP for candidate reconstruction");
  gen->add_option("--alphas", genAlphas, "candidate scales, list or lo..hi:step");
  gen->add_option("--iqa", genIqa, "IQA provider: proxy or file:PATH");
  gen->add_option("--codec", genCodec, "codec: surrogate or external:CMD");
  genJnd.attach(gen);

  // train
  auto* tr = app.add_subcommand("train", "train the prefiltering network");
  std::string trDataset, trManifest, trOut, trLoss = "mse", trLog;
  uint64_t trSeed = 1;
  int trEpochs = 2500, trBatch = 128, trThreads = 1, trChannels = 16, trHalve = 250;
  double trLr = 1e-3;
  tr->add_option("--dataset", trDataset, "gen-dataset output directory");
  tr->add_option("--manifest", trManifest, "dataset manifest.json")->required();
  tr->add_option("--out", trOut, "output model path")->required();
  tr->add_option("--seed", trSeed, "RNG seed");
  tr->add_option("--loss", trLoss, "training loss: mse or l1");
  tr->add_option("--epochs", trEpochs, "optimizer steps (one step per epoch)");
  tr->add_option("--batch", trBatch, "patches per step");
  tr->add_option("--lr", trLr, "initial learning rate");
  tr->add_option("--lr-halve-every", trHalve, "halve the rate every N epochs");
  tr->add_option("--channels", trChannels, "feature channels C");
  tr->add_option("--threads", trThreads, "intra-batch worker threads");
  tr->add_option("--log", trLog, "write the per-step loss curve JSON here");

  // infer
  auto* inf = app.add_subcommand("infer", "run the trained prefilter on one image");
  InputFlags infIn;
  infIn.attach(inf);
  std::string infModel, infOut;
  inf->add_option("--model", infModel, "model file")->required();
  inf->add_option("--out", infOut, "output image path")->required();

  // eval
  auto* ev = app.add_subcommand("eval", "rate/quality comparison against the anchor");
  std::string evCorpus, evModel, evQps = "22,27,32,37", evCodec = "surrogate";
  std::string evCsv, evJson;
  int evJobs = 1;
  ev->add_option("--corpus", evCorpus, "directory of evaluation images")->required();
  ev->add_option("--model", evModel, "model file")->required();
  ev->add_option("--qps", evQps, "comma-separated QP list");
  ev->add_option("--codec", evCodec, "codec: surrogate or external:CMD");
  ev->add_option("--out-csv", evCsv, "per-row CSV report path");
  ev->add_option("--out-json", evJson, "aggregate JSON report path");
  ev->add_option("--jobs", evJobs, "parallel image workers");

  // encode
  auto* enc = app.add_subcommand("encode", "surrogate-encode one image (prints bits=N)");
  InputFlags encIn;
  encIn.attach(enc);
  std::string encOut;
  int encQp = 27;
  enc->add_option("--out", encOut, "reconstruction output path")->required();
  enc->add_option("--qp", encQp, "quantization parameter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (pre->parsed())
      return cmd_prefilter(preIn, preJnd, preOut, preAlpha);
    if (gen->parsed())
      return cmd_gen_dataset(genIn, genOut, genQp, genAlphas, genIqa, genCodec, genJnd);
    if (tr->parsed()) {
      if (trLoss != "mse" && trLoss != "l1")
        fail("--loss must be mse or l1");
      json trainBlock{{"seed", trSeed},   {"loss", trLoss},         {"epochs", trEpochs},
                      {"batch_size", trBatch}, {"lr0", trLr},       {"channels", trChannels},
                      {"threads", trThreads},  {"lr_halve_every_epochs", trHalve}};
      return cmd_train(trDataset, trManifest, trOut, trainBlock, trLog);
    }
    if (inf->parsed())
      return cmd_infer(infIn, infModel, infOut);
    if (ev->parsed())
      return cmd_eval(evCorpus, evModel, evQps, evCodec, evCsv, evJson, evJobs);
    if (enc->parsed())
      return cmd_encode(encIn, encOut, encQp);
  } catch (const CliError& e) {
    std::fprintf(stderr, "iqnet: %s\n", e.message.c_str());
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "iqnet: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
