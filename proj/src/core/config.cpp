#include "core/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace iqn {

using nlohmann::json;

namespace {

void expect_object(const json& j, const char* what) {
  if (!j.is_object())
    throw ConfigError(std::string(what) + " config must be a JSON object");
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad config value for '") + key + "': " + e.what());
    }
  }
}

}  // namespace

JndConfig jnd_config_from_json(const json& j) {
  expect_object(j, "jnd");
  JndConfig cfg;
  maybe(j, "alpha", cfg.alpha);
  maybe(j, "alpha_set", cfg.alphaSet);
  maybe(j, "overlap", cfg.overlap);
  maybe(j, "edge_preserve", cfg.edgePreserve);
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    if (!w.is_array() || w.size() != 8)
      throw ConfigError("weights must be an 8x8 array");
    for (int u = 0; u < 8; ++u) {
      const auto& row = w.at(u);
      if (!row.is_array() || row.size() != 8)
        throw ConfigError("weights must be an 8x8 array");
      for (int v = 0; v < 8; ++v)
        cfg.weights.w[u * 8 + v] = row.at(v).get<double>();
    }
  }
  if (j.contains("base")) {
    const auto& b = j.at("base");
    expect_object(b, "base");
    maybe(b, "c0", cfg.base.c0);
    maybe(b, "gamma", cfg.base.gamma);
    maybe(b, "kappa", cfg.base.kappa);
  }
  if (j.contains("canny")) {
    const auto& c = j.at("canny");
    expect_object(c, "canny");
    double sigma = cfg.cannyMain.sigma;
    maybe(c, "sigma", sigma);
    cfg.cannyMain.sigma = cfg.cannyDetail.sigma = sigma;
    if (c.contains("main")) {
      auto v = c.at("main").get<std::vector<double>>();
      if (v.size() != 2)
        throw ConfigError("canny.main must be [low, high]");
      cfg.cannyMain.low = v[0];
      cfg.cannyMain.high = v[1];
    }
    if (c.contains("detail")) {
      auto v = c.at("detail").get<std::vector<double>>();
      if (v.size() != 2)
        throw ConfigError("canny.detail must be [low, high]");
      cfg.cannyDetail.low = v[0];
      cfg.cannyDetail.high = v[1];
    }
    maybe(c, "dilate", cfg.dilate);
  }
  cfg.validate();
  return cfg;
}

json jnd_config_to_json(const JndConfig& cfg) {
  json w = json::array();
  for (int u = 0; u < 8; ++u) {
    json row = json::array();
    for (int v = 0; v < 8; ++v)
      row.push_back(cfg.weights.w[u * 8 + v]);
    w.push_back(row);
  }
  return json{{"alpha", cfg.alpha},
              {"alpha_set", cfg.alphaSet},
              {"overlap", cfg.overlap},
              {"edge_preserve", cfg.edgePreserve},
              {"weights", w},
              {"base", {{"c0", cfg.base.c0}, {"gamma", cfg.base.gamma}, {"kappa", cfg.base.kappa}}},
              {"canny",
               {{"sigma", cfg.cannyMain.sigma},
                {"main", {cfg.cannyMain.low, cfg.cannyMain.high}},
                {"detail", {cfg.cannyDetail.low, cfg.cannyDetail.high}},
                {"dilate", cfg.dilate}}}};
}

CodecConfig codec_config_from_json(const json& j) {
  expect_object(j, "codec");
  CodecConfig cfg;
  maybe(j, "qp", cfg.qp);
  std::string id = "surrogate";
  maybe(j, "id", id);
  if (id == "surrogate") {
    cfg.codec = CodecKind::Surrogate;
  } else if (id == "external") {
    cfg.codec = CodecKind::External;
    maybe(j, "command", cfg.externalCommand);
  } else {
    throw ConfigError("codec id must be surrogate or external");
  }
  cfg.validate();
  return cfg;
}

json codec_config_to_json(const CodecConfig& cfg) {
  json j{{"qp", cfg.qp},
         {"id", cfg.codec == CodecKind::Surrogate ? "surrogate" : "external"}};
  if (cfg.codec == CodecKind::External)
    j["command"] = cfg.externalCommand;
  return j;
}

TrainConfig train_config_from_json(const json& j) {
  expect_object(j, "train");
  TrainConfig cfg;
  maybe(j, "batch_size", cfg.batchSize);
  maybe(j, "patch_size", cfg.patchSize);
  maybe(j, "epochs", cfg.epochs);
  maybe(j, "steps_per_epoch", cfg.stepsPerEpoch);
  maybe(j, "lr0", cfg.lr0);
  maybe(j, "lr_halve_every_epochs", cfg.lrHalveEveryEpochs);
  maybe(j, "adam_beta1", cfg.adamBeta1);
  maybe(j, "adam_beta2", cfg.adamBeta2);
  maybe(j, "adam_eps", cfg.adamEps);
  maybe(j, "seed", cfg.seed);
  maybe(j, "channels", cfg.channels);
  maybe(j, "threads", cfg.threads);
  if (j.contains("loss")) {
    std::string loss = j.at("loss").get<std::string>();
    if (loss == "mse")
      cfg.loss = LossKind::Mse;
    else if (loss == "l1")
      cfg.loss = LossKind::L1;
    else
      throw ConfigError("loss must be mse or l1");
  }
  cfg.validate();
  return cfg;
}

json train_config_to_json(const TrainConfig& cfg) {
  return json{{"batch_size", cfg.batchSize},
              {"patch_size", cfg.patchSize},
              {"epochs", cfg.epochs},
              {"steps_per_epoch", cfg.stepsPerEpoch},
              {"lr0", cfg.lr0},
              {"lr_halve_every_epochs", cfg.lrHalveEveryEpochs},
              {"adam_beta1", cfg.adamBeta1},
              {"adam_beta2", cfg.adamBeta2},
              {"adam_eps", cfg.adamEps},
              {"seed", cfg.seed},
              {"channels", cfg.channels},
              {"threads", cfg.threads},
              {"loss", cfg.loss == LossKind::Mse ? "mse" : "l1"}};
}

GenOptions gen_options_from_json(const json& j) {
  expect_object(j, "gen");
  GenOptions o;
  maybe(j, "qp", o.qp);
  maybe(j, "patch_size", o.patchSize);
  maybe(j, "smooth_threshold", o.smoothThreshold);
  maybe(j, "epsilon", o.epsilon);
  if (j.contains("codec"))
    o.codec = codec_config_from_json(j.at("codec"));
  o.codec.qp = o.qp;
  if (j.contains("jnd"))
    o.jnd = jnd_config_from_json(j.at("jnd"));
  o.validate();
  return o;
}

json gen_options_to_json(const GenOptions& o) {
  return json{{"qp", o.qp},
              {"patch_size", o.patchSize},
              {"smooth_threshold", o.smoothThreshold},
              {"epsilon", o.epsilon},
              {"codec", codec_config_to_json(o.codec)},
              {"jnd", jnd_config_to_json(o.jnd)}};
}

json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f)
    throw IoError("cannot open config: " + path);
  try {
    json j;
    f >> j;
    return j;
  } catch (const json::exception& e) {
    throw ParseError("config " + path + ": " + e.what());
  }
}

std::vector<double> parse_alpha_set(const std::string& spec) {
  auto dots = spec.find("..");
  if (dots == std::string::npos) {
    std::vector<double> out;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        out.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError("bad alpha value '" + tok + "'");
      }
    }
    if (out.empty())
      throw ConfigError("empty alpha set");
    return out;
  }
  auto colon = spec.find(':', dots);
  if (colon == std::string::npos)
    throw ConfigError("alpha range must look like 0.1..1.0:0.1");
  try {
    double lo = std::stod(spec.substr(0, dots));
    double hi = std::stod(spec.substr(dots + 2, colon - dots - 2));
    double step = std::stod(spec.substr(colon + 1));
    if (step <= 0 || hi < lo)
      throw ConfigError("bad alpha range");
    std::vector<double> out;
    for (int i = 0;; ++i) {
      double v = lo + i * step;
      if (v > hi + step * 1e-9)
        break;
      out.push_back(std::min(v, hi));
    }
    return out;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("bad alpha range '" + spec + "'");
  }
}

std::vector<int> parse_qp_list(const std::string& spec) {
  std::vector<int> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw ConfigError("bad qp value '" + tok + "'");
    }
  }
  if (out.empty())
    throw ConfigError("empty qp list");
  return out;
}

CodecConfig parse_codec_spec(const std::string& spec, int qp) {
  CodecConfig cfg;
  cfg.qp = qp;
  if (spec == "surrogate") {
    cfg.codec = CodecKind::Surrogate;
  } else if (spec.rfind("external:", 0) == 0) {
    cfg.codec = CodecKind::External;
    std::stringstream ss(spec.substr(9));
    std::string tok;
    while (ss >> tok)
      cfg.externalCommand.push_back(tok);
  } else {
    throw ConfigError("codec must be surrogate or external:CMD");
  }
  cfg.validate();
  return cfg;
}

std::string config_hash(const json& j) {
  std::string s = j.dump();
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace iqn
