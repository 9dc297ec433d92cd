#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "core/codec.hpp"
#include "core/dataset.hpp"
#include "core/jnd.hpp"
#include "core/train.hpp"

namespace iqn {

// JSON config handling. Every *_from_json starts from the defaults and
// applies only the keys present, so configs can be partial. Canonical dumps
// drive the config hash that every CLI run prints for replay.

JndConfig jnd_config_from_json(const nlohmann::json& j);
nlohmann::json jnd_config_to_json(const JndConfig& cfg);

CodecConfig codec_config_from_json(const nlohmann::json& j);
nlohmann::json codec_config_to_json(const CodecConfig& cfg);

TrainConfig train_config_from_json(const nlohmann::json& j);
nlohmann::json train_config_to_json(const TrainConfig& cfg);

GenOptions gen_options_from_json(const nlohmann::json& j);
nlohmann::json gen_options_to_json(const GenOptions& o);

nlohmann::json load_json_file(const std::string& path);

// "0.3" or "0.1..1.0:0.1" (inclusive endpoints).
std::vector<double> parse_alpha_set(const std::string& spec);
// "22,27,32,37"
std::vector<int> parse_qp_list(const std::string& spec);
// "surrogate" or "external:CMD" (command split on spaces).
CodecConfig parse_codec_spec(const std::string& spec, int qp);

// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

}  // namespace iqn
