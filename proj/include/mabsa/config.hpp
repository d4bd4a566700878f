#pragma once

#include "mabsa/model.hpp"
#include "mabsa/pipeline.hpp"
#include "mabsa/synth.hpp"

#include <json.hpp>

#include <filesystem>

namespace mabsa::config {

// Config files are JSON objects. Missing keys keep their defaults; unknown keys
// are rejected so that typos surface as errors.

nlohmann::json to_json(const synth::SynthConfig& c);
synth::SynthConfig synth_config_from_json(const nlohmann::json& j);
synth::SynthConfig load_synth_config(const std::filesystem::path& path);

nlohmann::json to_json(const model::ModelConfig& c);
model::ModelConfig model_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const pipeline::RunConfig& c);
pipeline::RunConfig run_config_from_json(const nlohmann::json& j);
pipeline::RunConfig load_run_config(const std::filesystem::path& path);

/// Config, vocabulary, image dimension and every named tensor.
void save_model(model::Model& m, const std::filesystem::path& path);
model::Model load_model(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);

} // namespace mabsa::config
