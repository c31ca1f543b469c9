#pragma once

// Flat run configuration. Every key of CorpusSpec, LossConfig, ReplayConfig
// and the training settings lives at the top level of one JSON object.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chronoqa/harness.hpp"

namespace chronoqa {

struct ConfigKey {
    std::string name;
    std::string help;
    nlohmann::json default_value;
};

/// All recognized keys with their defaults, sorted by name.
std::vector<ConfigKey> config_keys();

/// Sorted flat object holding every key.
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Starts from the defaults; unknown keys and ill-typed values throw
/// ValidationError. The result is validated.
ExperimentConfig config_from_json(const nlohmann::json& doc);

/// `value` is read as JSON and, failing that, as a plain string.
void apply_override(nlohmann::json& doc, std::string_view key, std::string_view value);

/// CHRONOQA_NOW_YEAR, when set, replaces now_year.
void apply_environment(nlohmann::json& doc);

/// Canonical serialization: sorted keys, no whitespace.
std::string canonical_config(const ExperimentConfig& cfg);

/// 16 hex digits of FNV-1a over the canonical serialization.
std::string config_hash(const ExperimentConfig& cfg);

std::string hex64(std::uint64_t v);

}  // namespace chronoqa
