#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spreadq/agent.hpp"
#include "spreadq/backtest.hpp"
#include "spreadq/baselines.hpp"
#include "spreadq/env.hpp"
#include "spreadq/marketdata.hpp"

namespace spreadq {

enum class Method { Credit, CreditNoRisk, CreditNoBigru, MlpRl, Cpm, BahLong, BahShort };

Method parse_method(const std::string& s);
std::string to_string(Method m);
bool is_learned(Method m);

struct ExperimentConfig {
    std::filesystem::path data_dir;
    std::vector<std::string> universe;
    bool auto_pair = true;
    std::string pair_x;
    std::string pair_y;
    std::optional<Date> fit_first;  // pair-selection fit range; whole sample when unset
    std::optional<Date> fit_last;
    RollingSpec rolling;
    EnvConfig env;
    AgentConfig agent;  // encoder and reward mode already resolved from `method`
    std::vector<double> alpha_grid;
    MetricsConfig metrics;
    CpmConfig cpm;
    Method method = Method::Credit;
    std::uint64_t seed = 7;
    std::filesystem::path output;
    int workers = 1;

    nlohmann::json resolved;  // full tree after defaults and overrides
    std::string hash;         // over everything that can change results
};

// Default tree; every accepted key appears here.
nlohmann::json default_config();

// Applies `key=value` with a dotted key. The value is read as JSON when it
// parses, otherwise as a string.
void apply_override(nlohmann::json& tree, const std::string& assignment);

// Merges `user` into the defaults, rejecting unknown keys and type changes.
nlohmann::json merge_config(const nlohmann::json& user);

// Relative data and output paths resolve against `base_dir`; the output root
// can be replaced through SPREADQ_OUTPUT_ROOT.
ExperimentConfig resolve_config(const nlohmann::json& tree, const std::filesystem::path& base_dir);

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace spreadq
