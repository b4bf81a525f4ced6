#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "spreadq/backtest.hpp"
#include "spreadq/config.hpp"
#include "spreadq/pairselect.hpp"

namespace spreadq {

std::vector<AssetSeries> load_universe(const ExperimentConfig& cfg);

// Ranks the configured universe and writes <output>/pairs.csv (all pairs, or
// the best `top` when top > 0).
PairRanking cmd_select_pairs(const ExperimentConfig& cfg, std::size_t top, std::ostream& log);
void write_pairs_csv(const std::filesystem::path& path, const PairRanking& ranking, std::size_t top);

// Per-rolling RNG stream.
std::uint64_t rolling_seed(std::uint64_t seed, int rolling_index);

struct RollingOutcome {
    RollingReport report;
    std::vector<TraceRow> trace;
    std::vector<TrainingLogRow> training_log;
    std::optional<nn::QNetwork> params;
};

RollingOutcome run_rolling(const ExperimentConfig& cfg, const PairSeries& pair, const RollingSplit& split);

// Runs every rolling, writes report.json, aggregate.csv and one directory
// per rolling (trace.csv, plus training_log.csv and checkpoint.json for
// learned methods) under cfg.output.
BacktestReport cmd_run(const ExperimentConfig& cfg, std::ostream& log);

// Re-renders aggregate.csv from an existing report.json.
BacktestReport cmd_report(const std::filesystem::path& report_json, const std::filesystem::path& out_dir);

}  // namespace spreadq
