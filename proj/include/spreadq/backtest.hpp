#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spreadq/env.hpp"
#include "spreadq/observation.hpp"

namespace spreadq {

struct MetricsConfig {
    double risk_free_daily = 0.000085;
    int trading_days_per_year = 252;
};

// (mean - R_f) / population stdev
double sharpe_ratio(std::span<const double> returns, const MetricsConfig& cfg = {});
// prod(1 + R)^(days_per_year / n) - 1
double annualized_return(std::span<const double> returns, const MetricsConfig& cfg = {});
// Same quantity from an equity curve whose first entry is the starting value.
double annualized_return_from_equity(std::span<const double> equity, const MetricsConfig& cfg = {});
double max_drawdown(std::span<const double> equity);
// population stdev * sqrt(days_per_year)
double annualized_volatility(std::span<const double> returns, const MetricsConfig& cfg = {});

struct TradingActivity {
    double ahd = 0.0;  // mean holding days per trade
    int tt = 0;        // trade count
    double abd = 0.0;  // mean flat days between consecutive trades
};

// A trade is a maximal run of one nonzero action; a sign flip closes one
// trade and opens the next.
TradingActivity trading_activity(std::span<const Action> actions);

// Table column order.
inline constexpr std::array<const char*, 7> kMetricNames = {"SR", "AR", "MDD", "AV", "AHD", "TT", "ABD"};

struct Metrics {
    double sr = 0.0;
    double ar = 0.0;
    double mdd = 0.0;
    double av = 0.0;
    double ahd = 0.0;
    double tt = 0.0;
    double abd = 0.0;

    std::array<double, 7> values() const { return {sr, ar, mdd, av, ahd, tt, abd}; }
    bool operator==(const Metrics&) const = default;
};

// SR is reported as 0 when the returns have no dispersion (e.g. a policy
// that never trades).
Metrics compute_metrics(const Rollout& rollout, const MetricsConfig& cfg = {});

struct RollingReport {
    int index = 0;
    bool ok = true;
    std::string failure;  // reason when !ok
    DateRange train{};
    DateRange validation{};
    DateRange test{};
    Metrics metrics;
    std::vector<int> actions;
    std::vector<double> equity;
    std::string trace_path;  // relative to the report directory

    bool operator==(const RollingReport&) const = default;
};

struct MetricSummary {
    double mean = 0.0;
    double std = 0.0;

    bool operator==(const MetricSummary&) const = default;
};

struct BacktestReport {
    std::string config_hash;
    std::string method;
    std::vector<RollingReport> rollings;
    std::array<MetricSummary, 7> aggregate{};  // kMetricNames order
    int completed = 0;

    bool operator==(const BacktestReport&) const = default;
};

// Per-metric mean and sample stdev over the successful rollings.
BacktestReport aggregate(std::string config_hash, std::string method, std::vector<RollingReport> rollings);

std::string report_to_json(const BacktestReport& report);
BacktestReport report_from_json(const std::string& text);
BacktestReport load_report(const std::filesystem::path& path);

// "mean ± std" table with two decimals; AR, MDD and AV in percent.
std::string aggregate_csv(const BacktestReport& report);
void write_trace_csv(const std::filesystem::path& path, std::span<const TraceRow> trace);

// Writes report.json and aggregate.csv into `dir`.
void render_report(const BacktestReport& report, const std::filesystem::path& dir);

}  // namespace spreadq
