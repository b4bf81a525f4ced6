#include "spreadq/reward.hpp"

#include <cmath>

#include "spreadq/error.hpp"

namespace spreadq {

RewardMode parse_reward_mode(const std::string& s) {
    if (s == "risk_aware") return RewardMode::RiskAware;
    if (s == "profit_only") return RewardMode::ProfitOnly;
    fail(ErrorCode::ConfigError, "unknown reward mode '" + s + "'");
}

std::string to_string(RewardMode m) { return m == RewardMode::RiskAware ? "risk_aware" : "profit_only"; }

double cumulative_profit(std::span<const double> returns) {
    double acc = 1.0;
    for (double r : returns) {
        if (!(r > -1.0)) fail(ErrorCode::ReturnBelowNegOne, "return " + std::to_string(r) + " <= -1");
        acc *= 1.0 + r;
    }
    return acc;
}

double quadratic_utility(double r) { return r - 0.5 * r * r; }

double risk_aware_objective(std::span<const double> returns, double alpha) {
    if (returns.empty()) fail(ErrorCode::EmptyReturns, "objective of an empty return list");
    const double n = static_cast<double>(returns.size());
    double mean = 0.0;
    for (double r : returns) mean += r;
    mean /= n;
    double var = 0.0;
    for (double r : returns) var += (r - mean) * (r - mean);
    var /= n;
    return mean - alpha * var;
}

double per_step_reward(std::span<const double> returns_so_far, const RewardConfig& cfg) {
    if (returns_so_far.empty()) fail(ErrorCode::EmptyReturns, "per-step reward needs the current return");
    if (cfg.mode == RewardMode::ProfitOnly) {
        const double r = returns_so_far.back();
        if (!(r > -1.0)) fail(ErrorCode::ReturnBelowNegOne, "return " + std::to_string(r) + " <= -1");
        return std::log1p(r);
    }
    const double now = risk_aware_objective(returns_so_far, cfg.alpha);
    const double before = returns_so_far.size() == 1
                              ? 0.0
                              : risk_aware_objective(returns_so_far.first(returns_so_far.size() - 1), cfg.alpha);
    return now - before;
}

double episode_objective(std::span<const double> returns, const RewardConfig& cfg) {
    if (cfg.mode == RewardMode::ProfitOnly) return std::log(cumulative_profit(returns));
    return risk_aware_objective(returns, cfg.alpha);
}

}  // namespace spreadq
