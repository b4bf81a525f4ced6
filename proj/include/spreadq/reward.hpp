#pragma once

#include <span>
#include <string>

namespace spreadq {

enum class RewardMode { RiskAware, ProfitOnly };

struct RewardConfig {
    RewardMode mode = RewardMode::RiskAware;
    double alpha = 0.5;
};

RewardMode parse_reward_mode(const std::string& s);
std::string to_string(RewardMode m);

// prod(1 + R_t); 1 for an empty list.
double cumulative_profit(std::span<const double> returns);

// Second-order expansion of ln(1+r) around 0: r - r^2/2.
double quadratic_utility(double r);

// mean(R) - alpha * population variance(R).
double risk_aware_objective(std::span<const double> returns, double alpha);

// Training reward for the latest return in `returns_so_far`.
//   risk-aware:  S_t - S_{t-1}, S_t = objective of the first t returns, S_0 = 0
//   profit-only: ln(1 + R_t)
// Summed over an episode both telescope to the episodic objective.
double per_step_reward(std::span<const double> returns_so_far, const RewardConfig& cfg);

// Episodic score matching the per-step rewards of `cfg`:
// risk_aware_objective or ln(cumulative_profit).
double episode_objective(std::span<const double> returns, const RewardConfig& cfg);

}  // namespace spreadq
