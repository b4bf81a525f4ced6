#pragma once

#include <span>
#include <vector>

#include "spreadq/marketdata.hpp"
#include "spreadq/observation.hpp"

namespace spreadq {

struct EnvConfig {
    double cost = 0.001;  // per unit of position change
    int window_days = 60;
    double initial_net = 1.0;
};

struct StepResult {
    Observation observation;
    double step_profit = 0.0;
    bool done = false;
};

// One row of an episode trace.
struct TraceRow {
    Date date;
    Action action = Action::Clear;
    double r_x = 0.0;
    double r_y = 0.0;
    double step_profit = 0.0;
    double net_value = 1.0;
};

// Hedged profit of one day: the position held over the day earns the return
// spread, and a change of position pays `c` per unit.
//   a_prev * (r_x - r_y) - c * |a_now - a_prev|
double step_profit(Action a_prev, Action a_now, double r_x, double r_y, double c);

// Trading environment over one pair. Holds references to the pair and its
// normalized features; both must outlive the environment.
//
// Timing: on day t the agent chooses a_t from prices up to t. The switch from
// a_{t-1} to a_t pays its cost immediately and a_t earns the return spread of
// day t+1, so step(a_t) books R_{t+1} = a_t (r_x - r_y)_{t+1} - c |a_t - a_{t-1}|
// and advances to t+1. An episode over T days yields T-1 returns; positions
// still open on the final day are closed without further cost.
class TradingEnv {
public:
    TradingEnv(const PairSeries& pair, const NormalizedPrices& features, EnvConfig cfg);

    Observation reset(const DateRange& episode_range);
    Observation reset_days(std::size_t first_day, std::size_t last_day);
    StepResult step(Action action);

    bool done() const { return started_ && day_ == last_day_; }
    std::size_t day() const { return day_; }
    std::size_t first_day() const { return first_day_; }
    std::size_t last_day() const { return last_day_; }
    const AccountFeatures& account() const { return account_; }
    double net_value() const { return net_; }

    // Per-day profits R_t of a finished episode (length = days - 1).
    const std::vector<double>& episode_returns() const;
    // Net value after each day of the episode, starting with the initial net.
    const std::vector<double>& equity() const { return equity_; }
    // Positions chosen so far (one per completed step).
    const std::vector<Action>& actions() const { return actions_; }

    // Observations of the last `length` days up to and including the current
    // day. Days before the episode start carry the flat starting account.
    std::vector<Observation> window(std::size_t length) const;
    Observation observation_at(std::size_t day) const;

    std::vector<TraceRow> trace() const;

    const EnvConfig& config() const { return cfg_; }
    const PairSeries& pair() const { return *pair_; }

private:
    const PairSeries* pair_;
    const NormalizedPrices* features_;
    EnvConfig cfg_;

    bool started_ = false;
    std::size_t first_day_ = 0;
    std::size_t last_day_ = 0;
    std::size_t day_ = 0;
    double net_ = 1.0;
    AccountFeatures account_;
    std::vector<AccountFeatures> account_history_;
    std::vector<double> returns_;
    std::vector<double> equity_;
    std::vector<Action> actions_;
};

// Result of running one policy over a range as a single episode.
struct Rollout {
    std::vector<Action> actions;  // one per day; the final day is always clear
    std::vector<double> returns;  // per-day profits, days - 1 entries
    std::vector<double> equity;   // net value per day
    std::vector<TraceRow> trace;
};

// Replays a fixed action sequence (one entry per day of `range`; the last
// entry is ignored and reported as clear).
Rollout replay_actions(const PairSeries& pair, const NormalizedPrices& features, const DateRange& range,
                       std::span<const Action> actions, const EnvConfig& cfg);

// Collects the finished episode of `env`.
Rollout collect_rollout(const TradingEnv& env);

}  // namespace spreadq
