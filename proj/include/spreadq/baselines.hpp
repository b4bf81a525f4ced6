#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spreadq/agent.hpp"
#include "spreadq/marketdata.hpp"
#include "spreadq/observation.hpp"

namespace spreadq {

// Buy-and-hold: `direction` every day, clear on the final day.
std::vector<Action> bah_policy(Action direction, std::size_t horizon);

// Log spread statistics fitted on a training range:
// spread = ln p_x - beta ln p_y, z = (spread - mean) / stdev.
struct SpreadModel {
    double beta = 1.0;
    double mean = 0.0;
    double stdev = 1.0;
};

struct CpmConfig {
    double open_threshold = 1.0;
    double stop_threshold = 2.0;

    void validate() const;
};

SpreadModel fit_spread(const PairSeries& pair, const DateRange& train);
std::vector<double> spread_zscores(const PairSeries& pair, const DateRange& range, const SpreadModel& model);

// Threshold rule on a z-score path (one action per day).
//  flat:       open short when open < z <= stop, long when -stop <= z < -open
//  positioned: clear when z changes sign or hits 0, when |z| > stop, or on
//              the final day
//  after a stop-loss the position stays flat until z crosses 0 again
std::vector<Action> cpm_actions(std::span<const double> z, const CpmConfig& cfg);

std::vector<Action> cpm_policy(const PairSeries& pair, const DateRange& test, const SpreadModel& model,
                               const CpmConfig& cfg);

// The profit-maximizing perceptron baseline.
AgentConfig mlp_rl_config(AgentConfig base);

}  // namespace spreadq
