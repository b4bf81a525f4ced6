#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "spreadq/env.hpp"
#include "spreadq/marketdata.hpp"
#include "spreadq/nn/adam.hpp"
#include "spreadq/nn/qnet.hpp"
#include "spreadq/replay.hpp"
#include "spreadq/reward.hpp"

namespace spreadq {

struct EpsilonSchedule {
    double start = 1.0;
    double end = 0.05;
    double decay_fraction = 0.5;  // share of all environment steps spent decaying

    double at(long step, long total_steps) const;
};

struct AgentConfig {
    double gamma = 0.99;
    double lr = 1e-3;
    EpsilonSchedule epsilon;
    int target_sync_every = 100;
    int replay_capacity = 64;
    int batch = 16;
    int subseq_len = 40;
    int episodes_per_rolling = 300;
    int episode_days = 63;
    int warmup_episodes = 5;
    int validate_every = 10;
    double reward_scale = 1.0;
    double grad_clip = 0.0;  // global norm; 0 disables
    nn::ModelConfig model;
    RewardConfig reward;
    std::uint64_t seed = 7;

    void validate() const;
};

// Index of the best action: ties prefer clear, then long.
std::size_t greedy_slot(const nn::QValues& q);
Action greedy_action(const nn::QValues& q);

Action select_action(std::span<const Observation> window, const nn::QNetwork& net, double epsilon,
                     std::mt19937_64& rng);

std::vector<double> ddqn_targets(std::span<const Transition> batch, const nn::QNetwork& online,
                                 const nn::QNetwork& target, double gamma);

// Mean squared error of Q_online(o_t, a_t) against fixed targets `y`.
// Accumulates dL/dparams into `grad` when given.
double td_loss(std::span<const Transition> batch, const nn::QNetwork& online, std::span<const double> y,
               nn::Flat* grad);

// One optimizer step on the DDQN loss; returns the loss before the step.
double td_update(std::span<const Transition> batch, nn::QNetwork& online, const nn::QNetwork& target,
                 nn::Adam& optimizer, const AgentConfig& cfg);

void sync_target(const nn::QNetwork& online, nn::QNetwork& target);

struct TrainingLogRow {
    int episode = 0;
    long steps = 0;
    double epsilon = 0.0;
    double mean_loss = 0.0;  // NaN when no update ran
    double train_objective = 0.0;
    double val_objective = 0.0;  // NaN when not validated
};

struct TrainResult {
    nn::QNetwork params;
    std::vector<TrainingLogRow> log;
    int best_episode = 0;  // 0 when no validation ran
    double best_val_objective = 0.0;
};

TrainResult train(const RollingSplit& rolling, const PairSeries& pair, const NormalizedPrices& features,
                  const AgentConfig& cfg, const EnvConfig& env_cfg);

// Greedy rollout over `range` as one episode.
Rollout evaluate(const nn::QNetwork& params, const DateRange& range, const PairSeries& pair,
                 const NormalizedPrices& features, const EnvConfig& env_cfg);

void write_training_log(const std::filesystem::path& path, std::span<const TrainingLogRow> log);

}  // namespace spreadq
