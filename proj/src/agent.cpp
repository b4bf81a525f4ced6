#include "spreadq/agent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "spreadq/error.hpp"

namespace spreadq {

double EpsilonSchedule::at(long step, long total_steps) const {
    const double span = decay_fraction * static_cast<double>(total_steps);
    if (span <= 0.0) return end;
    const double frac = std::min(1.0, static_cast<double>(step) / span);
    return start + (end - start) * frac;
}

void AgentConfig::validate() const {
    auto bad = [](const std::string& m) { fail(ErrorCode::ConfigError, m); };
    if (!(gamma >= 0.0 && gamma <= 1.0)) bad("gamma must lie in [0, 1]");
    if (!(lr > 0.0)) bad("lr must be > 0");
    if (!(epsilon.start >= epsilon.end && epsilon.end >= 0.0 && epsilon.start <= 1.0)) {
        bad("epsilon must satisfy 1 >= start >= end >= 0");
    }
    if (!(epsilon.decay_fraction >= 0.0 && epsilon.decay_fraction <= 1.0)) bad("epsilon decay fraction must lie in [0, 1]");
    if (target_sync_every < 1) bad("target_sync_every must be >= 1");
    if (replay_capacity < 1) bad("replay_capacity must be >= 1");
    if (batch < 1) bad("batch must be >= 1");
    if (subseq_len < 1) bad("subseq_len must be >= 1");
    if (episodes_per_rolling < 0) bad("episodes_per_rolling must be >= 0");
    if (episode_days < 2) bad("episode_days must be >= 2");
    if (warmup_episodes < 1) bad("warmup_episodes must be >= 1");
    if (validate_every < 1) bad("validate_every must be >= 1");
    if (!(reward_scale > 0.0)) bad("reward_scale must be > 0");
    if (!(grad_clip >= 0.0)) bad("grad_clip must be >= 0");
    if (!(reward.alpha >= 0.0)) bad("reward alpha must be >= 0");
}

std::size_t greedy_slot(const nn::QValues& q) {
    std::size_t best = action_slot(Action::Clear);
    for (Action a : {Action::Long, Action::Short}) {
        const std::size_t s = action_slot(a);
        if (q(static_cast<Eigen::Index>(s)) > q(static_cast<Eigen::Index>(best))) best = s;
    }
    return best;
}

Action greedy_action(const nn::QValues& q) {
    return action_from_slot(greedy_slot(q));
}

Action select_action(std::span<const Observation> window, const nn::QNetwork& net, double epsilon,
                     std::mt19937_64& rng) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) fail(ErrorCode::InvalidArgument, "epsilon must lie in [0, 1]");
    if (epsilon > 0.0) {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        if (coin(rng) < epsilon) {
            std::uniform_int_distribution<std::size_t> pick(0, kNumActions - 1);
            return action_from_slot(pick(rng));
        }
    }
    return greedy_action(net.q_values(window));
}

namespace {

void check_compatible(const nn::QNetwork& a, const nn::QNetwork& b) {
    if (!(a.config() == b.config()) || a.size() != b.size()) {
        fail(ErrorCode::ShapeMismatch, "online and target networks differ in shape");
    }
}

// Windows shared between neighbouring transitions are evaluated once.
using WindowKey = std::pair<const Observation*, std::size_t>;

WindowKey key_of(std::span<const Observation> w) {
    return {w.data(), w.size()};
}

}  // namespace

std::vector<double> ddqn_targets(std::span<const Transition> batch, const nn::QNetwork& online,
                                 const nn::QNetwork& target, double gamma) {
    check_compatible(online, target);
    std::map<WindowKey, std::size_t> choice;
    std::vector<double> y(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Transition& t = batch[i];
        y[i] = t.reward;
        if (t.done || gamma == 0.0) continue;
        const WindowKey k = key_of(t.next);
        auto it = choice.find(k);
        if (it == choice.end()) it = choice.emplace(k, greedy_slot(online.q_values(t.next))).first;
        y[i] += gamma * target.q_values(t.next)(static_cast<Eigen::Index>(it->second));
    }
    return y;
}

double td_loss(std::span<const Transition> batch, const nn::QNetwork& online, std::span<const double> y,
               nn::Flat* grad) {
    if (batch.empty()) fail(ErrorCode::InvalidArgument, "td batch is empty");
    if (y.size() != batch.size()) fail(ErrorCode::ShapeMismatch, "one target per transition required");
    const double n = static_cast<double>(batch.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Transition& t = batch[i];
        const auto slot = static_cast<Eigen::Index>(action_slot(t.action));
        if (grad) {
            const nn::ForwardRecord rec = online.forward(t.state);
            const double err = rec.q(slot) - y[i];
            loss += err * err;
            nn::QValues dq = nn::QValues::Zero();
            dq(slot) = 2.0 * err / n;
            online.backward(rec, dq, *grad);
        } else {
            const double err = online.q_values(t.state)(slot) - y[i];
            loss += err * err;
        }
    }
    return loss / n;
}

double td_update(std::span<const Transition> batch, nn::QNetwork& online, const nn::QNetwork& target,
                 nn::Adam& optimizer, const AgentConfig& cfg) {
    if (batch.empty()) fail(ErrorCode::InvalidArgument, "td batch is empty");
    check_compatible(online, target);
    // within a subsequence the next window of one transition is the state
    // window of the following one, so online evaluations are shared
    std::vector<nn::ForwardRecord> records;
    records.reserve(batch.size());
    std::map<WindowKey, std::size_t> state_index;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        records.push_back(online.forward(batch[i].state));
        state_index.emplace(key_of(batch[i].state), i);
    }
    std::vector<double> y(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Transition& t = batch[i];
        y[i] = t.reward;
        if (t.done || cfg.gamma == 0.0) continue;
        const auto it = state_index.find(key_of(t.next));
        const nn::QValues q_next = it != state_index.end() ? records[it->second].q : online.q_values(t.next);
        y[i] += cfg.gamma * target.q_values(t.next)(static_cast<Eigen::Index>(greedy_slot(q_next)));
    }

    const double n = static_cast<double>(batch.size());
    nn::Flat grad = online.zero_grad();
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto slot = static_cast<Eigen::Index>(action_slot(batch[i].action));
        const double err = records[i].q(slot) - y[i];
        loss += err * err;
        nn::QValues dq = nn::QValues::Zero();
        dq(slot) = 2.0 * err / n;
        online.backward(records[i], dq, grad);
    }
    loss /= n;
    if (!std::isfinite(loss) || !grad.allFinite()) {
        std::ostringstream msg;
        msg << "non-finite TD loss " << loss << " after " << optimizer.steps() << " optimizer steps";
        fail(ErrorCode::NonFiniteLoss, msg.str());
    }
    if (cfg.grad_clip > 0.0) {
        const double norm = grad.norm();
        if (norm > cfg.grad_clip) grad *= cfg.grad_clip / norm;
    }
    optimizer.step(online.params(), grad);
    return loss;
}

void sync_target(const nn::QNetwork& online, nn::QNetwork& target) {
    target = online;
}

namespace {

EpisodeRecord collect_episode(TradingEnv& env, std::size_t first, std::size_t last, const nn::QNetwork& net,
                              const AgentConfig& cfg, std::size_t window, long& global_step, long total_steps,
                              std::mt19937_64& rng, std::vector<double>& returns) {
    env.reset_days(first, last);
    EpisodeRecord rec;
    rec.obs = env.window(window);
    rec.context = rec.obs.size() - 1;
    returns.clear();
    for (std::size_t k = 0; !env.done(); ++k) {
        const double eps = cfg.epsilon.at(global_step, total_steps);
        const Action a = select_action(rec.window(k, window), net, eps, rng);
        StepResult res = env.step(a);
        returns.push_back(res.step_profit);
        rec.actions.push_back(a);
        rec.rewards.push_back(cfg.reward_scale * per_step_reward(returns, cfg.reward));
        rec.obs.push_back(res.observation);
        ++global_step;
    }
    return rec;
}

}  // namespace

TrainResult train(const RollingSplit& rolling, const PairSeries& pair, const NormalizedPrices& features,
                  const AgentConfig& cfg, const EnvConfig& env_cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    nn::QNetwork online(cfg.model);
    online.init(rng);

    TrainResult result;
    result.params = online;
    if (cfg.episodes_per_rolling == 0) return result;

    const auto [lo, hi] = pair.index_range(rolling.train);
    if (lo == PairSeries::npos || hi - lo + 1 < 2) {
        fail(ErrorCode::RangeOutOfBounds, "training range " + format_range(rolling.train) + " covers fewer than 2 days");
    }
    const std::size_t days = std::min<std::size_t>(static_cast<std::size_t>(cfg.episode_days), hi - lo + 1);
    std::uniform_int_distribution<std::size_t> start_dist(lo, hi + 1 - days);

    const auto [vlo, vhi] = pair.index_range(rolling.validation);
    const bool can_validate = vlo != PairSeries::npos && vhi > vlo;

    const auto window = static_cast<std::size_t>(env_cfg.window_days);
    const long total_steps = static_cast<long>(cfg.episodes_per_rolling) * static_cast<long>(days - 1);

    nn::QNetwork target = online;
    nn::Adam optimizer(online.size(), nn::AdamConfig{.lr = cfg.lr});
    ReplayBuffer replay(static_cast<std::size_t>(cfg.replay_capacity));
    TradingEnv env(pair, features, env_cfg);

    long global_step = 0;
    long grad_steps = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    std::vector<double> returns;
    std::vector<Transition> batch;

    for (int episode = 1; episode <= cfg.episodes_per_rolling; ++episode) {
        const std::size_t first = start_dist(rng);
        EpisodeRecord rec =
            collect_episode(env, first, first + days - 1, online, cfg, window, global_step, total_steps, rng, returns);
        const std::size_t steps = rec.steps();

        TrainingLogRow row;
        row.episode = episode;
        row.steps = global_step;
        row.epsilon = cfg.epsilon.at(global_step, total_steps);
        row.train_objective = episode_objective(returns, cfg.reward);
        row.val_objective = std::numeric_limits<double>::quiet_NaN();
        row.mean_loss = std::numeric_limits<double>::quiet_NaN();
        replay.add(std::move(rec));

        if (replay.size() >= static_cast<std::size_t>(cfg.warmup_episodes)) {
            double loss_sum = 0.0;
            for (std::size_t u = 0; u < steps; ++u) {
                batch.clear();
                for (int b = 0; b < cfg.batch; ++b) {
                    const Subsequence s = replay.sample(static_cast<std::size_t>(cfg.subseq_len), rng);
                    for (std::size_t k = 0; k < s.length; ++k) batch.push_back(replay.transition(s, k, window));
                }
                loss_sum += td_update(batch, online, target, optimizer, cfg);
                if (++grad_steps % cfg.target_sync_every == 0) sync_target(online, target);
            }
            row.mean_loss = loss_sum / static_cast<double>(steps);
        }

        if (can_validate && (episode % cfg.validate_every == 0 || episode == cfg.episodes_per_rolling)) {
            const Rollout val = evaluate(online, rolling.validation, pair, features, env_cfg);
            row.val_objective = risk_aware_objective(val.returns, cfg.reward.alpha);
            if (row.val_objective > best_val) {
                best_val = row.val_objective;
                result.best_episode = episode;
                result.best_val_objective = best_val;
                result.params = online;
            }
        }
        result.log.push_back(row);
    }
    if (!can_validate) result.params = online;
    return result;
}

Rollout evaluate(const nn::QNetwork& params, const DateRange& range, const PairSeries& pair,
                 const NormalizedPrices& features, const EnvConfig& env_cfg) {
    TradingEnv env(pair, features, env_cfg);
    env.reset(range);
    const auto window = static_cast<std::size_t>(env_cfg.window_days);
    while (!env.done()) {
        const std::vector<Observation> w = env.window(window);
        env.step(greedy_action(params.q_values(w)));
    }
    return collect_rollout(env);
}

void write_training_log(const std::filesystem::path& path, std::span<const TrainingLogRow> log) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
    auto num = [](double v) -> std::string {
        if (std::isnan(v)) return "";
        std::ostringstream s;
        s.precision(17);
        s << v;
        return s.str();
    };
    out << "episode,steps,epsilon,mean_loss,train_objective,val_objective\n";
    for (const auto& r : log) {
        out << r.episode << ',' << r.steps << ',' << num(r.epsilon) << ',' << num(r.mean_loss) << ','
            << num(r.train_objective) << ',' << num(r.val_objective) << '\n';
    }
    if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

}  // namespace spreadq
