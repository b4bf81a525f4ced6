#include "spreadq/env.hpp"

#include <cmath>
#include <cstdlib>

#include "spreadq/error.hpp"

namespace spreadq {

Action action_from_position(int p) {
    if (p < -1 || p > 1) fail(ErrorCode::InvalidArgument, "position must be -1, 0 or +1");
    return static_cast<Action>(p);
}

const char* to_string(Action a) {
    switch (a) {
    case Action::Short: return "short";
    case Action::Clear: return "clear";
    case Action::Long: return "long";
    }
    return "?";
}

double step_profit(Action a_prev, Action a_now, double r_x, double r_y, double c) {
    const int prev = position(a_prev);
    const int now = position(a_now);
    return prev * (r_x - r_y) - c * std::abs(now - prev);
}

namespace {

AccountFeatures account_for(Action a, double net, double initial) {
    const double exposure = std::abs(position(a));
    AccountFeatures f;
    f.prev_action = a;
    f.net_ratio = net / initial;
    f.asset_ratio = net * exposure / initial;
    f.cash_ratio = net * (1.0 - exposure) / initial;
    return f;
}

}  // namespace

TradingEnv::TradingEnv(const PairSeries& pair, const NormalizedPrices& features, EnvConfig cfg)
    : pair_(&pair), features_(&features), cfg_(cfg) {
    if (features.rows.size() != pair.size()) fail(ErrorCode::ShapeMismatch, "feature rows do not match pair length");
    if (!(cfg_.cost >= 0.0)) fail(ErrorCode::InvalidArgument, "transaction cost must be >= 0");
    if (cfg_.window_days < 2) fail(ErrorCode::InvalidArgument, "window_days must be >= 2");
    if (!(cfg_.initial_net > 0.0)) fail(ErrorCode::InvalidArgument, "initial net must be > 0");
}

Observation TradingEnv::reset(const DateRange& episode_range) {
    if (episode_range.first < pair_->date(0) || pair_->date(pair_->size() - 1) < episode_range.last) {
        fail(ErrorCode::RangeOutOfBounds, "episode range " + format_range(episode_range) + " extends beyond the data");
    }
    auto [lo, hi] = pair_->index_range(episode_range);
    if (lo == PairSeries::npos || hi - lo + 1 < 2) {
        fail(ErrorCode::RangeOutOfBounds, "episode range " + format_range(episode_range) + " covers fewer than 2 days");
    }
    return reset_days(lo, hi);
}

Observation TradingEnv::reset_days(std::size_t first_day, std::size_t last_day) {
    if (first_day >= last_day || last_day >= pair_->size()) {
        fail(ErrorCode::RangeOutOfBounds, "episode days [" + std::to_string(first_day) + ", " +
                                              std::to_string(last_day) + "] invalid for " +
                                              std::to_string(pair_->size()) + " days");
    }
    started_ = true;
    first_day_ = first_day;
    last_day_ = last_day;
    day_ = first_day;
    net_ = cfg_.initial_net;
    account_ = account_for(Action::Clear, net_, cfg_.initial_net);
    account_history_.assign(1, account_);
    returns_.clear();
    equity_.assign(1, net_);
    actions_.clear();
    return observation_at(day_);
}

StepResult TradingEnv::step(Action action) {
    if (!started_) fail(ErrorCode::EpisodeNotFinished, "step before reset");
    if (done()) fail(ErrorCode::EpisodeDone, "episode already finished");

    const std::size_t next = day_ + 1;
    const double r_x = simple_return(pair_->x(), next);
    const double r_y = simple_return(pair_->y(), next);
    const double profit = position(action) * (r_x - r_y) -
                          cfg_.cost * std::abs(position(action) - position(account_.prev_action));
    const double net = net_ * (1.0 + profit);
    if (!(net > 0.0)) fail(ErrorCode::Bankrupt, "net value fell to " + std::to_string(net));

    net_ = net;
    day_ = next;
    returns_.push_back(profit);
    equity_.push_back(net_);
    actions_.push_back(action);
    account_ = account_for(action, net_, cfg_.initial_net);
    account_history_.push_back(account_);

    StepResult out;
    out.observation = observation_at(day_);
    out.step_profit = profit;
    out.done = done();
    return out;
}

const std::vector<double>& TradingEnv::episode_returns() const {
    if (!done()) fail(ErrorCode::EpisodeNotFinished, "episode still running");
    return returns_;
}

Observation TradingEnv::observation_at(std::size_t day) const {
    if (!started_ || day > day_) fail(ErrorCode::IndexOutOfRange, "observation requested beyond current day");
    Observation o;
    o.day = day;
    o.prices = features_->rows[day];
    if (day >= first_day_) {
        o.account = account_history_[day - first_day_];
    } else {
        o.account = account_for(Action::Clear, cfg_.initial_net, cfg_.initial_net);
    }
    return o;
}

std::vector<Observation> TradingEnv::window(std::size_t length) const {
    if (length == 0) fail(ErrorCode::EmptyWindow, "window length must be >= 1");
    const std::size_t first = day_ + 1 >= length ? day_ + 1 - length : 0;
    std::vector<Observation> out;
    out.reserve(day_ - first + 1);
    for (std::size_t d = first; d <= day_; ++d) out.push_back(observation_at(d));
    return out;
}

std::vector<TraceRow> TradingEnv::trace() const {
    std::vector<TraceRow> rows;
    for (std::size_t d = first_day_; d <= day_; ++d) {
        const std::size_t k = d - first_day_;
        TraceRow row;
        row.date = pair_->date(d);
        row.action = k < actions_.size() ? actions_[k] : Action::Clear;
        if (d > 0) {
            row.r_x = simple_return(pair_->x(), d);
            row.r_y = simple_return(pair_->y(), d);
        }
        row.step_profit = k == 0 ? 0.0 : returns_[k - 1];
        row.net_value = equity_[k];
        rows.push_back(row);
    }
    return rows;
}

Rollout collect_rollout(const TradingEnv& env) {
    Rollout out;
    out.actions = env.actions();
    out.actions.push_back(Action::Clear);
    out.returns = env.episode_returns();
    out.equity = env.equity();
    out.trace = env.trace();
    return out;
}

Rollout replay_actions(const PairSeries& pair, const NormalizedPrices& features, const DateRange& range,
                       std::span<const Action> actions, const EnvConfig& cfg) {
    TradingEnv env(pair, features, cfg);
    env.reset(range);
    const std::size_t days = env.last_day() - env.first_day() + 1;
    if (actions.size() != days) {
        fail(ErrorCode::LengthMismatch, "expected " + std::to_string(days) + " actions, got " +
                                            std::to_string(actions.size()));
    }
    for (std::size_t k = 0; !env.done(); ++k) env.step(actions[k]);
    return collect_rollout(env);
}

}  // namespace spreadq
