#include "spreadq/baselines.hpp"

#include <cmath>

#include "spreadq/error.hpp"
#include "spreadq/pairselect.hpp"

namespace spreadq {

std::vector<Action> bah_policy(Action direction, std::size_t horizon) {
    if (horizon < 1) fail(ErrorCode::InvalidArgument, "horizon must be >= 1");
    if (direction == Action::Clear) fail(ErrorCode::InvalidArgument, "buy-and-hold direction must be long or short");
    std::vector<Action> out(horizon, direction);
    out.back() = Action::Clear;
    return out;
}

void CpmConfig::validate() const {
    if (!(open_threshold > 0.0 && open_threshold < stop_threshold)) {
        fail(ErrorCode::ConfigError, "CPM thresholds must satisfy 0 < open < stop");
    }
}

SpreadModel fit_spread(const PairSeries& pair, const DateRange& train) {
    const auto [lo, hi] = pair.index_range(train);
    if (lo == PairSeries::npos) fail(ErrorCode::RangeOutOfBounds, "no data in " + format_range(train));
    std::vector<double> lx, ly;
    for (std::size_t i = lo; i <= hi; ++i) {
        lx.push_back(std::log(pair.x()[i].close));
        ly.push_back(std::log(pair.y()[i].close));
    }
    SpreadModel m;
    m.beta = ols_hedge(lx, ly).beta;
    double sum = 0.0;
    std::vector<double> s(lx.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = lx[i] - m.beta * ly[i];
        sum += s[i];
    }
    m.mean = sum / static_cast<double>(s.size());
    double ss = 0.0;
    for (double v : s) ss += (v - m.mean) * (v - m.mean);
    m.stdev = std::sqrt(ss / static_cast<double>(s.size()));
    // round-off level dispersion counts as none
    if (!(m.stdev > 1e-12 * (1.0 + std::abs(m.mean)))) {
        fail(ErrorCode::DegenerateSpread, "spread has zero dispersion on " + format_range(train));
    }
    return m;
}

std::vector<double> spread_zscores(const PairSeries& pair, const DateRange& range, const SpreadModel& model) {
    if (!(model.stdev > 0.0)) fail(ErrorCode::DegenerateSpread, "spread stdev must be > 0");
    const auto [lo, hi] = pair.index_range(range);
    if (lo == PairSeries::npos) fail(ErrorCode::RangeOutOfBounds, "no data in " + format_range(range));
    std::vector<double> z;
    z.reserve(hi - lo + 1);
    for (std::size_t i = lo; i <= hi; ++i) {
        const double s = std::log(pair.x()[i].close) - model.beta * std::log(pair.y()[i].close);
        z.push_back((s - model.mean) / model.stdev);
    }
    return z;
}

namespace {

int sign_of(double v) {
    return (v > 0.0) - (v < 0.0);
}

}  // namespace

std::vector<Action> cpm_actions(std::span<const double> z, const CpmConfig& cfg) {
    cfg.validate();
    std::vector<Action> out(z.size(), Action::Clear);
    Action held = Action::Clear;
    int entry_sign = 0;
    int stopped_sign = 0;  // sign of z at the last stop-loss, 0 when not blocked
    for (std::size_t t = 0; t < z.size(); ++t) {
        const double v = z[t];
        const int s = sign_of(v);
        const bool last = t + 1 == z.size();
        if (held != Action::Clear) {
            if (std::abs(v) > cfg.stop_threshold && s == entry_sign) {
                held = Action::Clear;
                stopped_sign = s;
            } else if (s != entry_sign) {
                held = Action::Clear;
            }
        } else {
            if (stopped_sign != 0 && s != stopped_sign) stopped_sign = 0;
            if (stopped_sign == 0 && std::abs(v) > cfg.open_threshold && std::abs(v) <= cfg.stop_threshold) {
                held = v > 0.0 ? Action::Short : Action::Long;
                entry_sign = s;
            }
        }
        if (last) held = Action::Clear;
        out[t] = held;
    }
    return out;
}

std::vector<Action> cpm_policy(const PairSeries& pair, const DateRange& test, const SpreadModel& model,
                               const CpmConfig& cfg) {
    return cpm_actions(spread_zscores(pair, test, model), cfg);
}

AgentConfig mlp_rl_config(AgentConfig base) {
    base.model.encoder = nn::EncoderKind::Feedforward;
    base.reward.mode = RewardMode::ProfitOnly;
    return base;
}

}  // namespace spreadq
