#include "spreadq/verify.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "spreadq/backtest.hpp"
#include "spreadq/baselines.hpp"
#include "spreadq/env.hpp"
#include "spreadq/error.hpp"
#include "spreadq/pairselect.hpp"
#include "spreadq/reward.hpp"
#include "spreadq/synthetic.hpp"

namespace spreadq {

std::vector<Observation> random_window(std::size_t length, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> pos(-1, 1);
    std::uniform_real_distribution<double> unit(0.5, 1.5);
    std::vector<Observation> w(length);
    for (std::size_t i = 0; i < length; ++i) {
        Observation& o = w[i];
        o.day = i;
        o.account.prev_action = action_from_position(pos(rng));
        o.account.net_ratio = unit(rng);
        const double exposure = std::abs(position(o.account.prev_action));
        o.account.asset_ratio = o.account.net_ratio * exposure;
        o.account.cash_ratio = o.account.net_ratio * (1.0 - exposure);
        for (double& p : o.prices) p = normal(rng);
    }
    return w;
}

nn::QLoss random_quadratic_loss(std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> weight(0.5, 2.0);
    const nn::QValues t(normal(rng), normal(rng), normal(rng));
    const nn::QValues w(weight(rng), weight(rng), weight(rng));
    nn::QLoss loss;
    loss.value = [t, w](const nn::QValues& q) { return 0.5 * (w.array() * (q - t).array().square()).sum(); };
    loss.gradient = [t, w](const nn::QValues& q) -> nn::QValues { return (w.array() * (q - t).array()).matrix(); };
    return loss;
}

nn::GradCheckResult gradient_check_once(const nn::ModelConfig& model, std::size_t window, std::uint64_t seed,
                                        double sign) {
    std::mt19937_64 rng(seed);
    nn::QNetwork net(model);
    net.init(rng);
    const auto w = random_window(window, rng);
    return nn::check_network_gradient(net, w, random_quadratic_loss(rng), 1e-5, sign);
}

namespace {

CheckResult check(const std::string& name, const std::function<std::string(bool&)>& body) {
    CheckResult r;
    r.name = name;
    try {
        r.passed = true;
        r.detail = body(r.passed);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    return r;
}

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
    std::vector<CheckResult> out;
    const double sign = options.corrupt_gradient ? -1.0 : 1.0;

    for (auto enc : {nn::EncoderKind::BiGruAttention, nn::EncoderKind::Feedforward}) {
        out.push_back(check("gradient/" + nn::to_string(enc), [&](bool& ok) {
            double worst = 0.0;
            for (std::uint64_t seed = 1; seed <= 3; ++seed) {
                nn::ModelConfig m{.embed_dim = 3, .hidden_dim = 6, .head_hidden = 8, .encoder = enc};
                worst = std::max(worst, gradient_check_once(m, 7, seed, sign).max_rel_error);
            }
            ok = worst < 1e-4;
            return fmt("max relative error %.3g", worst);
        }));
    }

    out.push_back(check("reward/telescoping", [](bool& ok) {
        std::mt19937_64 rng(11);
        std::normal_distribution<double> normal(0.0, 0.02);
        double worst = 0.0;
        for (int e = 0; e < 200; ++e) {
            std::vector<double> r(30);
            for (double& v : r) v = normal(rng);
            for (auto mode : {RewardMode::RiskAware, RewardMode::ProfitOnly}) {
                const RewardConfig cfg{mode, 0.7};
                double sum = 0.0;
                for (std::size_t t = 1; t <= r.size(); ++t) sum += per_step_reward(std::span(r).first(t), cfg);
                worst = std::max(worst, std::abs(sum - episode_objective(r, cfg)));
            }
        }
        ok = worst < 1e-9;
        return fmt("max deviation %.3g", worst);
    }));

    out.push_back(check("reward/utility_bound", [](bool& ok) {
        double worst = 0.0;
        for (int k = -30; k <= 40; ++k) {
            const double r = k / 100.0;
            worst = std::max(worst, std::abs(quadratic_utility(r) - std::log1p(r)));
        }
        ok = worst <= 0.02;
        return fmt("max |u(r) - ln(1+r)| = %.4f on [-0.30, 0.40]", worst);
    }));

    out.push_back(check("env/accounting_oracle", [](bool& ok) {
        std::mt19937_64 rng(5);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const auto [x, y] = independent_walks(40, 0.01, rng);
            const PairSeries pair(x, y);
            const NormalizedPrices f = log_normalize(pair, DateRange{pair.date(0), pair.date(39)});
            std::uniform_int_distribution<int> pos(-1, 1);
            std::vector<Action> acts(40);
            for (auto& a : acts) a = action_from_position(pos(rng));
            const Rollout ro = replay_actions(pair, f, DateRange{pair.date(0), pair.date(39)}, acts,
                                              EnvConfig{.cost = 0.001});
            double net = 1.0;
            int prev = 0;
            for (std::size_t t = 0; t + 1 < 40; ++t) {
                const int a = position(acts[t]);
                const double rx = x[t + 1].close / x[t].close - 1.0;
                const double ry = y[t + 1].close / y[t].close - 1.0;
                net *= 1.0 + a * (rx - ry) - 0.001 * std::abs(a - prev);
                prev = a;
                worst = std::max(worst, std::abs(net - ro.equity[t + 1]));
            }
        }
        ok = worst <= 1e-12;
        return fmt("max equity deviation %.3g", worst);
    }));

    out.push_back(check("backtest/metric_oracles", [](bool& ok) {
        const MetricsConfig m;
        const std::vector<double> r3 = {0.002, 0.0, 0.001};
        const double sd = std::sqrt((1e-6 + 1e-6 + 0.0) / 3.0);
        const double sr = sharpe_ratio(r3, m);
        ok = std::abs(sr - (0.001 - 0.000085) / sd) < 1e-12;
        const std::vector<double> eq = {1, 1.1, 0.99, 1.2};
        ok = ok && std::abs(max_drawdown(eq) - 0.1) < 1e-12;
        const std::vector<Action> acts = {Action::Clear, Action::Long, Action::Long, Action::Clear,
                                          Action::Clear, Action::Short, Action::Clear};
        const auto ta = trading_activity(acts);
        ok = ok && ta.tt == 2 && ta.ahd == 1.5 && ta.abd == 2.0;
        const auto bah = trading_activity(bah_policy(Action::Long, 63));
        ok = ok && bah.tt == 1 && bah.abd == 0.0 && bah.ahd == 62.0;
        return fmt("SR fixture %.4f", sr);
    }));

    out.push_back(check("pairselect/power_and_size", [](bool& ok) {
        int planted = 0, spurious = 0;
        const int seeds = 20;
        for (int s = 0; s < seeds; ++s) {
            std::mt19937_64 rng(1000 + s);
            OuPairConfig cfg;
            cfg.days = 750;
            const auto [x, y] = ou_pair(cfg, rng);
            std::vector<double> lx, ly;
            for (std::size_t i = 0; i < x.size(); ++i) {
                lx.push_back(std::log(x[i].close));
                ly.push_back(std::log(y[i].close));
            }
            if (engle_granger(ly, lx).p_value < 0.05) ++planted;
            const auto [a, b] = independent_walks(750, 0.01, rng);
            std::vector<double> la, lb;
            for (std::size_t i = 0; i < a.size(); ++i) {
                la.push_back(std::log(a[i].close));
                lb.push_back(std::log(b[i].close));
            }
            if (engle_granger(lb, la).p_value < 0.05) ++spurious;
        }
        ok = planted >= 18 && spurious <= 4;
        return fmt("planted rejected %.0f/20, independent rejected %.0f/20", planted, spurious);
    }));
    return out;
}

void print_verification(const std::vector<CheckResult>& results, std::ostream& out) {
    std::size_t width = 5;
    for (const auto& r : results) width = std::max(width, r.name.size());
    for (const auto& r : results) {
        out << (r.passed ? "PASS  " : "FAIL  ") << r.name << std::string(width - r.name.size() + 2, ' ') << r.detail
            << '\n';
    }
}

}  // namespace spreadq
