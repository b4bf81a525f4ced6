// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spreadq/agent.hpp"
#include "spreadq/backtest.hpp"
#include "spreadq/baselines.hpp"
#include "spreadq/config.hpp"
#include "spreadq/env.hpp"
#include "spreadq/experiment.hpp"
#include "spreadq/pairselect.hpp"
#include "spreadq/reward.hpp"
#include "spreadq/synthetic.hpp"
#include "spreadq/verify.hpp"

using namespace spreadq;
using nlohmann::json;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() / ("spreadq_acceptance_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

std::vector<double> random_closes(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> e(0.0, 0.02);
    std::vector<double> c(n);
    double p = 50.0;
    for (auto& v : c) {
        v = p;
        p *= std::exp(e(rng));
    }
    return c;
}

std::vector<double> random_walk(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> e(0.0, 1.0);
    std::vector<double> w(n);
    double s = 0.0;
    for (auto& v : w) v = s += e(rng);
    return w;
}

PairSeries pair_from_closes(const std::vector<double>& x, const std::vector<double>& y, std::mt19937_64& rng) {
    const auto dates = business_days(make_date(2015, 1, 1), x.size());
    return align_pair(series_from_closes("X", dates, x, rng), series_from_closes("Y", dates, y, rng));
}

Action random_action(std::mt19937_64& rng) {
    return action_from_slot(std::uniform_int_distribution<std::size_t>(0, 2)(rng));
}

Outcome utility_approximation() {
    double worst = 0.0;
    for (int k = -30; k <= 40; ++k) {
        const double r = k / 100.0;
        worst = std::max(worst, std::abs(quadratic_utility(r) - std::log1p(r)));
    }
    return {worst <= 0.02, fmt("max |(r - r^2/2) - ln(1+r)| = %.4f on [-0.30, 0.40]", worst)};
}

Outcome arithmetic_anchors() {
    const std::vector<double> b{0.1, 0.1};
    const std::vector<double> a{1.0, -0.3};
    bool ok = std::abs(cumulative_profit(b) - 1.21) < 1e-15;
    ok = ok && std::abs(cumulative_profit(a) - 1.4) < 1e-15;
    double worst = 0.0;
    for (double alpha : {0.0, 0.1, 0.5, 1.0, 2.0, 10.0}) worst = std::max(worst, std::abs(risk_aware_objective(b, alpha) - 0.1));
    ok = ok && worst < 1e-15;
    return {ok, fmt("P(B)=%.15g P(A)=%.15g max |R(B)-0.1| over alpha = %.2g", cumulative_profit(b), cumulative_profit(a), worst)};
}

Outcome preference_reversal() {
    const std::vector<double> b{0.1, 0.1};
    const std::vector<double> a{1.0, -0.3};
    const bool low = risk_aware_objective(a, 0.0) > risk_aware_objective(b, 0.0);
    const bool high = risk_aware_objective(b, 1.0) > risk_aware_objective(a, 1.0);
    return {low && high, fmt("alpha=0: A %.4f vs B %.4f; alpha=1: A %.4f vs B %.4f", risk_aware_objective(a, 0.0),
                             risk_aware_objective(b, 0.0), risk_aware_objective(a, 1.0), risk_aware_objective(b, 1.0)) +
                             fmt("; crossover alpha %.3f", 0.25 / 0.4225)};
}

Outcome gradient_correctness() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    int runs = 0;
    for (int dh : {4, 8, 16}) {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            worst = std::max(worst, gradient_check_once(nn::ModelConfig{3, dh, 6}, 6, seed).max_rel_error);
            ++runs;
        }
    }
    const double t = seconds_since(t0);
    return {worst < 1e-4 && t < 120.0,
            fmt("max relative error %.3g over %.0f networks, %.1f s", worst, runs, t)};
}

Outcome telescoping() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ret(-0.2, 0.2);
    std::uniform_real_distribution<double> alpha(0.0, 3.0);
    std::uniform_int_distribution<int> len(1, 120);
    double worst = 0.0;
    for (int e = 0; e < 1000; ++e) {
        std::vector<double> r(static_cast<std::size_t>(len(rng)));
        for (auto& v : r) v = ret(rng);
        const RewardConfig risk{RewardMode::RiskAware, alpha(rng)};
        const RewardConfig profit{RewardMode::ProfitOnly, 0.0};
        double sum_risk = 0.0;
        double sum_profit = 0.0;
        for (std::size_t t = 1; t <= r.size(); ++t) {
            const std::span<const double> prefix(r.data(), t);
            sum_risk += per_step_reward(prefix, risk);
            sum_profit += per_step_reward(prefix, profit);
        }
        double log_growth = 0.0;
        for (double v : r) log_growth += std::log1p(v);
        const double target = risk_aware_objective(r, risk.alpha);
        worst = std::max(worst, std::abs(sum_risk - target) / std::max(1.0, std::abs(target)));
        worst = std::max(worst, std::abs(sum_profit - log_growth) / std::max(1.0, std::abs(log_growth)));
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-9 && t < 60.0, fmt("max deviation %.3g over 1000 episodes, %.2f s", worst, t)};
}

Outcome environment_oracle() {
    std::mt19937_64 rng(6);
    const auto x = random_closes(90, rng);
    const auto y = random_closes(90, rng);
    const PairSeries pair = pair_from_closes(x, y, rng);
    const NormalizedPrices features = log_normalize(pair, DateRange{pair.date(0), pair.date(pair.size() - 1)});
    const double c = 0.001;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t first = std::uniform_int_distribution<std::size_t>(0, 50)(rng);
        const std::size_t last = first + std::uniform_int_distribution<std::size_t>(1, 39)(rng);
        std::vector<Action> plan(last - first + 1);
        for (auto& a : plan) a = random_action(rng);
        const Rollout r = replay_actions(pair, features, DateRange{pair.date(first), pair.date(last)}, plan,
                                         EnvConfig{c, 5, 1.0});
        double net = 1.0;
        int prev = 0;
        worst = std::max(worst, std::abs(r.equity.front() - 1.0));
        for (std::size_t d = first; d < last; ++d) {
            const int pos = position(plan[d - first]);
            const double profit = pos * ((x[d + 1] / x[d] - 1.0) - (y[d + 1] / y[d] - 1.0)) - c * std::abs(pos - prev);
            net *= 1.0 + profit;
            prev = pos;
            worst = std::max(worst, std::abs(r.equity[d - first + 1] - net));
        }
    }

    // Causality: changing every bar after day `cut` leaves steps, observations
    // and greedy decisions up to `cut` untouched.
    std::mt19937_64 mrng(7);
    auto mx = random_closes(80, mrng);
    auto my = random_closes(80, mrng);
    std::mt19937_64 build_a(8), build_b(8);
    const PairSeries base = pair_from_closes(mx, my, build_a);
    const std::size_t cut = 50;
    for (std::size_t d = cut + 1; d < mx.size(); ++d) {
        mx[d] *= 1.5;
        my[d] *= 0.7;
    }
    const PairSeries mutated = pair_from_closes(mx, my, build_b);
    const DateRange fit{base.date(0), base.date(29)};
    const NormalizedPrices fa = log_normalize(base, fit);
    const NormalizedPrices fb = log_normalize(mutated, fit);
    TradingEnv ea(base, fa, EnvConfig{});
    TradingEnv eb(mutated, fb, EnvConfig{});
    ea.reset(DateRange{base.date(0), base.date(79)});
    eb.reset(DateRange{mutated.date(0), mutated.date(79)});
    bool causal = true;
    for (std::size_t d = 0; d < cut; ++d) {
        const Action a = random_action(mrng);
        const StepResult sa = ea.step(a);
        const StepResult sb = eb.step(a);
        causal = causal && sa.step_profit == sb.step_profit && sa.observation.prices == sb.observation.prices &&
                 sa.observation.account.net_ratio == sb.observation.account.net_ratio;
    }
    nn::QNetwork net(nn::ModelConfig{2, 4, 6});
    net.init(mrng);
    const DateRange test{base.date(30), base.date(cut)};
    const Rollout ra = evaluate(net, test, base, fa, EnvConfig{0.001, 6, 1.0});
    const Rollout rb = evaluate(net, test, mutated, fb, EnvConfig{0.001, 6, 1.0});
    causal = causal && ra.actions == rb.actions && ra.returns == rb.returns;
    return {worst <= 1e-12 && causal,
            fmt("max equity deviation %.3g over 100 sequences; causality ", worst) + (causal ? "holds" : "violated")};
}

Outcome cointegration_power_size() {
    const auto t0 = std::chrono::steady_clock::now();
    int planted = 0;
    int spurious = 0;
    for (int seed = 0; seed < 50; ++seed) {
        std::mt19937_64 rng(7000 + seed);
        const auto x = random_walk(750, rng);
        std::normal_distribution<double> e(0.0, 1.0);
        std::vector<double> y(750);
        double eps = 0.0;
        for (std::size_t t = 0; t < y.size(); ++t) {
            eps = 0.5 * eps + e(rng);
            y[t] = 2.0 * x[t] + eps;
        }
        planted += engle_granger(x, y).p_value < 0.05;
        const auto a = random_walk(750, rng);
        const auto b = random_walk(750, rng);
        spurious += engle_granger(a, b).p_value < 0.05;
    }
    const double t = seconds_since(t0);
    return {planted >= 48 && spurious <= 5 && t < 180.0,
            fmt("planted p<0.05 in %.0f/50, independent walks in %.0f/50, %.1f s", planted, spurious, t)};
}

Outcome metric_oracles() {
    const MetricsConfig cfg;
    bool ok = true;
    std::ostringstream bad;
    auto expect = [&](const char* what, double got, double want, double tol) {
        if (!(std::abs(got - want) <= tol)) {
            ok = false;
            bad << ' ' << what << '=' << got;
        }
    };
    const double sd = std::sqrt(((0.001 * 0.001) * 2.0) / 3.0);
    expect("SR", sharpe_ratio(std::vector<double>{0.002, 0.0, 0.001}, cfg), 0.000915 / sd, 1e-12);
    expect("SR0", sharpe_ratio(std::vector<double>{0.01, -0.01}, MetricsConfig{0.0, 252}), 0.0, 0.0);
    expect("AR0", annualized_return(std::vector<double>(252, 0.0), cfg), 0.0, 0.0);
    expect("AR", annualized_return(std::vector<double>(126, std::pow(1.05, 1.0 / 126.0) - 1.0), cfg), 0.1025, 1e-12);
    expect("MDD", max_drawdown(std::vector<double>{1.0, 1.1, 0.99, 1.2}), 0.1, 1e-15);
    expect("MDD0", max_drawdown(std::vector<double>{1.0, 1.0, 1.3}), 0.0, 0.0);
    expect("MDD1", max_drawdown(std::vector<double>{1.0, 0.5}), 0.5, 0.0);
    expect("AV", annualized_volatility(std::vector<double>{0.01, -0.01, 0.01, -0.01}, cfg), 0.01 * std::sqrt(252.0), 1e-15);
    expect("AV0", annualized_volatility(std::vector<double>(5, 0.003), cfg), 0.0, 1e-15);
    const auto L = Action::Long, S = Action::Short, C = Action::Clear;
    const TradingActivity t1 = trading_activity(std::vector<Action>{C, L, L, C, C, S, C});
    expect("TT", t1.tt, 2.0, 0.0);
    expect("AHD", t1.ahd, 1.5, 0.0);
    expect("ABD", t1.abd, 2.0, 0.0);
    const TradingActivity t2 = trading_activity(std::vector<Action>{L, S, L});
    expect("TT3", t2.tt, 3.0, 0.0);
    expect("AHD3", t2.ahd, 1.0, 0.0);
    expect("ABD3", t2.abd, 0.0, 0.0);
    const TradingActivity t0 = trading_activity(std::vector<Action>(9, C));
    expect("TT0", t0.tt + t0.ahd + t0.abd, 0.0, 0.0);

    std::mt19937_64 rng(9);
    const PairSeries pair = pair_from_closes(random_closes(64, rng), random_closes(64, rng), rng);
    const DateRange all{pair.date(0), pair.date(63)};
    const NormalizedPrices f = log_normalize(pair, all);
    for (Action dir : {Action::Long, Action::Short}) {
        const Metrics m = compute_metrics(replay_actions(pair, f, all, bah_policy(dir, 64), EnvConfig{}), cfg);
        expect("BAH TT", m.tt, 1.0, 0.0);
        expect("BAH ABD", m.abd, 0.0, 0.0);
        expect("BAH AHD", m.ahd, 63.0, 0.0);
    }
    return {ok, ok ? "SR/AR/MDD/AV/AHD/TT/ABD fixtures and BAH (TT=1, ABD=0) match" : "mismatch:" + bad.str()};
}

Outcome rolling_protocol() {
    const auto r = make_rollings(make_date(2015, 1, 2), make_date(2018, 12, 31));
    bool ok = r.size() == 11;
    for (std::size_t i = 0; ok && i < r.size(); ++i) {
        const Date start = add_months(make_date(2015, 1, 1), 3 * static_cast<int>(i));
        const Date expected_first = i == 0 ? make_date(2015, 1, 2) : start;
        ok = r[i].train.first == expected_first && r[i].train.last == last_of_month(add_months(start, 11)) &&
             r[i].validation.first == add_months(start, 12) &&
             r[i].validation.last == last_of_month(add_months(start, 14)) &&
             r[i].test.first == add_months(start, 15) && r[i].test.last == last_of_month(add_months(start, 17));
    }
    return {ok, fmt("%.0f rollings, ", static_cast<double>(r.size())) +
                    (r.empty() ? std::string("none") : "last test " + format_range(r.back().test))};
}

json synthetic_config(const std::string& method, std::uint64_t seed, int episodes, const std::string& output) {
    return json{
        {"data", {{"dir", "."}}},
        {"pair", {{"x", "SYNX"}, {"y", "SYNY"}}},
        {"method", method},
        {"env", {{"window_days", 10}}},
        {"agent",
         {{"episodes_per_rolling", episodes},
          {"hidden_dim", 8},
          {"head_hidden", 16},
          {"embed_dim", 4},
          {"lr", 3e-4},
          {"reward_scale", 100.0},
          {"batch", 2},
          {"subseq_len", 16},
          {"target_sync_every", 100}}},
        {"reward", {{"alpha", 0.5}, {"alpha_grid", json::array()}}},
        {"seed", seed},
        {"output", output},
    };
}

void write_synthetic_pair(const std::filesystem::path& dir, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto [x, y] = ou_pair(OuPairConfig{}, rng);
    write_eod_csv(dir / "SYNX.csv", AssetSeries("SYNX", x.rows()));
    write_eod_csv(dir / "SYNY.csv", AssetSeries("SYNY", y.rows()));
}

BacktestReport run_quiet(const json& body, const std::filesystem::path& dir) {
    std::ostringstream log;
    return cmd_run(resolve_config(body, dir), log);
}

Outcome synthetic_end_to_end(int seeds, int episodes) {
    const auto t0 = std::chrono::steady_clock::now();
    ScratchDir scratch("e2e");
    int wins = 0;
    int cpm_positive = 0;
    double cpm_ar_sum = 0.0;
    for (int s = 1; s <= seeds; ++s) {
        const auto dir = scratch.path() / ("seed" + std::to_string(s));
        std::filesystem::create_directories(dir);
        write_synthetic_pair(dir, static_cast<std::uint64_t>(s));
        const BacktestReport credit = run_quiet(synthetic_config("credit", s, episodes, "credit"), dir);
        const BacktestReport cpm = run_quiet(synthetic_config("cpm", s, episodes, "cpm"), dir);
        const RollingReport& a = credit.rollings.at(0);
        const RollingReport& b = cpm.rollings.at(0);
        if (!a.ok || !b.ok) {
            std::cout << "  seed " << s << ": rolling failed: " << a.failure << b.failure << '\n';
            continue;
        }
        const bool win = a.metrics.ar > 0.0 && a.metrics.sr > b.metrics.sr;
        wins += win;
        cpm_positive += b.metrics.ar > 0.0;
        cpm_ar_sum += b.metrics.ar;
        std::cout << fmt("  seed %2.0f: CREDIT SR %7.4f AR %7.4f | CPM SR %7.4f", s, a.metrics.sr, a.metrics.ar, b.metrics.sr)
                  << fmt(" AR %7.4f", b.metrics.ar) << (win ? "  win" : "") << std::endl;
    }
    const double cpm_mean_ar = cpm_ar_sum / seeds;
    const double t = seconds_since(t0);
    return {wins >= (7 * seeds + 9) / 10 && cpm_mean_ar > 0.0 && t <= 900.0,
            fmt("CREDIT AR>0 and SR>CPM on %.0f/%.0f seeds; CPM mean AR %.4f (AR>0 on %.0f seeds)", wins, seeds,
                cpm_mean_ar, cpm_positive) +
                fmt("; %.0f s", t)};
}

Outcome determinism() {
    ScratchDir scratch("det");
    write_synthetic_pair(scratch.path(), 99);
    run_quiet(synthetic_config("credit", 5, 20, "a"), scratch.path());
    run_quiet(synthetic_config("credit", 5, 20, "b"), scratch.path());
    const std::string a = read_file(scratch.path() / "a" / "report.json");
    const std::string b = read_file(scratch.path() / "b" / "report.json");
    const bool same = !a.empty() && a == b;
    return {same, fmt("report.json %.0f bytes, ", static_cast<double>(a.size())) + (same ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only;
    int seeds = 10;
    int episodes = 300;
    app.add_option("--only", only, "Run only these criteria");
    app.add_option("--seeds", seeds, "Seeds for the synthetic end-to-end run")->check(CLI::PositiveNumber);
    app.add_option("--episodes", episodes, "Training episodes per rolling for the end-to-end run")
        ->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"utility approximation", utility_approximation},
        {"arithmetic anchors", arithmetic_anchors},
        {"preference reversal", preference_reversal},
        {"gradient correctness", gradient_correctness},
        {"telescoping identities", telescoping},
        {"environment oracle", environment_oracle},
        {"cointegration power/size", cointegration_power_size},
        {"metric oracles", metric_oracles},
        {"rolling protocol", rolling_protocol},
        {"synthetic end-to-end", [&] { return synthetic_end_to_end(seeds, episodes); }},
        {"determinism", determinism},
    };
    const std::set<int> selected(only.begin(), only.end());
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        all = all && o.passed;
        std::cout << (o.passed ? "PASS" : "FAIL") << ' ' << id << ' ' << criteria[i].first << ": " << o.detail
                  << std::endl;
    }
    return all ? 0 : 1;
}
