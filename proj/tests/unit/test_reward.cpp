#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "spreadq/reward.hpp"

using namespace spreadq;
using testing::error_code_of;

namespace {

std::vector<double> random_returns(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> e(0.001, 0.02);
    std::vector<double> r(n);
    for (auto& v : r) v = e(rng);
    return r;
}

double rewards_sum(const std::vector<double>& returns, const RewardConfig& cfg) {
    double sum = 0.0;
    for (std::size_t t = 1; t <= returns.size(); ++t) {
        sum += per_step_reward(std::span<const double>(returns.data(), t), cfg);
    }
    return sum;
}

}  // namespace

TEST_SUITE("reward") {

TEST_CASE("cumulative profit examples") {
    CHECK(cumulative_profit(std::vector<double>{0.1, 0.1}) == doctest::Approx(1.21).epsilon(1e-12));
    CHECK(cumulative_profit(std::vector<double>{1.0, -0.3}) == doctest::Approx(1.4).epsilon(1e-12));
    CHECK(cumulative_profit(std::vector<double>{}) == 1.0);
    CHECK(error_code_of([] { cumulative_profit(std::vector<double>{0.1, -1.0}); }) == ErrorCode::ReturnBelowNegOne);
}

TEST_CASE("quadratic utility") {
    CHECK(quadratic_utility(0.0) == 0.0);
    CHECK(quadratic_utility(1.0) == 0.5);
    double worst = 0.0;
    for (int k = -30; k <= 40; ++k) {
        const double r = k / 100.0;
        worst = std::max(worst, std::abs(quadratic_utility(r) - std::log1p(r)));
    }
    CHECK(worst <= 0.02);
}

TEST_CASE("risk-aware objective examples") {
    for (double alpha : {0.0, 0.5, 3.0}) {
        CHECK(risk_aware_objective(std::vector<double>{0.1, 0.1}, alpha) == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(risk_aware_objective(std::vector<double>{-0.04}, alpha) == doctest::Approx(-0.04).epsilon(1e-12));
    }
    CHECK(risk_aware_objective(std::vector<double>{1.0, -0.3}, 1.0) == doctest::Approx(-0.0725).epsilon(1e-12));
    CHECK(error_code_of([] { risk_aware_objective(std::vector<double>{}, 0.5); }) == ErrorCode::EmptyReturns);
}

TEST_CASE("per-step reward examples") {
    const RewardConfig risk{RewardMode::RiskAware, 0.5};
    const RewardConfig profit{RewardMode::ProfitOnly, 0.5};
    CHECK(per_step_reward(std::vector<double>{0.05}, risk) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(per_step_reward(std::vector<double>{0.03, 0.0}, profit) == 0.0);
    const std::vector<double> r = {0.1, 0.1};
    CHECK(per_step_reward(std::span<const double>(r.data(), 1), risk) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(std::abs(per_step_reward(r, risk)) < 1e-15);
    CHECK(rewards_sum(r, risk) == doctest::Approx(episode_objective(r, risk)).epsilon(1e-12));
    CHECK(error_code_of([&] { per_step_reward(std::vector<double>{}, risk); }) == ErrorCode::EmptyReturns);
}

TEST_CASE("telescoping holds for random episodes") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const auto r = random_returns(1 + trial % 90, rng);
        const double alpha = std::uniform_real_distribution<double>(0.0, 5.0)(rng);
        const RewardConfig risk{RewardMode::RiskAware, alpha};
        const double objective = risk_aware_objective(r, alpha);
        CHECK(std::abs(rewards_sum(r, risk) - objective) <= 1e-9 * std::max(1.0, std::abs(objective)));
        const RewardConfig profit{RewardMode::ProfitOnly, alpha};
        CHECK(std::abs(rewards_sum(r, profit) - std::log(cumulative_profit(r))) < 1e-9);
        CHECK(episode_objective(r, profit) == doctest::Approx(std::log(cumulative_profit(r))).epsilon(1e-12));
    }
}

TEST_CASE("objective is invariant under permutation") {
    std::mt19937_64 rng(22);
    auto r = random_returns(40, rng);
    const double base = risk_aware_objective(r, 1.3);
    for (int k = 0; k < 20; ++k) {
        std::shuffle(r.begin(), r.end(), rng);
        CHECK(std::abs(risk_aware_objective(r, 1.3) - base) < 1e-15);
    }
}

TEST_CASE("preference reversal between a volatile and a steady episode") {
    const std::vector<double> a = {1.0, -0.3};
    const std::vector<double> b = {0.1, 0.1};
    CHECK(risk_aware_objective(a, 0.0) > risk_aware_objective(b, 0.0));
    CHECK(risk_aware_objective(a, 1.0) < risk_aware_objective(b, 1.0));
    const double crossover = 0.25 / 0.4225;
    CHECK(crossover == doctest::Approx(0.592).epsilon(1e-3));
    CHECK(risk_aware_objective(a, crossover - 1e-6) > risk_aware_objective(b, crossover - 1e-6));
    CHECK(risk_aware_objective(a, crossover + 1e-6) < risk_aware_objective(b, crossover + 1e-6));
}

TEST_CASE("reward mode names") {
    CHECK(parse_reward_mode("risk_aware") == RewardMode::RiskAware);
    CHECK(parse_reward_mode(to_string(RewardMode::ProfitOnly)) == RewardMode::ProfitOnly);
    CHECK(error_code_of([] { parse_reward_mode("sharpe"); }) == ErrorCode::ConfigError);
}

}
