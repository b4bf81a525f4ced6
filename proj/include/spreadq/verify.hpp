#pragma once

#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "spreadq/nn/gradcheck.hpp"
#include "spreadq/nn/qnet.hpp"
#include "spreadq/observation.hpp"

namespace spreadq {

struct VerifyOptions {
    bool corrupt_gradient = false;  // flips the analytic gradient sign
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<CheckResult> run_verification(const VerifyOptions& options = {});
void print_verification(const std::vector<CheckResult>& results, std::ostream& out);

// Random observations with random account state and standard-normal prices.
std::vector<Observation> random_window(std::size_t length, std::mt19937_64& rng);

// 0.5 * sum_i w_i (q_i - t_i)^2 with random weights and targets.
nn::QLoss random_quadratic_loss(std::mt19937_64& rng);

// Worst finite-difference error of one randomly initialized network.
nn::GradCheckResult gradient_check_once(const nn::ModelConfig& model, std::size_t window, std::uint64_t seed,
                                        double sign = 1.0);

}  // namespace spreadq
