#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "spreadq/marketdata.hpp"

namespace spreadq {

enum class Action : int { Short = -1, Clear = 0, Long = 1 };

inline constexpr int kNumActions = 3;

inline int position(Action a) { return static_cast<int>(a); }
// Q-value slot: short=0, clear=1, long=2.
inline std::size_t action_slot(Action a) { return static_cast<std::size_t>(static_cast<int>(a) + 1); }
inline Action action_from_slot(std::size_t slot) { return static_cast<Action>(static_cast<int>(slot) - 1); }
Action action_from_position(int p);
const char* to_string(Action a);

struct AccountFeatures {
    Action prev_action = Action::Clear;
    double cash_ratio = 1.0;   // C_t / N_0
    double asset_ratio = 0.0;  // V_t / N_0
    double net_ratio = 1.0;    // N_t / N_0
};

// What the agent sees on one day.
struct Observation {
    std::size_t day = 0;  // index into the pair's date vector
    AccountFeatures account;
    PriceFeatures prices{};
};

}  // namespace spreadq
