#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "spreadq/observation.hpp"

namespace spreadq {

// One stored episode. `obs` holds `context` pre-episode days followed by the
// episode days, so the window ending on episode day k is a contiguous slice.
struct EpisodeRecord {
    std::vector<Observation> obs;
    std::size_t context = 0;
    std::vector<Action> actions;  // one per step
    std::vector<double> rewards;  // reward following each action

    std::size_t steps() const { return actions.size(); }
    std::span<const Observation> window(std::size_t day, std::size_t length) const;
};

struct Transition {
    std::span<const Observation> state;
    Action action = Action::Clear;
    double reward = 0.0;
    std::span<const Observation> next;
    bool done = false;
};

struct Subsequence {
    std::size_t episode = 0;
    std::size_t start = 0;
    std::size_t length = 0;
};

// Ring buffer of whole episodes; samples never cross episode boundaries.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void add(EpisodeRecord episode);
    std::size_t size() const { return episodes_.size(); }
    std::size_t capacity() const { return capacity_; }
    const EpisodeRecord& episode(std::size_t i) const { return episodes_[i]; }

    // Uniform episode, then a uniform start for `length` consecutive steps
    // (shorter when the episode is).
    Subsequence sample(std::size_t length, std::mt19937_64& rng) const;
    Transition transition(const Subsequence& s, std::size_t k, std::size_t window) const;

private:
    std::size_t capacity_;
    std::size_t next_ = 0;
    std::vector<EpisodeRecord> episodes_;
};

}  // namespace spreadq
