#include "spreadq/replay.hpp"

#include "spreadq/error.hpp"

namespace spreadq {

std::span<const Observation> EpisodeRecord::window(std::size_t day, std::size_t length) const {
    const std::size_t end = context + day + 1;
    if (end > obs.size() || length == 0) fail(ErrorCode::IndexOutOfRange, "episode window out of range");
    const std::size_t first = end >= length ? end - length : 0;
    return std::span<const Observation>(obs).subspan(first, end - first);
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) fail(ErrorCode::InvalidArgument, "replay capacity must be >= 1");
    episodes_.reserve(capacity_);
}

void ReplayBuffer::add(EpisodeRecord episode) {
    if (episode.steps() == 0 || episode.rewards.size() != episode.steps() ||
        episode.obs.size() != episode.context + episode.steps() + 1) {
        fail(ErrorCode::ShapeMismatch, "inconsistent episode record");
    }
    if (episodes_.size() < capacity_) {
        episodes_.push_back(std::move(episode));
    } else {
        episodes_[next_] = std::move(episode);
    }
    next_ = (next_ + 1) % capacity_;
}

Subsequence ReplayBuffer::sample(std::size_t length, std::mt19937_64& rng) const {
    if (episodes_.empty()) fail(ErrorCode::InvalidArgument, "sampling from an empty replay buffer");
    std::uniform_int_distribution<std::size_t> pick(0, episodes_.size() - 1);
    Subsequence s;
    s.episode = pick(rng);
    const std::size_t steps = episodes_[s.episode].steps();
    s.length = std::min(std::max<std::size_t>(length, 1), steps);
    std::uniform_int_distribution<std::size_t> start(0, steps - s.length);
    s.start = start(rng);
    return s;
}

Transition ReplayBuffer::transition(const Subsequence& s, std::size_t k, std::size_t window) const {
    const EpisodeRecord& ep = episodes_[s.episode];
    const std::size_t step = s.start + k;
    if (k >= s.length || step >= ep.steps()) fail(ErrorCode::IndexOutOfRange, "transition outside subsequence");
    Transition t;
    t.state = ep.window(step, window);
    t.action = ep.actions[step];
    t.reward = ep.rewards[step];
    t.next = ep.window(step + 1, window);
    t.done = step + 1 == ep.steps();
    return t;
}

}  // namespace spreadq
