#include "hybrid_drive/replay_buffer.hpp"

#include <cmath>
#include <stdexcept>

namespace hybrid_drive {

namespace {

template <std::size_t N>
bool finite(const std::array<double, N>& v)
{
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::uint64_t seed)
    : capacity_(capacity), rng_(seed)
{
    if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
    storage_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(const Transition& t)
{
    if (!finite(t.state) || !finite(t.next_state) || !finite(t.action) || !std::isfinite(t.reward))
        throw std::invalid_argument("transition contains non-finite values");
    if (t.reward < 0.0 || t.reward > 2.0)
        throw std::invalid_argument("transition reward outside [0, 2]");
    if (storage_.size() < capacity_) {
        storage_.push_back(t);
        return;
    }
    storage_[head_] = t;
    head_ = (head_ + 1) % capacity_;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n)
{
    if (storage_.empty()) throw std::logic_error("cannot sample from an empty replay buffer");
    std::uniform_int_distribution<std::size_t> pick(0, storage_.size() - 1);
    std::vector<Transition> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(storage_[pick(rng_)]);
    return out;
}

const Transition& ReplayBuffer::at(std::size_t age_rank) const
{
    if (age_rank >= storage_.size()) throw std::out_of_range("replay index out of range");
    const std::size_t oldest = storage_.size() < capacity_ ? 0 : head_;
    return storage_[(oldest + age_rank) % storage_.size()];
}

} // namespace hybrid_drive
