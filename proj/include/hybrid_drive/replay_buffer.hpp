#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "hybrid_drive/sensors.hpp"

namespace hybrid_drive {

inline constexpr std::size_t kActionWidth = 2;
using ActionVector = std::array<double, kActionWidth>;

struct Transition
{
    StateVector state{};
    ActionVector action{};
    double reward = 0.0;
    StateVector next_state{};
    bool terminal = false;
};

/// Fixed-capacity FIFO ring with uniform sampling (with replacement).
class ReplayBuffer
{
public:
    ReplayBuffer(std::size_t capacity, std::uint64_t seed);

    /// Throws std::invalid_argument for non-finite values or a reward outside [0, 2].
    void push(const Transition& t);

    /// Throws std::logic_error on an empty buffer.
    std::vector<Transition> sample(std::size_t n);

    std::size_t size() const { return storage_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return storage_.empty(); }

    /// Oldest-first view of the contents.
    const Transition& at(std::size_t age_rank) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0; ///< slot the next push overwrites once full
    std::vector<Transition> storage_;
    std::mt19937_64 rng_;
};

} // namespace hybrid_drive
