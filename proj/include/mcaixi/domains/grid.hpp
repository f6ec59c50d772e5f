#pragma once

#include "mcaixi/environment.hpp"

namespace mcaixi::domains {

// 4x4 gridworld. Start top-left, goal bottom-right; the observation is a
// constant single bit, so only the reward channel carries information.
// Moves into walls are no-ops. Entering the goal pays 1 and teleports the
// agent back to the start; every other step pays 0.
class Grid final : public Environment {
 public:
  static constexpr int kSize = 4;

  static SpaceSpec make_spec() {
    SpaceSpec s;
    s.action_count = 4;  // N, E, S, W
    s.obs_count = 1;
    s.reward_min = 0;
    s.reward_max = 1;
    s.action_bits = 2;
    s.obs_bits = 1;
    s.reward_bits = 1;
    s.reward_offset = 0;
    return s;
  }

  explicit Grid(std::uint64_t seed) : Environment(make_spec()) { rng_ = derive_rng(seed, 0x9d1d); }

  std::pair<int, int> step(int action) override {
    static constexpr int dx[4] = {0, 1, 0, -1};
    static constexpr int dy[4] = {-1, 0, 1, 0};
    const int nx = x_ + dx[action];
    const int ny = y_ + dy[action];
    if (nx >= 0 && nx < kSize && ny >= 0 && ny < kSize) {
      x_ = nx;
      y_ = ny;
    }
    int reward = 0;
    if (x_ == kSize - 1 && y_ == kSize - 1) {
      reward = 1;
      x_ = 0;
      y_ = 0;
    }
    return {0, reward};
  }

  std::unique_ptr<Environment> clone() const override { return std::make_unique<Grid>(*this); }

 private:
  int x_ = 0;
  int y_ = 0;
};

}  // namespace mcaixi::domains
