#pragma once

#include <array>

#include "mcaixi/environment.hpp"

namespace mcaixi::domains {

// Repeated tic-tac-toe against a uniformly random opponent. The agent moves
// first; the observation is the full board, two bits per square (0 empty,
// 1 agent, 2 opponent). Rewards: win +2, draw +1, loss -2, playing an
// occupied square -3 (and the episode ends), otherwise 0. Terminal percepts
// show the fresh empty board of the next episode.
class TicTacToe final : public Environment {
 public:
  static SpaceSpec make_spec() {
    SpaceSpec s;
    s.action_count = 9;
    s.obs_count = 19683;  // 3^9 distinct boards
    s.reward_min = -3;
    s.reward_max = 2;
    s.action_bits = 4;
    s.obs_bits = 18;
    s.reward_bits = 3;
    s.reward_offset = 3;
    return s;
  }

  explicit TicTacToe(std::uint64_t seed) : Environment(make_spec()) {
    rng_ = derive_rng(seed, 0x77c);
    board_.fill(0);
  }

  std::pair<int, int> step(int action) override {
    if (board_[static_cast<std::size_t>(action)] != 0) {
      board_.fill(0);
      return {observation(), -3};
    }
    board_[static_cast<std::size_t>(action)] = 1;
    if (wins(1)) {
      board_.fill(0);
      return {observation(), 2};
    }
    if (full()) {
      board_.fill(0);
      return {observation(), 1};
    }
    int empties[9];
    int n = 0;
    for (int i = 0; i < 9; ++i)
      if (board_[static_cast<std::size_t>(i)] == 0) empties[n++] = i;
    board_[static_cast<std::size_t>(empties[uniform_int(rng_, n)])] = 2;
    if (wins(2)) {
      board_.fill(0);
      return {observation(), -2};
    }
    return {observation(), 0};
  }

  std::unique_ptr<Environment> clone() const override { return std::make_unique<TicTacToe>(*this); }

  // Two bits per square, square 0 in the most significant position.
  int observation() const {
    int v = 0;
    for (int i = 0; i < 9; ++i) v = (v << 2) | board_[static_cast<std::size_t>(i)];
    return v;
  }

  const std::array<int, 9>& board() const { return board_; }

  bool wins(int player) const {
    static constexpr int kLines[8][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6},
                                         {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};
    for (const auto& line : kLines)
      if (board_[static_cast<std::size_t>(line[0])] == player && board_[static_cast<std::size_t>(line[1])] == player &&
          board_[static_cast<std::size_t>(line[2])] == player)
        return true;
    return false;
  }

  bool full() const {
    for (int c : board_)
      if (c == 0) return false;
    return true;
  }

 private:
  std::array<int, 9> board_{};
};

}  // namespace mcaixi::domains
