#pragma once

#include <array>
#include <string_view>

#include "mcaixi/environment.hpp"

namespace mcaixi::domains {

// McCallum's 11-cell cheese maze: a five-cell corridor with three two-cell
// dead-ends hanging below it, cheese at the bottom of the middle one. The
// mouse only sees the 4-bit wall adjacency (N,E,S,W), which aliases several
// cells. Moving costs -1, bumping a wall -10, the cheese pays +10 and the
// mouse respawns at a random non-cheese cell.
class CheeseMaze final : public Environment {
 public:
  static constexpr std::array<std::string_view, 5> kMap = {
      "#######",
      "#.....#",
      "#.#.#.#",
      "#.#C#.#",
      "#######",
  };

  static SpaceSpec make_spec() {
    SpaceSpec s;
    s.action_count = 4;  // N, E, S, W
    s.obs_count = 16;
    s.reward_min = -10;
    s.reward_max = 10;
    s.action_bits = 2;
    s.obs_bits = 4;
    s.reward_bits = 5;
    s.reward_offset = 10;
    return s;
  }

  explicit CheeseMaze(std::uint64_t seed) : Environment(make_spec()) {
    rng_ = derive_rng(seed, 0xc4ee);
    respawn();
  }

  std::pair<int, int> step(int action) override {
    static constexpr int dx[4] = {0, 1, 0, -1};
    static constexpr int dy[4] = {-1, 0, 1, 0};
    const int nx = x_ + dx[action];
    const int ny = y_ + dy[action];
    int reward;
    if (wall(nx, ny)) {
      reward = -10;
    } else if (kMap[static_cast<std::size_t>(ny)][static_cast<std::size_t>(nx)] == 'C') {
      reward = 10;
      respawn();
      return {observation(), reward};
    } else {
      x_ = nx;
      y_ = ny;
      reward = -1;
    }
    return {observation(), reward};
  }

  std::unique_ptr<Environment> clone() const override { return std::make_unique<CheeseMaze>(*this); }

  int observation() const {
    const int n = wall(x_, y_ - 1);
    const int e = wall(x_ + 1, y_);
    const int s = wall(x_, y_ + 1);
    const int w = wall(x_ - 1, y_);
    return (n << 3) | (e << 2) | (s << 1) | w;
  }

  static bool wall(int x, int y) {
    if (y < 0 || y >= static_cast<int>(kMap.size())) return true;
    if (x < 0 || x >= static_cast<int>(kMap[0].size())) return true;
    return kMap[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] == '#';
  }

  // All traversable cells except the cheese cell, in scan order.
  static std::array<std::pair<int, int>, 10> free_cells() {
    std::array<std::pair<int, int>, 10> cells{};
    std::size_t k = 0;
    for (int y = 0; y < static_cast<int>(kMap.size()); ++y)
      for (int x = 0; x < static_cast<int>(kMap[0].size()); ++x)
        if (kMap[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] == '.')
          cells[k++] = {x, y};
    return cells;
  }

  std::pair<int, int> position() const { return {x_, y_}; }

 private:
  void respawn() {
    const auto cells = free_cells();
    const auto [x, y] = cells[static_cast<std::size_t>(uniform_int(rng_, static_cast<int>(cells.size())))];
    x_ = x;
    y_ = y;
  }

  int x_ = 1;
  int y_ = 1;
};

}  // namespace mcaixi::domains
