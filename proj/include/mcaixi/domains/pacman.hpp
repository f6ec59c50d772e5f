#pragma once

#include <array>
#include <cstdlib>
#include <string_view>
#include <vector>

#include "mcaixi/environment.hpp"

namespace mcaixi::domains {

// Partially observable Pacman on a fixed maze. At each episode start every
// corridor cell holds food with probability 1/2; the four 'o' cells hold
// power pellets. Two ghosts start at 'G' and chase when within Manhattan
// distance 5 (flee while a power pellet is active), otherwise wander. The
// agent only perceives: wall adjacency (4 bits), ghost line-of-sight (4),
// food line-of-sight (4), quantised nearest-food distance (3) and the power
// flag (1). Rewards: -1 per move, +10 for food, -50 when caught (positions
// reset), +100 for clearing the level (full episode reset).
class Pacman final : public Environment {
 public:
  static constexpr std::array<std::string_view, 9> kMap = {
      "#################",
      "#.......#.......#",
      "#.##.##.#.##.##.#",
      "#o......G......o#",
      "#.##.#.###.#.##.#",
      "#....#.....#....#",
      "#.##.#.###.#.##.#",
      "#o......P......o#",
      "#################",
  };

  static constexpr int kGhosts = 2;
  static constexpr int kChaseRadius = 5;
  static constexpr int kPowerSteps = 20;

  static SpaceSpec make_spec() {
    SpaceSpec s;
    s.action_count = 4;  // N, E, S, W
    s.obs_count = 65536;
    s.reward_min = -50;
    s.reward_max = 109;  // food plus level clear in one move
    s.action_bits = 2;
    s.obs_bits = 16;
    s.reward_bits = 8;
    s.reward_offset = 50;
    return s;
  }

  explicit Pacman(std::uint64_t seed) : Environment(make_spec()) {
    rng_ = derive_rng(seed, 0xbac);
    reset_episode();
  }

  std::pair<int, int> step(int action) override {
    static constexpr int dx[4] = {0, 1, 0, -1};
    static constexpr int dy[4] = {-1, 0, 1, 0};

    int reward = -1;
    const int nx = px_ + dx[action];
    const int ny = py_ + dy[action];
    if (!wall(nx, ny)) {
      px_ = nx;
      py_ = ny;
    }
    if (food_[cell_index(px_, py_)]) {
      food_[cell_index(px_, py_)] = 0;
      reward += 10;
    }
    if (pellet_[cell_index(px_, py_)]) {
      pellet_[cell_index(px_, py_)] = 0;
      power_ = kPowerSteps;
    }

    bool caught = resolve_ghost_contact();
    if (!caught) {
      move_ghosts();
      caught = resolve_ghost_contact();
    }

    if (caught) {
      reward = -50;
      reset_positions();
    } else if (food_left() == 0) {
      reward += 100;
      reset_episode();
    }
    if (power_ > 0) --power_;
    return {observation(), reward};
  }

  std::unique_ptr<Environment> clone() const override { return std::make_unique<Pacman>(*this); }

  int observation() const {
    static constexpr int dx[4] = {0, 1, 0, -1};
    static constexpr int dy[4] = {-1, 0, 1, 0};
    int walls = 0, ghosts = 0, foods = 0;
    for (int d = 0; d < 4; ++d) {
      walls = (walls << 1) | (wall(px_ + dx[d], py_ + dy[d]) ? 1 : 0);
      int gsee = 0, fsee = 0;
      for (int x = px_ + dx[d], y = py_ + dy[d]; !wall(x, y); x += dx[d], y += dy[d]) {
        for (const auto& g : ghosts_)
          if (g.first == x && g.second == y) gsee = 1;
        if (food_[cell_index(x, y)]) fsee = 1;
      }
      ghosts = (ghosts << 1) | gsee;
      foods = (foods << 1) | fsee;
    }
    return (walls << 12) | (ghosts << 8) | (foods << 4) | (smell() << 1) | (power_ > 0 ? 1 : 0);
  }

  static bool wall(int x, int y) {
    if (y < 0 || y >= static_cast<int>(kMap.size())) return true;
    if (x < 0 || x >= static_cast<int>(kMap[0].size())) return true;
    return kMap[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] == '#';
  }

  int food_left() const {
    int n = 0;
    for (std::uint8_t f : food_) n += f;
    return n;
  }

 private:
  static std::size_t cell_index(int x, int y) { return static_cast<std::size_t>(y) * kMap[0].size() + static_cast<std::size_t>(x); }

  int smell() const {
    int best = 7;
    for (int y = 0; y < static_cast<int>(kMap.size()); ++y)
      for (int x = 0; x < static_cast<int>(kMap[0].size()); ++x)
        if (food_[cell_index(x, y)]) {
          const int d = std::abs(x - px_) + std::abs(y - py_);
          if (d < best) best = d;
        }
    return best;
  }

  bool resolve_ghost_contact() {
    for (auto& g : ghosts_) {
      if (g.first == px_ && g.second == py_) {
        if (power_ > 0) {
          g = spawn_;  // eaten: back to the pen
        } else {
          return true;
        }
      }
    }
    return false;
  }

  void move_ghosts() {
    static constexpr int dx[4] = {0, 1, 0, -1};
    static constexpr int dy[4] = {-1, 0, 1, 0};
    for (auto& g : ghosts_) {
      const int dist = std::abs(g.first - px_) + std::abs(g.second - py_);
      int best_moves[4];
      int n_best = 0;
      int best_score = power_ > 0 ? -1000 : 1000;
      for (int d = 0; d < 4; ++d) {
        const int x = g.first + dx[d];
        const int y = g.second + dy[d];
        if (wall(x, y)) continue;
        int score = std::abs(x - px_) + std::abs(y - py_);
        if (power_ == 0 && dist > kChaseRadius) score = 0;  // wander: all legal moves tie
        const bool better = power_ > 0 ? score > best_score : score < best_score;
        if (better) {
          best_score = score;
          n_best = 0;
        }
        if (score == best_score) best_moves[n_best++] = d;
      }
      if (n_best == 0) continue;
      const int d = best_moves[uniform_int(rng_, n_best)];
      g.first += dx[d];
      g.second += dy[d];
    }
  }

  void reset_positions() {
    power_ = 0;
    for (int y = 0; y < static_cast<int>(kMap.size()); ++y)
      for (int x = 0; x < static_cast<int>(kMap[0].size()); ++x) {
        const char c = kMap[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)];
        if (c == 'P') {
          px_ = x;
          py_ = y;
        } else if (c == 'G') {
          spawn_ = {x, y};
        }
      }
    ghosts_.assign(kGhosts, spawn_);
  }

  void reset_episode() {
    reset_positions();
    food_.assign(kMap.size() * kMap[0].size(), 0);
    pellet_.assign(kMap.size() * kMap[0].size(), 0);
    int placed = 0;
    for (int y = 0; y < static_cast<int>(kMap.size()); ++y)
      for (int x = 0; x < static_cast<int>(kMap[0].size()); ++x) {
        const char c = kMap[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)];
        if (c == '.' && bernoulli(rng_, 0.5)) {
          food_[cell_index(x, y)] = 1;
          ++placed;
        } else if (c == 'o') {
          pellet_[cell_index(x, y)] = 1;
        }
      }
    if (placed == 0) food_[cell_index(1, 1)] = 1;
  }

  int px_ = 0, py_ = 0;
  std::pair<int, int> spawn_{0, 0};
  std::vector<std::pair<int, int>> ghosts_;
  std::vector<std::uint8_t> food_;
  std::vector<std::uint8_t> pellet_;
  int power_ = 0;
};

}  // namespace mcaixi::domains
