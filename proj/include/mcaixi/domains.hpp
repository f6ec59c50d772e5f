#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mcaixi/domains/biased_rps.hpp"
#include "mcaixi/domains/cheese_maze.hpp"
#include "mcaixi/domains/grid.hpp"
#include "mcaixi/domains/kuhn_poker.hpp"
#include "mcaixi/domains/pacman.hpp"
#include "mcaixi/domains/tictactoe.hpp"
#include "mcaixi/domains/tiger.hpp"
#include "mcaixi/environment.hpp"

namespace mcaixi {

// Published per-domain configuration: space sizes, encoding widths and the
// suggested context depth / search horizon. Tiger is listed with its three
// classic actions; the simulator implements the extended variant's four
// (listen, stand, open-left, open-right) within the same two action bits.
struct DomainInfo {
  std::string_view name;
  int action_count;
  int obs_count;
  int action_bits;
  int obs_bits;
  int reward_bits;
  int suggested_depth;
  int suggested_horizon;
};

inline constexpr std::array<DomainInfo, 7> kDomainCatalog = {{
    {"cheese-maze", 4, 16, 2, 4, 5, 96, 8},
    {"tiger", 3, 3, 2, 2, 7, 96, 5},
    {"grid", 4, 1, 2, 1, 1, 96, 12},
    {"tictactoe", 9, 19683, 4, 18, 3, 64, 9},
    {"biased-rps", 3, 3, 2, 2, 2, 32, 4},
    {"kuhn-poker", 2, 6, 1, 4, 3, 42, 2},
    {"pacman", 4, 65536, 2, 16, 8, 64, 8},
}};

inline const DomainInfo& domain_info(std::string_view name) {
  for (const DomainInfo& d : kDomainCatalog)
    if (d.name == name) return d;
  throw std::invalid_argument("unknown domain: " + std::string(name));
}

inline std::unique_ptr<Environment> make_env(std::string_view name, std::uint64_t seed) {
  if (name == "cheese-maze") return std::make_unique<domains::CheeseMaze>(seed);
  if (name == "tiger") return std::make_unique<domains::Tiger>(seed);
  if (name == "grid") return std::make_unique<domains::Grid>(seed);
  if (name == "tictactoe") return std::make_unique<domains::TicTacToe>(seed);
  if (name == "biased-rps") return std::make_unique<domains::BiasedRps>(seed);
  if (name == "kuhn-poker") return std::make_unique<domains::KuhnPoker>(seed);
  if (name == "pacman") return std::make_unique<domains::Pacman>(seed);
  throw std::invalid_argument("unknown domain: " + std::string(name));
}

namespace oracle {

struct Outcome {
  double prob;
  int next;
  double reward;
};

// Average-reward optimal gain of a small unichain MDP via damped relative
// value iteration (the damping handles periodic optimal chains).
inline double average_reward_gain(int states, int actions,
                                  const std::function<std::vector<Outcome>(int, int)>& dynamics,
                                  double tol = 1e-13, int max_iters = 2000000) {
  std::vector<double> h(static_cast<std::size_t>(states), 0.0);
  std::vector<double> th(static_cast<std::size_t>(states), 0.0);
  double gain = 0.0;
  for (int iter = 0; iter < max_iters; ++iter) {
    for (int s = 0; s < states; ++s) {
      double best = -1e300;
      for (int a = 0; a < actions; ++a) {
        double q = 0.0;
        for (const Outcome& o : dynamics(s, a)) q += o.prob * (o.reward + h[static_cast<std::size_t>(o.next)]);
        best = std::max(best, q);
      }
      th[static_cast<std::size_t>(s)] = best;
    }
    double span_min = 1e300, span_max = -1e300;
    for (int s = 0; s < states; ++s) {
      const double d = th[static_cast<std::size_t>(s)] - h[static_cast<std::size_t>(s)];
      span_min = std::min(span_min, d);
      span_max = std::max(span_max, d);
    }
    gain = 0.5 * (span_min + span_max);
    if (span_max - span_min < tol) return gain;
    const double ref = th[0];
    for (int s = 0; s < states; ++s) {
      const std::size_t i = static_cast<std::size_t>(s);
      h[i] = 0.5 * h[i] + 0.5 * (th[i] - ref);  // damped relative update
    }
  }
  return gain;
}

// 4x4 grid: 16-state deterministic MDP, goal entry pays 1 and teleports home.
inline double grid_optimum() {
  constexpr int n = domains::Grid::kSize;
  const auto dyn = [](int s, int a) {
    static constexpr int dx[4] = {0, 1, 0, -1};
    static constexpr int dy[4] = {-1, 0, 1, 0};
    int x = s % n, y = s / n;
    const int nx = x + dx[a], ny = y + dy[a];
    if (nx >= 0 && nx < n && ny >= 0 && ny < n) {
      x = nx;
      y = ny;
    }
    if (x == n - 1 && y == n - 1) return std::vector<Outcome>{{1.0, 0, 1.0}};
    return std::vector<Outcome>{{1.0, y * n + x, 0.0}};
  };
  return average_reward_gain(n * n, 4, dyn);
}

// Cheese maze: states are the ten non-cheese cells; stepping onto the cheese
// pays +10 and respawns uniformly.
inline double cheese_maze_optimum() {
  using domains::CheeseMaze;
  const auto cells = CheeseMaze::free_cells();
  const auto index_of = [&cells](int x, int y) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (cells[i].first == x && cells[i].second == y) return static_cast<int>(i);
    return -1;
  };
  const auto dyn = [&cells, &index_of](int s, int a) {
    static constexpr int dx[4] = {0, 1, 0, -1};
    static constexpr int dy[4] = {-1, 0, 1, 0};
    const auto [x, y] = cells[static_cast<std::size_t>(s)];
    const int nx = x + dx[a], ny = y + dy[a];
    if (CheeseMaze::wall(nx, ny)) return std::vector<Outcome>{{1.0, s, -10.0}};
    if (CheeseMaze::kMap[static_cast<std::size_t>(ny)][static_cast<std::size_t>(nx)] == 'C') {
      std::vector<Outcome> out;
      for (std::size_t i = 0; i < cells.size(); ++i) out.push_back({1.0 / static_cast<double>(cells.size()), static_cast<int>(i), 10.0});
      return out;
    }
    return std::vector<Outcome>{{1.0, index_of(nx, ny), -1.0}};
  };
  return average_reward_gain(static_cast<int>(cells.size()), 4, dyn);
}

// Biased RPS reduces to a two-state MDP over "opponent will repeat rock".
inline double biased_rps_optimum() {
  const auto dyn = [](int s, int a) {
    using domains::BiasedRps;
    std::vector<Outcome> out;
    if (s == 1) {  // opponent plays rock for certain
      const int r = BiasedRps::compare(a, BiasedRps::kRock);
      out.push_back({1.0, (r < 0) ? 1 : 0, static_cast<double>(r)});
    } else {
      for (int opp = 0; opp < 3; ++opp) {
        const int r = BiasedRps::compare(a, opp);
        out.push_back({1.0 / 3.0, (opp == BiasedRps::kRock && r < 0) ? 1 : 0, static_cast<double>(r)});
      }
    }
    return out;
  };
  return average_reward_gain(2, 3, dyn);
}

// Extended tiger: evaluate every listen-difference threshold policy exactly
// (gambler's-ruin absorption of the evidence walk) and take the best.
inline double tiger_optimum() {
  const double p = domains::Tiger::kListenAccuracy;
  double best = -1e300;
  for (int k = 0; k <= 40; ++k) {
    double p_correct, listens;
    if (k == 0) {
      p_correct = 0.5;
      listens = 0.0;
    } else {
      const double rho = (1.0 - p) / p;
      const double rk = std::pow(rho, k);
      p_correct = 1.0 / (1.0 + rk);  // evidence walk hits +k before -k
      // Expected listens: Gauss-Seidel on the absorption system (tiny, exact
      // to tolerance well below the comparison scale).
      std::vector<double> t(static_cast<std::size_t>(2 * k + 1), 0.0);
      for (int sweep = 0; sweep < 200000; ++sweep) {
        double delta = 0.0;
        for (int d = -k + 1; d <= k - 1; ++d) {
          const std::size_t i = static_cast<std::size_t>(d + k);
          const double v = 1.0 + p * t[i + 1] + (1.0 - p) * t[i - 1];
          delta = std::max(delta, std::abs(v - t[i]));
          t[i] = v;
        }
        if (delta < 1e-13) break;
      }
      listens = t[static_cast<std::size_t>(k)];
    }
    const double episode_reward = -listens - 1.0 + 10.0 * p_correct - 100.0 * (1.0 - p_correct);
    const double episode_len = listens + 2.0;  // listens + stand + open
    best = std::max(best, episode_reward / episode_len);
  }
  return best;
}

// Tic-tac-toe versus the uniform random opponent: renewal-reward gain found
// by bisection on g, evaluating max_pi E[reward - g per agent move] exactly
// over the game tree.
inline double tictactoe_optimum() {
  struct Solver {
    double g;
    std::map<std::uint32_t, double> memo;

    static std::uint32_t key(const std::array<int, 9>& b) {
      std::uint32_t k = 0;
      for (int c : b) k = k * 3 + static_cast<std::uint32_t>(c);
      return k;
    }

    static bool wins(const std::array<int, 9>& b, int player) {
      static constexpr int kLines[8][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6},
                                           {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};
      for (const auto& line : kLines)
        if (b[static_cast<std::size_t>(line[0])] == player && b[static_cast<std::size_t>(line[1])] == player &&
            b[static_cast<std::size_t>(line[2])] == player)
          return true;
      return false;
    }

    // Expected (episode reward - g * agent moves) from `board`, agent to act.
    double value(std::array<int, 9>& board) {
      const std::uint32_t k = key(board);
      if (const auto it = memo.find(k); it != memo.end()) return it->second;
      double best = -1e300;
      for (int a = 0; a < 9; ++a) {
        if (board[static_cast<std::size_t>(a)] != 0) continue;  // illegal moves are dominated
        board[static_cast<std::size_t>(a)] = 1;
        double v;
        if (wins(board, 1)) {
          v = 2.0 - g;
        } else {
          bool full = true;
          for (int c : board) full = full && c != 0;
          if (full) {
            v = 1.0 - g;
          } else {
            v = -g;
            int empties = 0;
            for (int c : board) empties += c == 0;
            double acc = 0.0;
            for (int o = 0; o < 9; ++o) {
              if (board[static_cast<std::size_t>(o)] != 0) continue;
              board[static_cast<std::size_t>(o)] = 2;
              acc += wins(board, 2) ? -2.0 : value(board);
              board[static_cast<std::size_t>(o)] = 0;
            }
            v += acc / empties;
          }
        }
        board[static_cast<std::size_t>(a)] = 0;
        best = std::max(best, v);
      }
      memo.emplace(k, best);
      return best;
    }
  };

  double lo = -3.0, hi = 2.0;
  for (int iter = 0; iter < 60; ++iter) {
    const double g = 0.5 * (lo + hi);
    Solver solver{g, {}};
    std::array<int, 9> board{};
    (solver.value(board) > 0.0 ? lo : hi) = g;
  }
  return 0.5 * (lo + hi);
}

// Kuhn poker: exact best response of player two to the fixed player-one
// strategy (per-information-set maximisation over the six deals).
inline double kuhn_optimum() {
  using domains::KuhnPoker;
  // ev[card][p1_bet][agent_action] accumulated over deals, weight 1/6 each.
  // Information sets partition the deals, so the best response maximises
  // each (card, p1 action) cell independently.
  double ev[3][2][2] = {};
  for (int p1 = 0; p1 < 3; ++p1) {
    for (int p2 = 0; p2 < 3; ++p2) {
      if (p1 == p2) continue;
      const double deal = 1.0 / 6.0;
      const double showdown2 = p2 > p1 ? 2.0 : -2.0;
      const double showdown1 = p2 > p1 ? 1.0 : -1.0;
      const double pb = KuhnPoker::bet_prob(p1);
      ev[p2][1][1] += deal * pb * showdown2;  // facing a bet: call
      ev[p2][1][0] += deal * pb * -1.0;       // facing a bet: fold
      const double pc = KuhnPoker::call_prob(p1);
      ev[p2][0][0] += deal * (1.0 - pb) * showdown1;                      // check it down
      ev[p2][0][1] += deal * (1.0 - pb) * (pc * showdown2 + (1.0 - pc));  // bet: called or folds
    }
  }
  double total = 0.0;
  for (int c = 0; c < 3; ++c)
    for (int b = 0; b < 2; ++b) total += std::max(ev[c][b][0], ev[c][b][1]);
  return total;
}

}  // namespace oracle

// Optimal average reward per cycle, computed by the per-domain oracle and
// cached. Pacman has no known optimum; callers substitute an estimate.
inline double optimal_average_reward(std::string_view name) {
  if (name == "grid") {
    static const double v = oracle::grid_optimum();
    return v;
  }
  if (name == "cheese-maze") {
    static const double v = oracle::cheese_maze_optimum();
    return v;
  }
  if (name == "biased-rps") {
    static const double v = oracle::biased_rps_optimum();
    return v;
  }
  if (name == "tiger") {
    static const double v = oracle::tiger_optimum();
    return v;
  }
  if (name == "tictactoe") {
    static const double v = oracle::tictactoe_optimum();
    return v;
  }
  if (name == "kuhn-poker") {
    static const double v = oracle::kuhn_optimum();
    return v;
  }
  if (name == "pacman") throw std::invalid_argument("pacman has no known optimal average reward");
  throw std::invalid_argument("unknown domain: " + std::string(name));
}

}  // namespace mcaixi
