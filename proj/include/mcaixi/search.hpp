#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "mcaixi/model.hpp"
#include "mcaixi/rng.hpp"

namespace mcaixi {

struct PlannerConfig {
  int horizon = 1;                        // m
  double ucb_c = std::numbers::sqrt2;     // exploration constant C
  double reward_min = 0.0;                // alpha: smallest single-cycle reward
  double reward_max = 1.0;                // beta: largest single-cycle reward
  std::uint64_t simulations = 0;          // simulation budget (primary contract)
  double time_budget_s = 0.0;             // optional wall-clock budget
  // Instrumentation: called after each simulation with (index, per-action root values).
  std::function<void(std::uint64_t, const std::vector<double>&)> root_value_hook;
  // Called at every backup with the node and the return backed into it.
  std::function<void(const void*, double)> backup_hook;

  void validate(int action_count) const {
    if (horizon < 1) throw std::invalid_argument("PlannerConfig: horizon < 1");
    if (!(reward_min < reward_max)) throw std::invalid_argument("PlannerConfig: need reward_min < reward_max");
    if (ucb_c <= 0.0) throw std::invalid_argument("PlannerConfig: need C > 0");
    if (simulations == 0 && time_budget_s <= 0.0) throw std::invalid_argument("PlannerConfig: zero budget");
    if (action_count < 1 || action_count > 64) throw std::invalid_argument("PlannerConfig: unsupported action count");
  }
};

// A node of the rhoUCT tree. Decision nodes (history ends with a percept)
// hold children per action; chance nodes (history ends with an action) hold
// children per sampled percept, keyed by the percept's exact bit image.
struct SearchNode {
  enum class Kind : std::uint8_t { decision, chance };

  explicit SearchNode(Kind k) : kind(k) {}

  Kind kind;
  std::uint64_t visits = 0;
  double value = 0.0;  // mean return over the remaining horizon
  std::vector<std::unique_ptr<SearchNode>> action_children;
  std::unordered_map<std::uint32_t, std::unique_ptr<SearchNode>> percept_children;

  SearchNode& ensure_action_child(int a, int action_count) {
    if (action_children.empty()) action_children.resize(static_cast<std::size_t>(action_count));
    auto& slot = action_children[static_cast<std::size_t>(a)];
    if (!slot) slot = std::make_unique<SearchNode>(Kind::chance);
    return *slot;
  }

  SearchNode* action_child(int a) {
    if (action_children.empty()) return nullptr;
    return action_children[static_cast<std::size_t>(a)].get();
  }

  SearchNode& ensure_percept_child(std::uint32_t encoded) {
    auto& slot = percept_children[encoded];
    if (!slot) slot = std::make_unique<SearchNode>(Kind::decision);
    return *slot;
  }

  std::size_t subtree_size() const {
    std::size_t n = 1;
    for (const auto& c : action_children)
      if (c) n += c->subtree_size();
    for (const auto& [k, c] : percept_children) n += c->subtree_size();
    return n;
  }
};

// Uniform-random play to the horizon; the accumulated reward seeds the value
// estimate of an unexplored node. Model updates accrue to the caller's mark.
template <PlanningModel Model>
double rollout(Model& model, int m_remaining, std::mt19937_64& rng) {
  const int actions = model.space().action_count;
  double total = 0.0;
  for (int i = 0; i < m_remaining; ++i) {
    model.push_action(uniform_int(rng, actions));
    total += model.sample_percept(rng).reward;
  }
  return total;
}

// UCB action choice at a decision node. Unexplored actions first (uniformly
// at random), then the argmax of the horizon-normalised value plus the
// exploration bonus; ties are broken uniformly at random.
inline int select_ucb_action(SearchNode& node, const PlannerConfig& cfg, int m_remaining, int action_count,
                             std::mt19937_64& rng) {
  int unexplored[64];
  int n_unexplored = 0;
  for (int a = 0; a < action_count; ++a) {
    const SearchNode* child = node.action_child(a);
    if (!child || child->visits == 0) unexplored[n_unexplored++] = a;
  }
  if (n_unexplored > 0) {
    const int a = unexplored[uniform_int(rng, n_unexplored)];
    node.ensure_action_child(a, action_count);
    return a;
  }

  const double scale = static_cast<double>(m_remaining) * (cfg.reward_max - cfg.reward_min);
  const double log_n = std::log(static_cast<double>(node.visits));
  double best = -std::numeric_limits<double>::infinity();
  int ties[64];
  int n_ties = 0;
  for (int a = 0; a < action_count; ++a) {
    const SearchNode* child = node.action_child(a);
    const double ucb =
        child->value / scale + cfg.ucb_c * std::sqrt(log_n / static_cast<double>(child->visits));
    if (ucb > best) {
      best = ucb;
      n_ties = 0;
    }
    if (ucb == best) ties[n_ties++] = a;
  }
  return n_ties == 1 ? ties[0] : ties[uniform_int(rng, n_ties)];
}

// One simulated trajectory: chance nodes sample a percept from the model
// (updating it), fresh decision nodes play a rollout, visited ones recurse
// through UCB; the return is then averaged into every traversed node.
template <PlanningModel Model>
double sample_trajectory(SearchNode& node, Model& model, const PlannerConfig& cfg, int m_remaining,
                         std::mt19937_64& rng, bool at_root = false) {
  if (m_remaining == 0) return 0.0;

  double ret;
  if (node.kind == SearchNode::Kind::chance) {
    const Percept x = model.sample_percept(rng);
    SearchNode& child = node.ensure_percept_child(x.encoded);
    ret = static_cast<double>(x.reward) + sample_trajectory(child, model, cfg, m_remaining - 1, rng);
  } else if (node.visits == 0 && !at_root) {
    ret = rollout(model, m_remaining, rng);
  } else {
    const int a = select_ucb_action(node, cfg, m_remaining, model.space().action_count, rng);
    model.push_action(a);
    SearchNode& child = node.ensure_action_child(a, model.space().action_count);
    ret = sample_trajectory(child, model, cfg, m_remaining, rng);
  }

  node.value = (ret + static_cast<double>(node.visits) * node.value) / static_cast<double>(node.visits + 1);
  node.visits += 1;
  if (cfg.backup_hook) cfg.backup_hook(&node, ret);
  return ret;
}

// Final action choice: argmax of the children's value estimates, ties
// uniform at random. Only meaningful after at least one simulation.
inline int best_action(const SearchNode& root, int action_count, std::mt19937_64& rng) {
  double best = -std::numeric_limits<double>::infinity();
  int ties[64];
  int n_ties = 0;
  for (int a = 0; a < action_count; ++a) {
    const SearchNode* child =
        root.action_children.empty() ? nullptr : root.action_children[static_cast<std::size_t>(a)].get();
    if (!child || child->visits == 0) continue;
    if (child->value > best) {
      best = child->value;
      n_ties = 0;
    }
    if (child->value == best) ties[n_ties++] = a;
  }
  if (n_ties == 0) throw std::logic_error("best_action: no visited child");
  return n_ties == 1 ? ties[0] : ties[uniform_int(rng, n_ties)];
}

struct SearchStats {
  std::uint64_t simulations = 0;
  double seconds = 0.0;
  double root_value = 0.0;                 // V-hat at the root
  std::vector<double> action_values;       // V-hat per root action (NaN if unvisited)
  std::vector<std::uint64_t> action_visits;
};

// The full planner: builds a fresh search tree, runs simulations until the
// budget is exhausted, restores the model to its entry state, and returns
// the best action. Anytime: with a time budget at least one simulation runs.
template <PlanningModel Model>
int rho_uct_search(Model& model, const PlannerConfig& cfg, std::mt19937_64& rng, SearchStats* stats = nullptr) {
  const int actions = model.space().action_count;
  cfg.validate(actions);

  SearchNode root(SearchNode::Kind::decision);
  const std::size_t entry = model.mark();
  const auto t0 = std::chrono::steady_clock::now();
  std::uint64_t sims = 0;
  std::vector<double> hook_values;

  while (true) {
    if (cfg.simulations > 0 && sims >= cfg.simulations) break;
    if (cfg.time_budget_s > 0.0 && sims > 0) {
      const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (elapsed >= cfg.time_budget_s) break;
    }
    sample_trajectory(root, model, cfg, cfg.horizon, rng, /*at_root=*/true);
    model.rollback_to(entry);
    ++sims;
    if (cfg.root_value_hook) {
      hook_values.assign(static_cast<std::size_t>(actions), std::numeric_limits<double>::quiet_NaN());
      for (int a = 0; a < actions; ++a)
        if (const SearchNode* c = root.action_child(a); c && c->visits > 0)
          hook_values[static_cast<std::size_t>(a)] = c->value;
      cfg.root_value_hook(sims, hook_values);
    }
  }

  if (stats) {
    stats->simulations = sims;
    stats->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    stats->root_value = root.value;
    stats->action_values.assign(static_cast<std::size_t>(actions), std::numeric_limits<double>::quiet_NaN());
    stats->action_visits.assign(static_cast<std::size_t>(actions), 0);
    for (int a = 0; a < actions; ++a) {
      if (const SearchNode* c = root.action_child(a); c && c->visits > 0) {
        stats->action_values[static_cast<std::size_t>(a)] = c->value;
        stats->action_visits[static_cast<std::size_t>(a)] = c->visits;
      }
    }
  }
  return best_action(root, actions, rng);
}

struct ExpectimaxResult {
  double value = 0.0;
  int action = -1;
};

namespace detail {

template <PlanningModel Model>
double expectimax_value(Model& model, const std::vector<Percept>& percepts, int m, int* best_act) {
  if (m == 0) return 0.0;
  const int actions = model.space().action_count;
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < actions; ++a) {
    const std::size_t mark = model.mark();
    model.push_action(a);
    double ev = 0.0;
    for (const Percept& x : percepts) {
      const double lp0 = model.log_block();
      const std::size_t pmark = model.mark();
      model.push_percept(x);
      const double p = std::exp(model.log_block() - lp0);
      if (p > 0.0) ev += p * (static_cast<double>(x.reward) + expectimax_value(model, percepts, m - 1, nullptr));
      model.rollback_to(pmark);
    }
    model.rollback_to(mark);
    if (ev > best) {
      best = ev;
      if (best_act) *best_act = a;
    }
  }
  return best;
}

}  // namespace detail

// Exact full-width expectimax over the model's percept alphabet, used as the
// ground-truth oracle for planner tests. Refuses instances that would
// enumerate more than ~1e6 leaves.
template <PlanningModel Model>
ExpectimaxResult expectimax_exact(Model& model, int horizon) {
  const std::vector<Percept> percepts = model.enumerate_percepts();
  const double leaves =
      std::pow(static_cast<double>(model.space().action_count) * static_cast<double>(percepts.size()),
               static_cast<double>(horizon));
  if (leaves > 1e6) throw std::invalid_argument("expectimax_exact: instance too large");
  ExpectimaxResult r;
  r.value = detail::expectimax_value(model, percepts, horizon, &r.action);
  return r;
}

}  // namespace mcaixi
