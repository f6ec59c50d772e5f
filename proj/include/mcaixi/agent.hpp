#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcaixi/agent_io.hpp"
#include "mcaixi/codec.hpp"
#include "mcaixi/context_tree.hpp"
#include "mcaixi/environment.hpp"
#include "mcaixi/model.hpp"
#include "mcaixi/rng.hpp"
#include "mcaixi/search.hpp"

namespace mcaixi {

// Exponentially decaying exploration rate with a floor.
struct EpsSchedule {
  double eps0 = 1.0;
  double decay = 0.99999;
  double floor = 0.05;

  double at(std::uint64_t t) const {
    return std::max(floor, eps0 * std::pow(decay, static_cast<double>(t)));
  }

  friend bool operator==(const EpsSchedule&, const EpsSchedule&) = default;
};

struct AgentConfig {
  std::string domain;
  int depth = 1;               // context depth D
  int horizon = 1;             // search horizon m
  std::uint64_t simulations = 100;
  double ucb_c = 1.4142135623730951;
  EpsSchedule eps;
  std::uint64_t seed = 0;
  bool learn_during_eval = true;

  void validate() const {
    if (depth < 1) throw std::invalid_argument("AgentConfig: depth must be >= 1");
    if (horizon < 1) throw std::invalid_argument("AgentConfig: horizon must be >= 1");
    if (simulations < 1) throw std::invalid_argument("AgentConfig: simulations must be >= 1");
    if (ucb_c <= 0.0) throw std::invalid_argument("AgentConfig: ucb_c must be > 0");
    if (!(eps.floor >= 0.0 && eps.floor <= eps.eps0 && eps.eps0 <= 1.0))
      throw std::invalid_argument("AgentConfig: need 0 <= eps_min <= eps0 <= 1");
    if (!(eps.decay > 0.0 && eps.decay <= 1.0)) throw std::invalid_argument("AgentConfig: need 0 < eps_decay <= 1");
  }

  friend bool operator==(const AgentConfig&, const AgentConfig&) = default;
};

struct CycleRecord {
  std::uint64_t cycle = 0;
  int action = 0;
  int obs = 0;
  int reward = 0;
  double epsilon = 0.0;
  bool was_random = false;
  double search_seconds = 0.0;
  std::uint64_t simulations = 0;
};

struct EvalResult {
  double mean_reward = 0.0;
  double mean_search_seconds = 0.0;
  std::uint64_t cycles = 0;
};

// Binds the CTW mixture model and the rhoUCT planner into the interaction
// loop: epsilon-greedy experience gathering, committed model updates every
// cycle, and greedy evaluation (the model keeps learning during evaluation
// unless configured otherwise).
class Agent {
 public:
  enum class Mode { explore, greedy };

  Agent(AgentConfig config, SpaceSpec spec)
      : config_(std::move(config)),
        spec_(spec),
        tree_(config_.depth),
        policy_rng_(derive_rng(config_.seed, 1)),
        planner_rng_(derive_rng(config_.seed, 2)) {
    config_.validate();
    spec_.validate();
  }

  const AgentConfig& config() const { return config_; }
  const SpaceSpec& space() const { return spec_; }
  const ContextTree& model() const { return tree_; }
  ContextTree& model() { return tree_; }
  const History& history() const { return history_; }
  std::uint64_t cycles() const { return cycles_; }
  std::uint64_t train_cycles() const { return train_cycles_; }
  double total_reward() const { return total_reward_; }

  CycleRecord run_cycle(Environment& env, Mode mode) {
    CycleRecord rec;
    rec.cycle = cycles_;

    double eps = 0.0;
    if (mode == Mode::explore) {
      eps = config_.eps.at(train_cycles_);
      rec.was_random = uniform01(policy_rng_) < eps;
    }
    rec.epsilon = eps;

    if (rec.was_random) {
      rec.action = uniform_int(policy_rng_, spec_.action_count);
    } else {
      CtwModel model(tree_, spec_);
      SearchStats stats;
      rec.action = rho_uct_search(model, planner_config(), planner_rng_, &stats);
      rec.search_seconds = stats.seconds;
      rec.simulations = stats.simulations;
    }

    CtwModel model(tree_, spec_);
    model.push_action(rec.action);
    const auto [obs, reward] = env.step(rec.action);
    rec.obs = obs;
    rec.reward = reward;
    const BitString bits = encode_percept(spec_, obs, reward);
    if (learning_enabled_) {
      model.push_percept(Percept{obs, reward, bits.value});
    } else {
      tree_.condition_action_bits(bits);  // frozen model: context advances, counts do not
    }
    tree_.commit();

    history_.push_action(rec.action);
    history_.push_percept(obs, reward);
    total_reward_ += reward;
    ++cycles_;
    if (mode == Mode::explore) ++train_cycles_;
    return rec;
  }

  std::vector<CycleRecord> run_training(Environment& env, std::uint64_t n) {
    std::vector<CycleRecord> records;
    records.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) records.push_back(run_cycle(env, Mode::explore));
    return records;
  }

  // Pure greedy evaluation; returns the mean raw reward per cycle. The
  // epsilon schedule state is untouched.
  EvalResult run_greedy_eval(Environment& env, std::uint64_t n) {
    learning_enabled_ = config_.learn_during_eval;
    double reward = 0.0;
    double search = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
      const CycleRecord rec = run_cycle(env, Mode::greedy);
      reward += rec.reward;
      search += rec.search_seconds;
    }
    learning_enabled_ = true;
    return EvalResult{reward / static_cast<double>(n), search / static_cast<double>(n), n};
  }

  // --- snapshot: agent metadata wrapped around the model snapshot ---

  void save(std::ostream& out) const {
    out.write("MCAIXIAG", 8);
    io::write_u32(out, 1);  // version
    io::write_string(out, config_.domain);
    io::write_u32(out, static_cast<std::uint32_t>(config_.depth));
    io::write_u32(out, static_cast<std::uint32_t>(config_.horizon));
    io::write_u64(out, config_.simulations);
    io::write_f64(out, config_.ucb_c);
    io::write_f64(out, config_.eps.eps0);
    io::write_f64(out, config_.eps.decay);
    io::write_f64(out, config_.eps.floor);
    io::write_u64(out, config_.seed);
    out.put(config_.learn_during_eval ? 1 : 0);
    io::write_u32(out, spec_.action_count);
    io::write_u32(out, spec_.obs_count);
    io::write_i32(out, spec_.reward_min);
    io::write_i32(out, spec_.reward_max);
    io::write_u32(out, spec_.action_bits);
    io::write_u32(out, spec_.obs_bits);
    io::write_u32(out, spec_.reward_bits);
    io::write_i32(out, spec_.reward_offset);
    io::write_u64(out, cycles_);
    io::write_u64(out, train_cycles_);
    io::write_f64(out, total_reward_);
    io::write_rng(out, policy_rng_);
    io::write_rng(out, planner_rng_);
    io::write_u64(out, history_.cycles());
    for (std::size_t i = 0; i < history_.cycles(); ++i) {
      const History::Cycle& c = history_.cycle(i);
      io::write_i32(out, c.action);
      io::write_i32(out, c.obs);
      io::write_i32(out, c.reward);
    }
    out.put(history_.ends_with_action() ? 1 : 0);
    if (history_.ends_with_action()) io::write_i32(out, history_.pending_action());
    tree_.save(out);
    if (!out) throw std::runtime_error("Agent::save: write failure");
  }

  static Agent load(std::istream& in) {
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string(magic, 8) != "MCAIXIAG") throw std::runtime_error("Agent::load: bad magic");
    if (io::read_u32(in) != 1) throw std::runtime_error("Agent::load: unsupported version");
    AgentConfig cfg;
    cfg.domain = io::read_string(in);
    cfg.depth = static_cast<int>(io::read_u32(in));
    cfg.horizon = static_cast<int>(io::read_u32(in));
    cfg.simulations = io::read_u64(in);
    cfg.ucb_c = io::read_f64(in);
    cfg.eps.eps0 = io::read_f64(in);
    cfg.eps.decay = io::read_f64(in);
    cfg.eps.floor = io::read_f64(in);
    cfg.seed = io::read_u64(in);
    cfg.learn_during_eval = in.get() != 0;
    SpaceSpec spec;
    spec.action_count = static_cast<int>(io::read_u32(in));
    spec.obs_count = static_cast<int>(io::read_u32(in));
    spec.reward_min = io::read_i32(in);
    spec.reward_max = io::read_i32(in);
    spec.action_bits = static_cast<int>(io::read_u32(in));
    spec.obs_bits = static_cast<int>(io::read_u32(in));
    spec.reward_bits = static_cast<int>(io::read_u32(in));
    spec.reward_offset = io::read_i32(in);

    Agent agent(cfg, spec);
    agent.cycles_ = io::read_u64(in);
    agent.train_cycles_ = io::read_u64(in);
    agent.total_reward_ = io::read_f64(in);
    agent.policy_rng_ = io::read_rng(in);
    agent.planner_rng_ = io::read_rng(in);
    const std::uint64_t n = io::read_u64(in);
    for (std::uint64_t i = 0; i < n; ++i) {
      const int a = io::read_i32(in);
      const int o = io::read_i32(in);
      const int r = io::read_i32(in);
      agent.history_.push_action(a);
      agent.history_.push_percept(o, r);
    }
    if (in.get() != 0) agent.history_.push_action(io::read_i32(in));
    agent.tree_ = ContextTree::load(in);
    agent.tree_.set_context(agent.history_.bits(spec));
    if (!in) throw std::runtime_error("Agent::load: truncated stream");
    return agent;
  }

  PlannerConfig planner_config() const {
    PlannerConfig cfg;
    cfg.horizon = config_.horizon;
    cfg.ucb_c = config_.ucb_c;
    cfg.reward_min = spec_.reward_min;
    cfg.reward_max = spec_.reward_max;
    cfg.simulations = config_.simulations;
    return cfg;
  }

 private:
  AgentConfig config_;
  SpaceSpec spec_;
  ContextTree tree_;
  History history_;
  std::mt19937_64 policy_rng_;
  std::mt19937_64 planner_rng_;
  std::uint64_t cycles_ = 0;
  std::uint64_t train_cycles_ = 0;
  double total_reward_ = 0.0;
  bool learning_enabled_ = true;
};

}  // namespace mcaixi
