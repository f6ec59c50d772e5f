#pragma once

// Small exact environment models used to test the planner against known
// values. Each keeps an event stack so marks and rollbacks behave exactly
// like the context-tree model's journal.

#include <cmath>
#include <vector>

#include "mcaixi/codec.hpp"
#include "mcaixi/rng.hpp"

namespace toy {

using mcaixi::BitString;
using mcaixi::Percept;
using mcaixi::SpaceSpec;

// Base: log_block accumulates the log probability of every pushed percept.
// Each event remembers the prefix value, so rollback restores it exactly
// even through -inf (impossible percepts forced by an expectimax sweep).
class StackModel {
 public:
  std::size_t mark() const { return events_.size(); }

  void rollback_to(std::size_t mark) {
    while (events_.size() > mark) {
      log_block_ = events_.back().prev_log_block;
      events_.pop_back();
    }
  }

  double log_block() const { return log_block_; }

 protected:
  struct Event {
    int action = -1;    // -1 for percepts
    Percept percept;
    double logp = 0.0;  // 0 for actions
    double prev_log_block = 0.0;
  };

  void push_event(Event e) {
    e.prev_log_block = log_block_;
    log_block_ += e.logp;
    events_.push_back(e);
  }

  int last_action() const {
    for (auto it = events_.rbegin(); it != events_.rend(); ++it)
      if (it->action >= 0) return it->action;
    return -1;
  }

  std::vector<Event> events_;
  double log_block_ = 0.0;
};

// Guess the coin: observation is 1 with probability `bias`, reward 1 when
// the action matched the observation. Exact value per cycle is
// max(bias, 1 - bias).
class CoinGuessModel : public StackModel {
 public:
  explicit CoinGuessModel(double bias = 0.5) : bias_(bias) {
    spec_.action_count = 2;
    spec_.obs_count = 2;
    spec_.reward_min = 0;
    spec_.reward_max = 1;
    spec_.action_bits = 1;
    spec_.obs_bits = 1;
    spec_.reward_bits = 1;
    spec_.reward_offset = 0;
  }

  const SpaceSpec& space() const { return spec_; }

  void push_action(int action) { push_event(Event{action, {}, 0.0}); }

  void push_percept(const Percept& x) { push_event(Event{-1, x, std::log(prob(x))}); }

  Percept sample_percept(std::mt19937_64& rng) {
    const int obs = mcaixi::bernoulli(rng, bias_) ? 1 : 0;
    const int reward = obs == last_action() ? 1 : 0;
    const Percept x{obs, reward, mcaixi::encode_percept(spec_, obs, reward).value};
    push_event(Event{-1, x, std::log(obs == 1 ? bias_ : 1.0 - bias_)});
    return x;
  }

  std::vector<Percept> enumerate_percepts() const {
    std::vector<Percept> out;
    for (int obs = 0; obs < 2; ++obs)
      for (int r = 0; r < 2; ++r) out.push_back(Percept{obs, r, mcaixi::encode_percept(spec_, obs, r).value});
    return out;
  }

 private:
  double prob(const Percept& x) const {
    const int expect_reward = x.obs == last_action() ? 1 : 0;
    if (x.reward != expect_reward) return 0.0;
    return x.obs == 1 ? bias_ : 1.0 - bias_;
  }

  SpaceSpec spec_;
  double bias_;
};

// Two arms, deterministic rewards 1 and 0, constant observation.
class TwoArmedBanditModel : public StackModel {
 public:
  TwoArmedBanditModel() {
    spec_.action_count = 2;
    spec_.obs_count = 1;
    spec_.reward_min = 0;
    spec_.reward_max = 1;
    spec_.action_bits = 1;
    spec_.obs_bits = 1;
    spec_.reward_bits = 1;
    spec_.reward_offset = 0;
  }

  const SpaceSpec& space() const { return spec_; }
  void push_action(int action) { push_event(Event{action, {}, 0.0}); }

  void push_percept(const Percept& x) {
    push_event(Event{-1, x, x.reward == expected_reward() ? 0.0 : -1e300});
  }

  Percept sample_percept(std::mt19937_64&) {
    const int r = expected_reward();
    const Percept x{0, r, mcaixi::encode_percept(spec_, 0, r).value};
    push_event(Event{-1, x, 0.0});
    return x;
  }

  std::vector<Percept> enumerate_percepts() const {
    std::vector<Percept> out;
    for (int r = 0; r < 2; ++r) out.push_back(Percept{0, r, mcaixi::encode_percept(spec_, 0, r).value});
    return out;
  }

 private:
  int expected_reward() const { return last_action() == 0 ? 1 : 0; }

  SpaceSpec spec_;
};

// Always pays reward 1 whatever happens; for forced-sum sanity checks.
class ConstantRewardModel : public StackModel {
 public:
  ConstantRewardModel() {
    spec_.action_count = 2;
    spec_.obs_count = 1;
    spec_.reward_min = 0;
    spec_.reward_max = 1;
    spec_.action_bits = 1;
    spec_.obs_bits = 1;
    spec_.reward_bits = 1;
    spec_.reward_offset = 0;
  }

  const SpaceSpec& space() const { return spec_; }
  void push_action(int action) { push_event(Event{action, {}, 0.0}); }
  void push_percept(const Percept& x) { push_event(Event{-1, x, x.reward == 1 ? 0.0 : -1e300}); }

  Percept sample_percept(std::mt19937_64&) {
    const Percept x{0, 1, mcaixi::encode_percept(spec_, 0, 1).value};
    push_event(Event{-1, x, 0.0});
    return x;
  }

  std::vector<Percept> enumerate_percepts() const {
    std::vector<Percept> out;
    for (int r = 0; r < 2; ++r) out.push_back(Percept{0, r, mcaixi::encode_percept(spec_, 0, r).value});
    return out;
  }

 private:
  SpaceSpec spec_;
};

}  // namespace toy
