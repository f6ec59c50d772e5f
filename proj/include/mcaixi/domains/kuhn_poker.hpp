#pragma once

#include "mcaixi/environment.hpp"

namespace mcaixi::domains {

// Kuhn poker with the agent as player two against a fixed Nash-optimal
// player one (bluff parameter 1/3: bet jack with 1/3, never bet queen,
// always bet king; facing a bet after checking, call with the king always,
// with the queen 2/3 of the time, never with the jack). Each cycle is one
// hand: the action is the agent's decision (0 = pass, 1 = bet) for the hand
// described by the previous observation, the reward is the hand's net
// chips, and the observation shows the next hand's card and player one's
// opening action.
class KuhnPoker final : public Environment {
 public:
  enum Card { kJack = 0, kQueen = 1, kKing = 2 };

  static SpaceSpec make_spec() {
    SpaceSpec s;
    s.action_count = 2;
    s.obs_count = 6;  // card x opponent opening action
    s.reward_min = -2;
    s.reward_max = 2;
    s.action_bits = 1;
    s.obs_bits = 4;
    s.reward_bits = 3;
    s.reward_offset = 2;
    return s;
  }

  explicit KuhnPoker(std::uint64_t seed) : Environment(make_spec()) {
    rng_ = derive_rng(seed, 0xca3d);
    deal();
  }

  std::pair<int, int> step(int action) override {
    int reward;
    if (p1_bet_) {
      if (action == 1) {  // call
        reward = agent_card_ > p1_card_ ? 2 : -2;
      } else {  // fold
        reward = -1;
      }
    } else {
      if (action == 1) {  // bet after the check
        if (bernoulli(rng_, call_prob(p1_card_))) {
          reward = agent_card_ > p1_card_ ? 2 : -2;
        } else {
          reward = 1;
        }
      } else {  // check it down
        reward = agent_card_ > p1_card_ ? 1 : -1;
      }
    }
    deal();
    return {observation(), reward};
  }

  std::unique_ptr<Environment> clone() const override { return std::make_unique<KuhnPoker>(*this); }

  int observation() const { return agent_card_ * 2 + (p1_bet_ ? 1 : 0); }

  static double bet_prob(int card) {
    switch (card) {
      case kJack: return 1.0 / 3.0;
      case kQueen: return 0.0;
      default: return 1.0;
    }
  }

  static double call_prob(int card) {
    switch (card) {
      case kJack: return 0.0;
      case kQueen: return 2.0 / 3.0;
      default: return 1.0;
    }
  }

 private:
  void deal() {
    p1_card_ = uniform_int(rng_, 3);
    agent_card_ = uniform_int(rng_, 2);
    if (agent_card_ >= p1_card_) ++agent_card_;  // second card drawn without replacement
    p1_bet_ = bernoulli(rng_, bet_prob(p1_card_));
  }

  int p1_card_ = 0;
  int agent_card_ = 0;
  bool p1_bet_ = false;
};

}  // namespace mcaixi::domains
