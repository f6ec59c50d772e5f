#pragma once

#include "mcaixi/environment.hpp"

namespace mcaixi::domains {

// Extended tiger: a tiger hides behind one of two doors and the agent starts
// seated. Listening (while seated) reveals the tiger's side with probability
// 0.85 for -1; standing up costs -1; opening a door (while standing) pays
// +10 for gold or -100 for the tiger and restarts the episode with the
// agent seated and the tiger re-randomised. Actions invalid in the current
// posture cost -10 and change nothing.
class Tiger final : public Environment {
 public:
  enum Action { kListen = 0, kStand = 1, kOpenLeft = 2, kOpenRight = 3 };
  enum Obs { kNothing = 0, kHeardLeft = 1, kHeardRight = 2 };

  static constexpr double kListenAccuracy = 0.85;

  static SpaceSpec make_spec() {
    SpaceSpec s;
    s.action_count = 4;
    s.obs_count = 3;
    s.reward_min = -100;
    s.reward_max = 10;
    s.action_bits = 2;
    s.obs_bits = 2;
    s.reward_bits = 7;
    s.reward_offset = 100;
    return s;
  }

  explicit Tiger(std::uint64_t seed) : Environment(make_spec()) {
    rng_ = derive_rng(seed, 0x7193);
    tiger_left_ = bernoulli(rng_, 0.5);
  }

  std::pair<int, int> step(int action) override {
    switch (action) {
      case kListen: {
        if (standing_) return {kNothing, -10};
        const bool correct = bernoulli(rng_, kListenAccuracy);
        const bool heard_left = correct ? tiger_left_ : !tiger_left_;
        return {heard_left ? kHeardLeft : kHeardRight, -1};
      }
      case kStand:
        if (standing_) return {kNothing, -10};
        standing_ = true;
        return {kNothing, -1};
      case kOpenLeft:
      case kOpenRight: {
        if (!standing_) return {kNothing, -10};
        const bool opened_tiger = (action == kOpenLeft) == tiger_left_;
        tiger_left_ = bernoulli(rng_, 0.5);
        standing_ = false;
        return {kNothing, opened_tiger ? -100 : 10};
      }
      default:
        return {kNothing, -10};
    }
  }

  std::unique_ptr<Environment> clone() const override { return std::make_unique<Tiger>(*this); }

 private:
  bool tiger_left_ = true;
  bool standing_ = false;
};

}  // namespace mcaixi::domains
