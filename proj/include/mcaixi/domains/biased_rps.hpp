#pragma once

#include "mcaixi/environment.hpp"

namespace mcaixi::domains {

// Rock-paper-scissors against an exploitable opponent: after winning a round
// with rock it plays rock again for certain, otherwise it plays uniformly at
// random. Rewards are +1 / 0 / -1 for win / draw / loss; the observation is
// the opponent's move this round.
class BiasedRps final : public Environment {
 public:
  enum Move { kRock = 0, kPaper = 1, kScissors = 2 };

  static SpaceSpec make_spec() {
    SpaceSpec s;
    s.action_count = 3;
    s.obs_count = 3;
    s.reward_min = -1;
    s.reward_max = 1;
    s.action_bits = 2;
    s.obs_bits = 2;
    s.reward_bits = 2;
    s.reward_offset = 1;
    return s;
  }

  explicit BiasedRps(std::uint64_t seed) : Environment(make_spec()) { rng_ = derive_rng(seed, 0x4b5); }

  std::pair<int, int> step(int action) override {
    const int opp = repeat_rock_ ? kRock : uniform_int(rng_, 3);
    const int outcome = compare(action, opp);  // +1 agent wins
    repeat_rock_ = (opp == kRock && outcome < 0);
    return {opp, outcome};
  }

  std::unique_ptr<Environment> clone() const override { return std::make_unique<BiasedRps>(*this); }

  // +1 if a beats b, -1 if b beats a, 0 on a draw.
  static int compare(int a, int b) {
    if (a == b) return 0;
    return (a - b + 3) % 3 == 1 ? 1 : -1;
  }

 private:
  bool repeat_rock_ = false;
};

}  // namespace mcaixi::domains
