#pragma once

#include <memory>
#include <random>
#include <utility>

#include "mcaixi/codec.hpp"
#include "mcaixi/rng.hpp"

namespace mcaixi {

// An interactive simulator of a reactive environment: feed it an action,
// get back an observation and a raw reward. Deterministic given its seed
// and the action sequence. Episodic domains reset themselves internally;
// the interaction stream never terminates.
class Environment {
 public:
  virtual ~Environment() = default;

  const SpaceSpec& space() const { return spec_; }

  // Advances the hidden state; every action index in range is accepted
  // (domain rules decide what an "illegal" move costs).
  virtual std::pair<int, int> step(int action) = 0;

  virtual std::unique_ptr<Environment> clone() const = 0;

 protected:
  explicit Environment(SpaceSpec spec) : spec_(spec) { spec_.validate(); }

  SpaceSpec spec_;
  std::mt19937_64 rng_;
};

}  // namespace mcaixi
