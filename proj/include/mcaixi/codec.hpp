#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcaixi {

// A fixed-width bit string, MSB first. Wide enough for any symbol used here
// (actions and percepts are at most 26 bits across all domains).
struct BitString {
  std::uint32_t value = 0;
  int size = 0;

  int bit(int i) const { return static_cast<int>((value >> (size - 1 - i)) & 1u); }

  std::string to_string() const {
    std::string s(static_cast<std::size_t>(size), '0');
    for (int i = 0; i < size; ++i) s[static_cast<std::size_t>(i)] = bit(i) ? '1' : '0';
    return s;
  }

  friend bool operator==(const BitString&, const BitString&) = default;
};

// Declares an interaction alphabet: action space, observation space, the raw
// reward interval, and the fixed bit widths used to serialise each symbol.
// Raw rewards may be negative; reward_offset shifts them into [0, 2^reward_bits).
struct SpaceSpec {
  int action_count = 0;
  int obs_count = 0;
  int reward_min = 0;  // raw reward interval, inclusive
  int reward_max = 0;
  int action_bits = 0;
  int obs_bits = 0;
  int reward_bits = 0;
  int reward_offset = 0;

  int percept_bits() const { return obs_bits + reward_bits; }
  int cycle_bits() const { return action_bits + percept_bits(); }

  void validate() const {
    if (action_count < 1 || obs_count < 1) throw std::invalid_argument("SpaceSpec: empty space");
    if (action_bits < 1 || obs_bits < 1 || reward_bits < 1) throw std::invalid_argument("SpaceSpec: zero-width field");
    if (action_bits > 31 || obs_bits + reward_bits > 31) throw std::invalid_argument("SpaceSpec: field too wide");
    if ((1LL << action_bits) < action_count) throw std::invalid_argument("SpaceSpec: action space exceeds action_bits");
    if ((1LL << obs_bits) < obs_count) throw std::invalid_argument("SpaceSpec: observation space exceeds obs_bits");
    if (reward_min > reward_max) throw std::invalid_argument("SpaceSpec: empty reward interval");
    if (reward_min + reward_offset < 0 || reward_max + reward_offset >= (1LL << reward_bits))
      throw std::invalid_argument("SpaceSpec: offset rewards do not fit reward_bits");
  }

  friend bool operator==(const SpaceSpec&, const SpaceSpec&) = default;
};

// One observation/reward pair. `reward` is the raw (un-offset) domain reward;
// `encoded` is the exact bit image, kept so model-sampled percepts stay
// distinguishable even when their rewards were clamped.
struct Percept {
  int obs = 0;
  int reward = 0;
  std::uint32_t encoded = 0;
};

// Raised when percept bits decode to a reward outside the declared interval.
struct MalformedPercept : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline BitString encode_action(const SpaceSpec& spec, int action) {
  if (action < 0 || action >= spec.action_count)
    throw std::invalid_argument("encode_action: index out of range");
  return BitString{static_cast<std::uint32_t>(action), spec.action_bits};
}

inline int decode_action(const SpaceSpec& spec, BitString bits) {
  if (bits.size != spec.action_bits) throw std::invalid_argument("decode_action: wrong width");
  return static_cast<int>(bits.value);
}

// Observation bits precede reward bits; both fields are MSB-first binary.
// Any observation index that fits obs_bits is encodable (some domains use
// packed per-cell fields that deliberately span the whole width).
inline BitString encode_percept(const SpaceSpec& spec, int obs, int reward_raw) {
  if (obs < 0 || obs >= (1 << spec.obs_bits))
    throw std::invalid_argument("encode_percept: observation out of range");
  if (reward_raw < spec.reward_min || reward_raw > spec.reward_max)
    throw std::invalid_argument("encode_percept: reward outside declared interval");
  const std::uint32_t r = static_cast<std::uint32_t>(reward_raw + spec.reward_offset);
  const std::uint32_t v = (static_cast<std::uint32_t>(obs) << spec.reward_bits) | r;
  return BitString{v, spec.percept_bits()};
}

inline Percept decode_percept(const SpaceSpec& spec, BitString bits) {
  if (bits.size != spec.percept_bits()) throw std::invalid_argument("decode_percept: wrong width");
  const std::uint32_t rmask = (1u << spec.reward_bits) - 1u;
  const int obs = static_cast<int>(bits.value >> spec.reward_bits);
  const int reward = static_cast<int>(bits.value & rmask) - spec.reward_offset;
  if (reward < spec.reward_min || reward > spec.reward_max)
    throw MalformedPercept("decode_percept: reward outside declared interval");
  return Percept{obs, reward, bits.value};
}

// Decode for planning: a model can emit any bit pattern, so rewards outside
// the domain interval are clamped to the nearest legal value. The raw bit
// image is preserved in `encoded`. Real environment percepts are never fed
// through this path.
inline Percept decode_percept_clamped(const SpaceSpec& spec, BitString bits) {
  const std::uint32_t rmask = (1u << spec.reward_bits) - 1u;
  const int obs = static_cast<int>(bits.value >> spec.reward_bits);
  int reward = static_cast<int>(bits.value & rmask) - spec.reward_offset;
  if (reward < spec.reward_min) reward = spec.reward_min;
  if (reward > spec.reward_max) reward = spec.reward_max;
  return Percept{obs, reward, bits.value};
}

// The growing interaction string a1 x1 a2 x2 ..., optionally ending in an
// action. The bit view is derived from the symbol view on demand.
class History {
 public:
  struct Cycle {
    int action = 0;
    int obs = 0;
    int reward = 0;
  };

  void push_action(int action) {
    if (pending_) throw std::logic_error("History: consecutive actions");
    pending_action_ = action;
    pending_ = true;
  }

  void push_percept(int obs, int reward) {
    if (!pending_) throw std::logic_error("History: percept without action");
    cycles_.push_back(Cycle{pending_action_, obs, reward});
    pending_ = false;
  }

  std::size_t cycles() const { return cycles_.size(); }
  bool ends_with_action() const { return pending_; }
  int pending_action() const { return pending_action_; }
  const Cycle& cycle(std::size_t i) const { return cycles_[i]; }

  std::uint64_t bit_length(const SpaceSpec& spec) const {
    return cycles_.size() * static_cast<std::uint64_t>(spec.cycle_bits()) +
           (pending_ ? static_cast<std::uint64_t>(spec.action_bits) : 0);
  }

  // Concatenated bit image of the whole history.
  std::vector<std::uint8_t> bits(const SpaceSpec& spec) const {
    std::vector<std::uint8_t> out;
    out.reserve(bit_length(spec));
    auto append = [&out](BitString b) {
      for (int i = 0; i < b.size; ++i) out.push_back(static_cast<std::uint8_t>(b.bit(i)));
    };
    for (const Cycle& c : cycles_) {
      append(encode_action(spec, c.action));
      append(encode_percept(spec, c.obs, c.reward));
    }
    if (pending_) append(encode_action(spec, pending_action_));
    return out;
  }

  void clear() {
    cycles_.clear();
    pending_ = false;
  }

 private:
  std::vector<Cycle> cycles_;
  int pending_action_ = 0;
  bool pending_ = false;
};

}  // namespace mcaixi
