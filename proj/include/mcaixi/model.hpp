#pragma once

#include <concepts>
#include <cstdint>
#include <random>
#include <vector>

#include "mcaixi/codec.hpp"
#include "mcaixi/context_tree.hpp"

namespace mcaixi {

// What the planner needs from an environment model: advance it by actions
// and percepts (sampled or forced), read the joint log probability of
// everything fed so far, and roll back to a mark. Satisfied by CtwModel and
// by the exact toy models used in tests.
template <typename M>
concept PlanningModel = requires(M& m, const M& cm, std::mt19937_64& rng, const Percept& x) {
  { cm.space() } -> std::convertible_to<const SpaceSpec&>;
  { cm.mark() } -> std::convertible_to<std::size_t>;
  { m.rollback_to(std::size_t{}) };
  { m.push_action(0) };
  { m.push_percept(x) };
  { m.sample_percept(rng) } -> std::convertible_to<Percept>;
  { cm.log_block() } -> std::convertible_to<double>;
};

// The context-tree mixture exposed as a planning model. Non-owning view: the
// agent keeps the tree, planners drive it through this adapter and are
// expected to roll back everything they pushed.
class CtwModel {
 public:
  CtwModel(ContextTree& tree, const SpaceSpec& spec) : tree_(&tree), spec_(&spec) {}

  const SpaceSpec& space() const { return *spec_; }
  double log_block() const { return tree_->log_block(); }
  std::size_t mark() const { return tree_->journal_size(); }
  void rollback_to(std::size_t mark) { tree_->revert_to(mark); }

  void push_action(int action) { tree_->condition_action_bits(encode_action(*spec_, action)); }

  void push_percept(const Percept& x) {
    const BitString bits{x.encoded, spec_->percept_bits()};
    for (int i = 0; i < bits.size; ++i) tree_->update_percept_bit(bits.bit(i));
  }

  // Samples the percept bits one by one, updating the model as if they had
  // been observed. Rewards outside the domain interval are clamped.
  Percept sample_percept(std::mt19937_64& rng) {
    std::uint32_t value = 0;
    const int n = spec_->percept_bits();
    for (int i = 0; i < n; ++i) value = (value << 1) | static_cast<std::uint32_t>(tree_->sample_percept_bit(rng));
    return decode_percept_clamped(*spec_, BitString{value, n});
  }

  // Full percept alphabet (every bit pattern), for exhaustive expectimax.
  std::vector<Percept> enumerate_percepts() const {
    const int n = spec_->percept_bits();
    std::vector<Percept> out;
    out.reserve(1u << n);
    for (std::uint32_t v = 0; v < (1u << n); ++v)
      out.push_back(decode_percept_clamped(*spec_, BitString{v, n}));
    return out;
  }

 private:
  ContextTree* tree_;
  const SpaceSpec* spec_;
};

static_assert(PlanningModel<CtwModel>);

}  // namespace mcaixi
