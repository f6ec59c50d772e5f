#pragma once

#include <cmath>
#include <ostream>
#include <vector>

#include "mcaixi/context_tree.hpp"
#include "mcaixi/pst.hpp"
#include "mcaixi/rng.hpp"

namespace mcaixi {

// Random interleaved action/percept bit stream, mirrored into a context
// tree and an oracle-friendly event list.
inline std::vector<BitEvent> random_stream(std::mt19937_64& rng, int cycles, int action_bits, int percept_bits) {
  std::vector<BitEvent> stream;
  stream.reserve(static_cast<std::size_t>(cycles) * static_cast<std::size_t>(action_bits + percept_bits));
  for (int t = 0; t < cycles; ++t) {
    for (int i = 0; i < action_bits; ++i) stream.push_back({static_cast<std::uint8_t>(uniform_int(rng, 2)), false});
    for (int i = 0; i < percept_bits; ++i) stream.push_back({static_cast<std::uint8_t>(uniform_int(rng, 2)), true});
  }
  return stream;
}

// Feeds a bit-event stream to a context tree (actions condition, percepts
// update) and returns the root log probability.
inline double ctw_replay_logprob(int depth, const std::vector<BitEvent>& stream) {
  ContextTree tree(depth);
  for (const BitEvent& e : stream) {
    if (e.percept) {
      tree.update_percept_bit(e.bit);
    } else {
      tree.condition_action_bits(BitString{e.bit, 1});
    }
  }
  return tree.log_block();
}

// The enumeration-oracle suites behind the `selftest` CLI command. Returns
// true when everything passes; prints one line per check.
inline bool run_selftest(std::ostream& out) {
  bool ok = true;
  const auto report = [&out, &ok](const char* name, bool pass) {
    out << (pass ? "[PASS] " : "[FAIL] ") << name << "\n";
    ok = ok && pass;
  };

  {
    const std::size_t expected[] = {1, 2, 5, 26, 677};
    bool pass = true;
    for (int d = 0; d <= 4; ++d) {
      const auto models = enumerate_pst_models(d);
      if (models.size() != expected[d]) pass = false;
      double sum = 0.0;
      for (const PstShape& m : models) sum += std::pow(2.0, -m.code_length);
      if (std::abs(sum - 1.0) > 1e-12) pass = false;
    }
    report("model class sizes and prior normalisation (depth <= 4)", pass);
  }

  {
    std::mt19937_64 rng = derive_rng(20100713, 0x5e1f);
    bool pass = true;
    for (int depth = 1; depth <= 3 && pass; ++depth) {
      for (int rep = 0; rep < 20 && pass; ++rep) {
        const auto stream = random_stream(rng, 16, 1, 2);
        const double tree_lp = ctw_replay_logprob(depth, stream);
        const double oracle_lp = brute_force_mixture_logprob(depth, stream);
        if (std::abs(tree_lp - oracle_lp) > 1e-9) pass = false;
      }
    }
    report("context tree matches brute-force mixture (depths 1-3)", pass);
  }

  {
    std::mt19937_64 rng = derive_rng(20100713, 0xba7e5);
    bool pass = true;
    for (int rep = 0; rep < 10 && pass; ++rep) {
      const auto stream = random_stream(rng, 12, 1, 1);
      const auto models = enumerate_pst_models(2);
      const auto weights = brute_force_posterior(2, stream);
      double remix = 0.0;
      for (std::size_t i = 0; i < models.size(); ++i)
        remix += weights[i] * pst_model_predict_one(models[i], stream);
      auto extended = stream;
      extended.push_back({1, true});
      const double p_one = std::exp(brute_force_mixture_logprob(2, extended) - brute_force_mixture_logprob(2, stream));
      if (std::abs(remix - p_one) > 1e-12) pass = false;
    }
    report("posterior re-mixture equals mixture prediction", pass);
  }

  {
    KtCounts kt;
    for (int b : {0, 0, 1, 1}) kt.update(b);
    const bool pass = std::abs(std::exp(kt.log_block) - 3.0 / 128.0) < 1e-15;
    report("KT block probability closed form", pass);
  }

  return ok;
}

}  // namespace mcaixi
