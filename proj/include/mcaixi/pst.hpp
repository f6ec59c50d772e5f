#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mcaixi/kt.hpp"

namespace mcaixi {

// One bit of the interleaved history stream, tagged with whether it is a
// percept bit (updates estimators) or an action bit (context only).
struct BitEvent {
  std::uint8_t bit = 0;
  bool percept = false;
};

// A prediction-suffix-tree model: the tree structure only, parameters live
// with whoever evaluates it. Edges labelled by the context bit they consume
// (most recent history bit first).
struct PstShape {
  struct Node {
    int depth = 0;
    int child[2] = {-1, -1};  // indices into nodes; -1 = none
    int leaf_id = -1;
  };

  std::vector<Node> nodes;  // nodes[0] is the root
  int leaf_count = 0;
  int max_depth = 0;
  int code_length = 0;  // Gamma_D: nodes minus leaves at the enumeration depth

  bool is_leaf(int n) const { return nodes[static_cast<std::size_t>(n)].child[0] < 0; }

  // Routes a context (newest bit first) to a leaf id.
  template <typename ContextFn>
  int route(ContextFn&& context_bit) const {
    int n = 0;
    int d = 0;
    while (!is_leaf(n)) {
      n = nodes[static_cast<std::size_t>(n)].child[context_bit(d)];
      ++d;
    }
    return nodes[static_cast<std::size_t>(n)].leaf_id;
  }
};

// All PST models of depth <= cap_depth, i.e. the model class C_D. Sizes obey
// |C_0| = 1 and |C_{d+1}| = |C_d|^2 + 1, so this explodes fast; refuse past
// depth 4 (|C_4| = 677, |C_5| would be 458330).
inline std::vector<PstShape> enumerate_pst_models(int cap_depth) {
  if (cap_depth < 0) throw std::invalid_argument("enumerate_pst_models: negative depth");
  if (cap_depth > 4) throw std::invalid_argument("enumerate_pst_models: depth > 4 refused");

  std::vector<PstShape> models;
  const PstShape root_leaf = [] {
    PstShape m;
    m.nodes.push_back(PstShape::Node{0, {-1, -1}, 0});
    m.leaf_count = 1;
    return m;
  }();

  if (cap_depth == 0) {
    models.push_back(root_leaf);
  } else {
    const std::vector<PstShape> sub = enumerate_pst_models(cap_depth - 1);
    models.push_back(root_leaf);
    // Graft every (left, right) pair one level down.
    for (const PstShape& zero_sub : sub) {
      for (const PstShape& one_sub : sub) {
        PstShape m;
        m.nodes.push_back(PstShape::Node{0, {-1, -1}, -1});
        const auto graft = [&m](const PstShape& src, int which) {
          const int base = static_cast<int>(m.nodes.size());
          m.nodes[0].child[which] = base;
          for (const PstShape::Node& n : src.nodes) {
            PstShape::Node copy = n;
            copy.depth = n.depth + 1;
            for (int b = 0; b < 2; ++b)
              if (copy.child[b] >= 0) copy.child[b] += base;
            if (copy.leaf_id >= 0) copy.leaf_id = -2;  // renumbered below
            m.nodes.push_back(copy);
          }
        };
        graft(zero_sub, 0);
        graft(one_sub, 1);
        models.push_back(std::move(m));
      }
    }
  }

  for (PstShape& m : models) {
    m.leaf_count = 0;
    m.max_depth = 0;
    int deep_leaves = 0;
    for (PstShape::Node& n : m.nodes) {
      m.max_depth = std::max(m.max_depth, n.depth);
      if (n.child[0] < 0) {
        n.leaf_id = m.leaf_count++;
        if (n.depth == cap_depth) ++deep_leaves;
      } else {
        n.leaf_id = -1;
      }
    }
    m.code_length = static_cast<int>(m.nodes.size()) - deep_leaves;
  }
  return models;
}

namespace detail {

// log Pr(x_{1:t} | M, a_{1:t}): routes every percept bit of the stream to
// the leaf of M selected by the preceding context (zero-padded at the
// start, matching the context tree's priming) and accumulates per-leaf KT
// block probabilities sequentially.
inline double pst_model_logprob(const PstShape& m, int cap_depth, const std::vector<BitEvent>& stream) {
  std::vector<std::uint64_t> zeros(static_cast<std::size_t>(m.leaf_count), 0);
  std::vector<std::uint64_t> ones(static_cast<std::size_t>(m.leaf_count), 0);
  double logp = 0.0;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (!stream[i].percept) continue;
    const auto context_bit = [&stream, i, cap_depth](int d) -> int {
      (void)cap_depth;
      const std::size_t back = static_cast<std::size_t>(d) + 1;
      return back <= i ? stream[i - back].bit : 0;
    };
    const std::size_t leaf = static_cast<std::size_t>(m.route(context_bit));
    const double n = static_cast<double>(zeros[leaf] + ones[leaf]);
    const int bit = stream[i].bit;
    const double c = static_cast<double>(bit ? ones[leaf] : zeros[leaf]);
    logp += std::log((c + 0.5) / (n + 1.0));
    ++(bit ? ones[leaf] : zeros[leaf]);
  }
  return logp;
}

inline double logsumexp(const std::vector<double>& xs) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : xs) hi = std::max(hi, x);
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

}  // namespace detail

// Direct evaluation of the CTW mixture by full enumeration of the model
// class: sum_M 2^-Gamma(M) Pr(x | M, a). This is the independent oracle the
// context tree is checked against; only tiny depths are feasible.
inline double brute_force_mixture_logprob(int cap_depth, const std::vector<BitEvent>& stream) {
  if (cap_depth > 3) throw std::invalid_argument("brute_force_mixture_logprob: depth > 3 refused");
  const std::vector<PstShape> models = enumerate_pst_models(cap_depth);
  std::vector<double> terms;
  terms.reserve(models.size());
  for (const PstShape& m : models)
    terms.push_back(-m.code_length * std::log(2.0) + detail::pst_model_logprob(m, cap_depth, stream));
  return detail::logsumexp(terms);
}

// Posterior weight of every model in C_D after the given stream:
// w_M proportional to 2^-Gamma(M) Pr(x | M, a), normalised to sum to one.
inline std::vector<double> brute_force_posterior(int cap_depth, const std::vector<BitEvent>& stream) {
  if (cap_depth > 3) throw std::invalid_argument("brute_force_posterior: depth > 3 refused");
  const std::vector<PstShape> models = enumerate_pst_models(cap_depth);
  std::vector<double> logw;
  logw.reserve(models.size());
  for (const PstShape& m : models)
    logw.push_back(-m.code_length * std::log(2.0) + detail::pst_model_logprob(m, cap_depth, stream));
  const double norm = detail::logsumexp(logw);
  std::vector<double> w(logw.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(logw[i] - norm);
  return w;
}

// Next-percept-bit prediction of a single PST model with KT leaf estimators,
// given the stream so far. Helper for posterior re-mixture checks.
inline double pst_model_predict_one(const PstShape& m, const std::vector<BitEvent>& stream) {
  std::vector<std::uint64_t> zeros(static_cast<std::size_t>(m.leaf_count), 0);
  std::vector<std::uint64_t> ones(static_cast<std::size_t>(m.leaf_count), 0);
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (!stream[i].percept) continue;
    const auto context_bit = [&stream, i](int d) -> int {
      const std::size_t back = static_cast<std::size_t>(d) + 1;
      return back <= i ? stream[i - back].bit : 0;
    };
    const std::size_t leaf = static_cast<std::size_t>(m.route(context_bit));
    ++(stream[i].bit ? ones[leaf] : zeros[leaf]);
  }
  const std::size_t end = stream.size();
  const auto context_bit = [&stream, end](int d) -> int {
    const std::size_t back = static_cast<std::size_t>(d) + 1;
    return back <= end ? stream[end - back].bit : 0;
  };
  const std::size_t leaf = static_cast<std::size_t>(m.route(context_bit));
  const double n = static_cast<double>(zeros[leaf] + ones[leaf]);
  return (static_cast<double>(ones[leaf]) + 0.5) / (n + 1.0);
}

}  // namespace mcaixi
