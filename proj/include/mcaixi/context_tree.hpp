#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

#include "mcaixi/codec.hpp"
#include "mcaixi/kt.hpp"
#include "mcaixi/rng.hpp"

namespace mcaixi {

inline constexpr double kLogHalf = -0.69314718055994530941723212145818;

// log(1/2 e^a + 1/2 e^b), max-factored.
inline double log_half_sum(double a, double b) {
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return kLogHalf + hi + std::log1p(std::exp(lo - hi));
}

struct CtNode {
  KtCounts kt;
  double log_pw = 0.0;
  CtNode* child[2] = {nullptr, nullptr};
};

// Depth-D weighted context tree over the interleaved action/percept bit
// stream. Percept bits update KT counts along the current context path and
// refresh the weighted probabilities leaf-to-root; action bits only shift
// the context. Every bit event is journalled so any suffix of updates can be
// rolled back bit-exactly, which is what lets a planner simulate futures on
// the live model and then restore it.
//
// The context window is primed with D zero bits, so no warm-up experience is
// consumed before the first cycle.
class ContextTree {
 public:
  explicit ContextTree(int depth) : depth_(depth) {
    if (depth < 0) throw std::invalid_argument("ContextTree: negative depth");
    ring_.assign(static_cast<std::size_t>(std::max(depth, 1)), 0);
    pool_.emplace_back();
    root_ = &pool_.back();
    path_.resize(static_cast<std::size_t>(depth_) + 1);
    cand_block_.resize(static_cast<std::size_t>(depth_) + 1);
    cand_pw_.resize(static_cast<std::size_t>(depth_) + 1);
  }

  ContextTree(const ContextTree& other) { copy_from(other); }

  ContextTree& operator=(const ContextTree& other) {
    if (this != &other) {
      ContextTree tmp(other);
      swap(tmp);
    }
    return *this;
  }

  ContextTree(ContextTree&&) = default;
  ContextTree& operator=(ContextTree&&) = default;

  int depth() const { return depth_; }
  std::uint64_t bits_seen() const { return bits_seen_; }
  std::size_t node_count() const { return pool_.size(); }
  std::size_t journal_size() const { return records_.size(); }
  std::uint64_t nodes_touched() const { return touched_; }
  double log_block() const { return root_->log_pw; }

  // j-th most recent context bit, j in [0, depth).
  int context_bit(int j) const {
    const std::size_t n = ring_.size();
    return ring_[(head_ + n - 1 - static_cast<std::size_t>(j)) % n];
  }

  // Marks the current state as committed (real experience) and forgets the
  // journal. Rollback can no longer cross this point.
  void commit() {
    records_.clear();
    saves_.clear();
  }

  // Feeds one observed percept bit: KT update on the D+1 context-path nodes,
  // weighted probabilities recomputed leaf to root.
  void update_percept_bit(int bit) {
    walk_path(true);
    compute_candidates(bit, true);
    commit_candidates(bit);
  }

  // Advances the context past one action's bits without touching any counts.
  void condition_action_bits(BitString bits) {
    for (int i = 0; i < bits.size; ++i) {
      records_.push_back(Record{/*percept=*/0, static_cast<std::uint8_t>(bits.bit(i)),
                                static_cast<std::uint8_t>(push_context(bits.bit(i))), 0});
      ++bits_seen_;
    }
  }

  // Probability that the next percept bit is 1, without changing any state.
  double predict_bit() const {
    walk_path(false);
    compute_candidates(1, false);
    return std::exp(cand_pw_[0] - root_->log_pw);
  }

  // Draws one percept bit from the model and updates it as if the bit had
  // been observed. Distributed as Bernoulli(predict_bit()).
  int sample_percept_bit(std::mt19937_64& rng) {
    walk_path(true);
    // Evaluate the likelier bit first; the second pass is then usually skipped.
    int trial = 1;
    for (int d = depth_; d >= 0; --d) {
      const CtNode* probe = path_[static_cast<std::size_t>(d)];
      if (!probe->kt.fresh()) {
        trial = probe->kt.ones >= probe->kt.zeros ? 1 : 0;
        break;
      }
    }
    compute_candidates(trial, true);
    const double p_trial = std::exp(cand_pw_[0] - root_->log_pw);
    const double u = uniform01(rng);
    const int bit = trial == 1 ? (u < p_trial ? 1 : 0) : (u < p_trial ? 0 : 1);
    if (bit != trial) compute_candidates(bit, true);
    commit_candidates(bit);
    return bit;
  }

  // Rolls back the most recent k bit events (LIFO). Nodes that were
  // allocated by a reverted event are recycled: they sit at the tail of the
  // pool (allocation follows journal order), so popping them and clearing
  // the parent slot restores the allocation state too.
  void revert(std::size_t k) {
    if (k > records_.size()) throw std::logic_error("ContextTree::revert: journal underflow");
    while (k-- > 0) {
      const Record rec = records_.back();
      records_.pop_back();
      pop_context(rec.evicted);
      --bits_seen_;
      for (std::uint32_t i = 0; i < rec.save_count; ++i) {
        const NodeSave& s = saves_.back();
        s.node->kt.zeros = s.zeros;
        s.node->kt.ones = s.ones;
        s.node->kt.log_block = s.log_block;
        s.node->log_pw = s.log_pw;
        path_[rec.save_count - 1 - i] = s.node;  // leaf first
        ++touched_;
        saves_.pop_back();
      }
      for (std::uint32_t i = 0; i < rec.alloc_count; ++i) {
        const std::uint32_t depth = rec.save_count - 1 - i;  // leaf upward
        CtNode* doomed = path_[depth];
        CtNode* parent = path_[depth - 1];
        if (&pool_.back() != doomed) throw std::logic_error("ContextTree::revert: pool order corrupted");
        if (parent->child[0] == doomed) parent->child[0] = nullptr;
        if (parent->child[1] == doomed) parent->child[1] = nullptr;
        pool_.pop_back();
      }
    }
  }

  void revert_to(std::size_t mark) {
    if (mark > records_.size()) throw std::logic_error("ContextTree::revert_to: bad mark");
    revert(records_.size() - mark);
  }

  // Structural equality of the committed statistics. Subtrees that hold no
  // counts (e.g. nodes allocated by a reverted simulation) compare equal to
  // absent subtrees.
  bool deep_equal(const ContextTree& other) const {
    if (depth_ != other.depth_ || bits_seen_ != other.bits_seen_) return false;
    for (int j = 0; j < depth_; ++j)
      if (context_bit(j) != other.context_bit(j)) return false;
    return node_equal(root_, other.root_);
  }

  // Overwrites the context window with `bits` (oldest first, padded with
  // zeros on the left if fewer than D are given). Requires an empty journal.
  void set_context(const std::vector<std::uint8_t>& bits) {
    if (!records_.empty()) throw std::logic_error("ContextTree::set_context: journal not empty");
    std::fill(ring_.begin(), ring_.end(), 0);
    head_ = 0;
    const std::size_t take = std::min<std::size_t>(bits.size(), static_cast<std::size_t>(depth_));
    for (std::size_t i = bits.size() - take; i < bits.size(); ++i) push_context(bits[i]);
  }

  void set_bits_seen(std::uint64_t n) {
    if (!records_.empty()) throw std::logic_error("ContextTree::set_bits_seen: journal not empty");
    bits_seen_ = n;
  }

  // --- snapshot (committed state only; journals are never serialised) ---

  void save(std::ostream& out) const {
    if (!records_.empty()) throw std::logic_error("ContextTree::save: journal not empty");
    out.write(kMagic, 8);
    write_u32(out, kVersion);
    write_u32(out, static_cast<std::uint32_t>(depth_));
    write_u64(out, bits_seen_);
    save_node(out, root_);
  }

  static ContextTree load(std::istream& in) {
    char magic[8];
    in.read(magic, 8);
    if (!in || !std::equal(magic, magic + 8, kMagic)) throw std::runtime_error("ContextTree::load: bad magic");
    const std::uint32_t version = read_u32(in);
    if (version != kVersion) throw std::runtime_error("ContextTree::load: unsupported version");
    const std::uint32_t depth = read_u32(in);
    const std::uint64_t bits_seen = read_u64(in);
    ContextTree tree(static_cast<int>(depth));
    tree.load_node(in, tree.root_, 0);
    tree.bits_seen_ = bits_seen;
    if (!in) throw std::runtime_error("ContextTree::load: truncated stream");
    return tree;
  }

  void swap(ContextTree& other) noexcept {
    std::swap(depth_, other.depth_);
    pool_.swap(other.pool_);
    std::swap(root_, other.root_);
    ring_.swap(other.ring_);
    std::swap(head_, other.head_);
    std::swap(bits_seen_, other.bits_seen_);
    records_.swap(other.records_);
    saves_.swap(other.saves_);
    path_.swap(other.path_);
    cand_block_.swap(other.cand_block_);
    cand_pw_.swap(other.cand_pw_);
    std::swap(touched_, other.touched_);
  }

 private:
  struct NodeSave {
    CtNode* node;
    std::uint64_t zeros, ones;
    double log_block, log_pw;
  };

  struct Record {
    std::uint8_t percept;  // 1 = percept bit (touched nodes), 0 = context only
    std::uint8_t bit;
    std::uint8_t evicted;    // context bit pushed out of the window
    std::uint32_t save_count;
    std::uint32_t alloc_count = 0;  // nodes this event allocated (pool tail)
  };

  static constexpr const char* kMagic = "MCAIXICT";
  static constexpr std::uint32_t kVersion = 1;

  int depth_ = 0;
  std::deque<CtNode> pool_;
  CtNode* root_ = nullptr;
  std::vector<std::uint8_t> ring_;  // last D bits; head_ is the next write slot
  std::size_t head_ = 0;
  std::uint64_t bits_seen_ = 0;
  std::vector<Record> records_;
  std::vector<NodeSave> saves_;
  mutable std::vector<CtNode*> path_;
  mutable std::vector<double> cand_block_;
  mutable std::vector<double> cand_pw_;
  mutable std::uint64_t touched_ = 0;
  mutable std::uint32_t last_walk_allocs_ = 0;

  CtNode* alloc_node() {
    pool_.emplace_back();
    return &pool_.back();
  }

  int push_context(int bit) {
    if (depth_ == 0) return 0;
    const int evicted = ring_[head_];
    ring_[head_] = static_cast<std::uint8_t>(bit);
    head_ = (head_ + 1) % ring_.size();
    return evicted;
  }

  void pop_context(int evicted) {
    if (depth_ == 0) return;
    head_ = (head_ + ring_.size() - 1) % ring_.size();
    ring_[head_] = static_cast<std::uint8_t>(evicted);
  }

  // Fills path_[0..D] with the nodes selected by the current context,
  // newest bit first. Without allocation the tail may be null.
  void walk_path(bool alloc) const {
    last_walk_allocs_ = 0;
    path_[0] = root_;
    CtNode* node = root_;
    for (int d = 1; d <= depth_; ++d) {
      if (node) {
        const int b = context_bit(d - 1);
        CtNode*& slot = node->child[b];
        if (!slot && alloc) {
          slot = const_cast<ContextTree*>(this)->alloc_node();
          ++last_walk_allocs_;
        }
        node = slot;
      }
      path_[static_cast<std::size_t>(d)] = node;
    }
  }

  // Computes the post-update (log_block, log_pw) for every node on the
  // current path under a hypothetical next percept bit. Null path entries
  // are treated as fresh nodes. Pure: no state is modified.
  void compute_candidates(int bit, bool counts_path_touch) const {
    for (int d = depth_; d >= 0; --d) {
      const std::size_t i = static_cast<std::size_t>(d);
      const CtNode* node = path_[i];
      const std::uint64_t z = (node ? node->kt.zeros : 0) + (bit == 0 ? 1u : 0u);
      const std::uint64_t o = (node ? node->kt.ones : 0) + (bit == 1 ? 1u : 0u);
      cand_block_[i] = KtCounts::block_log(z, o);
      if (d == depth_) {
        cand_pw_[i] = cand_block_[i];
      } else {
        const int down = context_bit(d);
        const CtNode* off = node ? node->child[1 - down] : nullptr;
        const double off_lpw = off ? off->log_pw : 0.0;
        cand_pw_[i] = log_half_sum(cand_block_[i], cand_pw_[i + 1] + off_lpw);
      }
      if (counts_path_touch) ++touched_;
    }
  }

  // Applies candidate values computed by compute_candidates(bit, ...) and
  // journals the prior state of every touched node.
  void commit_candidates(int bit) {
    for (int d = 0; d <= depth_; ++d) {
      CtNode* node = path_[static_cast<std::size_t>(d)];
      saves_.push_back(NodeSave{node, node->kt.zeros, node->kt.ones, node->kt.log_block, node->log_pw});
    }
    for (int d = 0; d <= depth_; ++d) {
      const std::size_t i = static_cast<std::size_t>(d);
      CtNode* node = path_[i];
      ++(bit ? node->kt.ones : node->kt.zeros);
      node->kt.log_block = cand_block_[i];
      node->log_pw = cand_pw_[i];
    }
    records_.push_back(Record{/*percept=*/1, static_cast<std::uint8_t>(bit),
                              static_cast<std::uint8_t>(push_context(bit)),
                              static_cast<std::uint32_t>(depth_ + 1), last_walk_allocs_});
    ++bits_seen_;
  }

  static bool subtree_empty(const CtNode* node) {
    if (!node) return true;
    if (!node->kt.fresh()) return false;
    return subtree_empty(node->child[0]) && subtree_empty(node->child[1]);
  }

  static bool node_equal(const CtNode* a, const CtNode* b) {
    if (subtree_empty(a) && subtree_empty(b)) return true;
    if (!a || !b) return false;
    if (a->kt.zeros != b->kt.zeros || a->kt.ones != b->kt.ones) return false;
    if (a->kt.log_block != b->kt.log_block || a->log_pw != b->log_pw) return false;
    return node_equal(a->child[0], b->child[0]) && node_equal(a->child[1], b->child[1]);
  }

  void copy_from(const ContextTree& other) {
    if (!other.records_.empty()) throw std::logic_error("ContextTree: copy with non-empty journal");
    depth_ = other.depth_;
    ring_ = other.ring_;
    head_ = other.head_;
    bits_seen_ = other.bits_seen_;
    pool_.clear();
    pool_.emplace_back();
    root_ = &pool_.back();
    copy_node(root_, other.root_);
    path_.resize(static_cast<std::size_t>(depth_) + 1);
    cand_block_.resize(static_cast<std::size_t>(depth_) + 1);
    cand_pw_.resize(static_cast<std::size_t>(depth_) + 1);
    touched_ = 0;
  }

  // Statistically empty subtrees are dropped when copying; they carry no
  // information and deep_equal treats them as absent.
  void copy_node(CtNode* dst, const CtNode* src) {
    dst->kt = src->kt;
    dst->log_pw = src->log_pw;
    for (int b = 0; b < 2; ++b) {
      if (src->child[b] && !subtree_empty(src->child[b])) {
        dst->child[b] = alloc_node();
        copy_node(dst->child[b], src->child[b]);
      }
    }
  }

  // Statistically empty subtrees are pruned on save so snapshots are
  // canonical: save -> load -> save is byte-identical.
  void save_node(std::ostream& out, const CtNode* node) const {
    const bool has0 = !subtree_empty(node->child[0]);
    const bool has1 = !subtree_empty(node->child[1]);
    const std::uint8_t flags = static_cast<std::uint8_t>((has0 ? 1 : 0) | (has1 ? 2 : 0));
    out.put(static_cast<char>(flags));
    write_u64(out, node->kt.zeros);
    write_u64(out, node->kt.ones);
    if (has0) save_node(out, node->child[0]);
    if (has1) save_node(out, node->child[1]);
  }

  // Log values are recomputed from the counts; they are pure functions of
  // the counts and the tree shape, so this reproduces them bit-exactly.
  void load_node(std::istream& in, CtNode* node, int d) {
    const int flags = in.get();
    if (flags < 0) throw std::runtime_error("ContextTree::load: truncated stream");
    node->kt.zeros = read_u64(in);
    node->kt.ones = read_u64(in);
    node->kt.log_block = KtCounts::block_log(node->kt.zeros, node->kt.ones);
    if (d >= depth_ && (flags & 3)) throw std::runtime_error("ContextTree::load: children below max depth");
    double children_lpw = 0.0;
    for (int b = 0; b < 2; ++b) {
      if (flags & (1 << b)) {
        node->child[b] = alloc_node();
        load_node(in, node->child[b], d + 1);
        children_lpw += node->child[b]->log_pw;
      }
    }
    node->log_pw = d == depth_ ? node->kt.log_block : log_half_sum(node->kt.log_block, children_lpw);
  }

  static void write_u32(std::ostream& out, std::uint32_t v) {
    char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, 4);
  }

  static void write_u64(std::ostream& out, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, 8);
  }

  static std::uint32_t read_u32(std::istream& in) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
    return v;
  }

  static std::uint64_t read_u64(std::istream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
  }
};

}  // namespace mcaixi
