#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "appletaste/game.hpp"

namespace appletaste {

// Hypotheses x instances bit matrix. Rows are stored as packed 64-bit words.
class FiniteClass {
 public:
  FiniteClass() = default;
  // Rejects duplicate rows with ParameterError.
  FiniteClass(std::size_t m, std::vector<Bits> rows, std::vector<std::string> names = {});

  static FiniteClass from_strings(const std::vector<std::string>& rows,
                                  std::vector<std::string> names = {});
  // Keeps the first occurrence of every distinct row.
  static FiniteClass dedup(std::size_t m, const std::vector<Bits>& rows,
                           std::vector<std::string> names = {});
  // Rows given as packed words (ceil(m/64) per row, bit x of row h at
  // word x/64, position x%64). With dedup, later duplicates are dropped;
  // otherwise they are a ParameterError.
  static FiniteClass from_packed(std::size_t m, std::size_t n, std::vector<std::uint64_t> data, bool dedup,
                                 std::vector<std::string> names = {});

  std::size_t domain_size() const { return m_; }
  std::size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }
  bool at(std::size_t h, std::size_t x) const {
    return (data_[h * words_ + x / 64] >> (x % 64)) & 1u;
  }
  Bits row(std::size_t h) const;
  std::string row_string(std::size_t h) const;
  std::size_t ones(std::size_t h) const;
  std::size_t words_per_row() const { return words_; }
  const std::uint64_t* row_words(std::size_t h) const { return data_.data() + h * words_; }
  const std::vector<std::string>& instance_names() const { return names_; }
  // Subclass of the given hypothesis indices, in that order.
  FiniteClass subclass(const std::vector<std::size_t>& hyps) const;

 private:
  void append(const Bits& row);
  // Indices of rows equal to an earlier row.
  std::vector<std::size_t> duplicate_rows() const;
  std::size_t m_ = 0;
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> data_;
  std::vector<std::string> names_;
};

using HypMask = std::uint64_t;
// Exact searches address hypotheses through 64-bit masks.
inline constexpr std::size_t kMaxSearchHypotheses = 64;

// ones[x] = mask of hypotheses with h(x) = 1; throws BudgetExceeded for
// classes with more than 64 hypotheses.
std::vector<HypMask> one_masks(const FiniteClass& H);
// Representative instances with pairwise distinct columns, lowest id first.
std::vector<std::uint32_t> distinct_columns(const FiniteClass& H);

struct BudgetedClass {
  std::shared_ptr<const FiniteClass> base;
  std::vector<int> budget;  // per hypothesis of base; -1 = absent
  std::size_t size() const;
  bool empty() const { return size() == 0; }
};

BudgetedClass make_budgeted(std::shared_ptr<const FiniteClass> H, std::size_t k);

struct Example {
  std::uint32_t x = 0;
  bool y = false;
};

bool is_k_realizable(const std::vector<Example>& seq, const FiniteClass& H, std::size_t k);

FiniteClass restrict(const FiniteClass& H, std::size_t x, bool y);
BudgetedClass restrict_budgeted(const BudgetedClass& B, std::size_t x, bool y);

struct WidthTree {
  struct Node {
    std::int32_t instance = -1;  // -1 marks a leaf
    std::int32_t left = -1;
    std::int32_t right = -1;
  };
  std::vector<Node> nodes;  // nodes[0] is the root

  static WidthTree leaf();
  std::size_t depth() const;
  std::size_t width() const;  // max number of right edges on a branch
  // Instances on the all-left path from the root.
  std::vector<std::uint32_t> left_spine() const;
};

bool is_shattered(const WidthTree& tree, const BudgetedClass& B);

struct SearchLimits {
  std::size_t max_states = 4'000'000;
};

struct DepthResult {
  std::size_t value = 0;
  bool cap_exceeded = false;
  bool operator==(const DepthResult&) const = default;
};

std::size_t littlestone_dim(const FiniteClass& H, SearchLimits limits = {});
DepthResult width_depth(const FiniteClass& H, std::size_t w, std::size_t cap, SearchLimits limits = {});
DepthResult width_depth(const BudgetedClass& B, std::size_t w, std::size_t cap, SearchLimits limits = {});
// Smallest w <= domain size with a finite D_w at this cap; nullopt if none.
std::optional<std::size_t> effective_width(const FiniteClass& H, std::size_t cap,
                                           SearchLimits limits = {});
DepthResult d1_k(const FiniteClass& H, std::size_t k, std::size_t cap, SearchLimits limits = {});

std::optional<WidthTree> find_shattered_tree(const BudgetedClass& B, std::size_t w, std::size_t d,
                                             SearchLimits limits = {});

enum class Trichotomy { easy, hard, unknown_at_cap };
std::string to_string(Trichotomy t);
Trichotomy classify(std::optional<std::size_t> effective_width);

// Disjoint union with every hypothesis extended by 0 outside its own domain.
// With namespace_ids, instance names become "<r>.<name>"; otherwise a name
// shared by two classes is a DomainError. Rows that coincide after
// extension are kept once.
FiniteClass glue(const std::vector<FiniteClass>& classes, bool namespace_ids = true);

FiniteClass universal_class(std::size_t n);
FiniteClass hamming_ball_class(std::size_t m, std::size_t d);
FiniteClass singletons_class(std::size_t m, bool with_zero);

// Exact M*(H, T, k) by memoized game-tree search.
std::size_t minimax_oracle(const FiniteClass& H, std::size_t T, std::size_t k,
                           SearchLimits limits = {});

FiniteClass read_class(std::istream& in);
FiniteClass read_class_file(const std::string& path);
void write_class(std::ostream& out, const FiniteClass& H, const std::vector<std::string>& comments = {});

}  // namespace appletaste
