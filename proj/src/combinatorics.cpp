#include "appletaste/combinatorics.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "appletaste/errors.hpp"

namespace appletaste {

namespace {

std::vector<std::string> default_names(std::size_t m) {
  std::vector<std::string> names(m);
  for (std::size_t i = 0; i < m; ++i) names[i] = std::to_string(i);
  return names;
}

void check_instance(std::size_t x, std::size_t m) {
  if (x >= m)
    throw DomainError("instance " + std::to_string(x) + " outside domain of size " + std::to_string(m));
}

}  // namespace

FiniteClass::FiniteClass(std::size_t m, std::vector<Bits> rows, std::vector<std::string> names)
    : m_(m), words_((m + 63) / 64) {
  if (m == 0) throw ParameterError("class domain must be non-empty");
  if (names.empty()) names = default_names(m);
  if (names.size() != m) throw ParameterError("instance name count differs from domain size");
  names_ = std::move(names);
  data_.reserve(rows.size() * words_);
  for (const auto& r : rows) append(r);
  if (auto dups = duplicate_rows(); !dups.empty())
    throw ParameterError("duplicate hypothesis row " + row_string(dups.front()));
}

std::vector<std::size_t> FiniteClass::duplicate_rows() const {
  std::vector<std::size_t> order(n_);
  std::iota(order.begin(), order.end(), 0);
  auto row_cmp = [this](std::size_t a, std::size_t b) {
    for (std::size_t w = 0; w < words_; ++w) {
      const auto wa = data_[a * words_ + w], wb = data_[b * words_ + w];
      if (wa != wb) return wa < wb ? -1 : 1;
    }
    return 0;
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const int c = row_cmp(a, b);
    return c != 0 ? c < 0 : a < b;
  });
  std::vector<std::size_t> dups;
  for (std::size_t i = 1; i < order.size(); ++i)
    if (row_cmp(order[i - 1], order[i]) == 0) dups.push_back(order[i]);
  std::sort(dups.begin(), dups.end());
  return dups;
}

FiniteClass FiniteClass::from_packed(std::size_t m, std::size_t n, std::vector<std::uint64_t> data, bool dedup,
                                     std::vector<std::string> names) {
  if (m == 0) throw ParameterError("class domain must be non-empty");
  FiniteClass H;
  H.m_ = m;
  H.words_ = (m + 63) / 64;
  if (data.size() != n * H.words_) throw ParameterError("packed class data has the wrong size");
  if (m % 64 != 0) {
    const std::uint64_t tail = (std::uint64_t{1} << (m % 64)) - 1;
    for (std::size_t h = 0; h < n; ++h) data[h * H.words_ + H.words_ - 1] &= tail;
  }
  if (names.empty()) names = default_names(m);
  if (names.size() != m) throw ParameterError("instance name count differs from domain size");
  H.names_ = std::move(names);
  H.data_ = std::move(data);
  H.n_ = n;
  const auto dups = H.duplicate_rows();
  if (dups.empty()) return H;
  if (!dedup) throw ParameterError("duplicate hypothesis row " + H.row_string(dups.front()));
  std::vector<std::uint64_t> kept;
  kept.reserve(H.data_.size());
  std::size_t next_dup = 0, count = 0;
  for (std::size_t h = 0; h < n; ++h) {
    if (next_dup < dups.size() && dups[next_dup] == h) {
      ++next_dup;
      continue;
    }
    kept.insert(kept.end(), H.data_.begin() + h * H.words_, H.data_.begin() + (h + 1) * H.words_);
    ++count;
  }
  H.data_ = std::move(kept);
  H.n_ = count;
  return H;
}

void FiniteClass::append(const Bits& row) {
  if (row.size() != m_)
    throw ParameterError("hypothesis row has length " + std::to_string(row.size()) + ", expected " +
                         std::to_string(m_));
  const std::size_t base = data_.size();
  data_.resize(base + words_, 0);
  for (std::size_t x = 0; x < m_; ++x)
    if (row[x]) data_[base + x / 64] |= std::uint64_t{1} << (x % 64);
  ++n_;
}

FiniteClass FiniteClass::from_strings(const std::vector<std::string>& rows, std::vector<std::string> names) {
  if (rows.empty()) throw ParameterError("class needs at least one hypothesis");
  std::vector<Bits> bits;
  bits.reserve(rows.size());
  for (const auto& r : rows) {
    Bits b(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i] != '0' && r[i] != '1') throw ParameterError("hypothesis rows use characters 0/1 only");
      b[i] = r[i] == '1';
    }
    bits.push_back(std::move(b));
  }
  return FiniteClass(rows.front().size(), std::move(bits), std::move(names));
}

FiniteClass FiniteClass::dedup(std::size_t m, const std::vector<Bits>& rows, std::vector<std::string> names) {
  std::unordered_set<std::string> seen;
  std::vector<Bits> kept;
  for (const auto& r : rows) {
    std::string key(r.begin(), r.end());
    if (seen.insert(std::move(key)).second) kept.push_back(r);
  }
  return FiniteClass(m, std::move(kept), std::move(names));
}

Bits FiniteClass::row(std::size_t h) const {
  Bits b(m_);
  for (std::size_t x = 0; x < m_; ++x) b[x] = at(h, x);
  return b;
}

std::string FiniteClass::row_string(std::size_t h) const {
  std::string s(m_, '0');
  for (std::size_t x = 0; x < m_; ++x)
    if (at(h, x)) s[x] = '1';
  return s;
}

std::size_t FiniteClass::ones(std::size_t h) const {
  std::size_t c = 0;
  for (std::size_t w = 0; w < words_; ++w) c += static_cast<std::size_t>(__builtin_popcountll(data_[h * words_ + w]));
  return c;
}

FiniteClass FiniteClass::subclass(const std::vector<std::size_t>& hyps) const {
  FiniteClass out;
  out.m_ = m_;
  out.words_ = words_;
  out.names_ = names_;
  for (std::size_t h : hyps) {
    if (h >= n_) throw DomainError("hypothesis index out of range");
    out.data_.insert(out.data_.end(), data_.begin() + h * words_, data_.begin() + (h + 1) * words_);
    ++out.n_;
  }
  return out;
}

std::vector<HypMask> one_masks(const FiniteClass& H) {
  if (H.size() > kMaxSearchHypotheses)
    throw BudgetExceeded("exact search supports at most 64 hypotheses, class has " + std::to_string(H.size()));
  std::vector<HypMask> ones(H.domain_size(), 0);
  for (std::size_t x = 0; x < H.domain_size(); ++x)
    for (std::size_t h = 0; h < H.size(); ++h)
      if (H.at(h, x)) ones[x] |= HypMask{1} << h;
  return ones;
}

std::vector<std::uint32_t> distinct_columns(const FiniteClass& H) {
  std::unordered_set<std::string> seen;
  std::vector<std::uint32_t> reps;
  for (std::size_t x = 0; x < H.domain_size(); ++x) {
    std::string col(H.size(), '0');
    for (std::size_t h = 0; h < H.size(); ++h)
      if (H.at(h, x)) col[h] = '1';
    if (seen.insert(col).second) reps.push_back(static_cast<std::uint32_t>(x));
  }
  return reps;
}

std::size_t BudgetedClass::size() const {
  return static_cast<std::size_t>(std::count_if(budget.begin(), budget.end(), [](int b) { return b >= 0; }));
}

BudgetedClass make_budgeted(std::shared_ptr<const FiniteClass> H, std::size_t k) {
  BudgetedClass B;
  B.budget.assign(H->size(), static_cast<int>(k));
  B.base = std::move(H);
  return B;
}

bool is_k_realizable(const std::vector<Example>& seq, const FiniteClass& H, std::size_t k) {
  for (const auto& e : seq) check_instance(e.x, H.domain_size());
  for (std::size_t h = 0; h < H.size(); ++h) {
    std::size_t dis = 0;
    for (const auto& e : seq)
      if (H.at(h, e.x) != e.y && ++dis > k) break;
    if (dis <= k) return true;
  }
  return false;
}

FiniteClass restrict(const FiniteClass& H, std::size_t x, bool y) {
  check_instance(x, H.domain_size());
  std::vector<std::size_t> keep;
  for (std::size_t h = 0; h < H.size(); ++h)
    if (H.at(h, x) == y) keep.push_back(h);
  return H.subclass(keep);
}

BudgetedClass restrict_budgeted(const BudgetedClass& B, std::size_t x, bool y) {
  check_instance(x, B.base->domain_size());
  BudgetedClass out = B;
  for (std::size_t h = 0; h < out.budget.size(); ++h) {
    int& b = out.budget[h];
    if (b < 0) continue;
    const bool hx = B.base->at(h, x);
    if (y) {
      if (!hx) b = -1;
    } else if (hx) {
      b = b == 0 ? -1 : b - 1;
    }
  }
  return out;
}

WidthTree WidthTree::leaf() {
  WidthTree t;
  t.nodes.push_back({});
  return t;
}

namespace {

void tree_stats(const WidthTree& t, std::int32_t v, std::size_t depth, std::size_t rights,
                std::size_t& max_depth, std::size_t& max_rights) {
  max_rights = std::max(max_rights, rights);
  const auto& node = t.nodes.at(static_cast<std::size_t>(v));
  if (node.instance < 0) {
    max_depth = std::max(max_depth, depth);
    return;
  }
  tree_stats(t, node.left, depth + 1, rights, max_depth, max_rights);
  tree_stats(t, node.right, depth + 1, rights + 1, max_depth, max_rights);
}

}  // namespace

std::size_t WidthTree::depth() const {
  std::size_t d = 0, r = 0;
  tree_stats(*this, 0, 0, 0, d, r);
  return d;
}

std::size_t WidthTree::width() const {
  std::size_t d = 0, r = 0;
  tree_stats(*this, 0, 0, 0, d, r);
  return r;
}

std::vector<std::uint32_t> WidthTree::left_spine() const {
  std::vector<std::uint32_t> spine;
  std::int32_t v = 0;
  while (nodes.at(static_cast<std::size_t>(v)).instance >= 0) {
    spine.push_back(static_cast<std::uint32_t>(nodes[static_cast<std::size_t>(v)].instance));
    v = nodes[static_cast<std::size_t>(v)].left;
  }
  return spine;
}

namespace {

bool shattered_at(const WidthTree& t, std::int32_t v, const BudgetedClass& B) {
  if (B.empty()) return false;
  const auto& node = t.nodes.at(static_cast<std::size_t>(v));
  if (node.instance < 0) return true;
  const auto x = static_cast<std::size_t>(node.instance);
  return shattered_at(t, node.left, restrict_budgeted(B, x, false)) &&
         shattered_at(t, node.right, restrict_budgeted(B, x, true));
}

// Width-w shattering search over budgeted classes. A budgeted class is keyed
// as one byte per hypothesis of the base class (0 = absent, b+1 otherwise).
class ShatterSearch {
 public:
  ShatterSearch(const BudgetedClass& B, SearchLimits limits)
      : keep_(B.base), H_(*keep_), cols_(distinct_columns(*keep_)), limits_(limits) {
    start_.resize(B.budget.size());
    for (std::size_t h = 0; h < B.budget.size(); ++h) {
      if (B.budget[h] > 253) throw ParameterError("budget too large for exhaustive search");
      start_[h] = static_cast<char>(B.budget[h] < 0 ? 0 : B.budget[h] + 1);
    }
  }

  const std::string& start() const { return start_; }

  bool shattered(const std::string& b, std::size_t w, std::size_t d) {
    if (is_empty(b)) return false;
    if (w == 0 || d == 0) return true;
    std::string key = b;
    key.push_back(static_cast<char>(w & 0xff));
    key.push_back(static_cast<char>(w >> 8));
    key.push_back(static_cast<char>(d & 0xff));
    key.push_back(static_cast<char>(d >> 8));
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (memo_.size() >= limits_.max_states)
      throw BudgetExceeded("shattering search exceeded " + std::to_string(limits_.max_states) + " states");
    bool found = false;
    for (std::uint32_t x : cols_) {
      std::string b1 = restrict_key(b, x, true);
      if (is_empty(b1)) continue;
      std::string b0 = restrict_key(b, x, false);
      if (is_empty(b0)) continue;
      if (shattered(b1, w - 1, d - 1) && shattered(b0, w, d - 1)) {
        found = true;
        break;
      }
    }
    memo_.emplace(std::move(key), found);
    return found;
  }

  // Builds a witness tree; requires shattered(b, w, d).
  std::int32_t build(WidthTree& t, const std::string& b, std::size_t w, std::size_t d) {
    const auto id = static_cast<std::int32_t>(t.nodes.size());
    t.nodes.push_back({});
    if (w == 0 || d == 0) return id;
    for (std::uint32_t x : cols_) {
      std::string b1 = restrict_key(b, x, true);
      std::string b0 = restrict_key(b, x, false);
      if (is_empty(b1) || is_empty(b0)) continue;
      if (shattered(b1, w - 1, d - 1) && shattered(b0, w, d - 1)) {
        const std::int32_t l = build(t, b0, w, d - 1);
        const std::int32_t r = build(t, b1, w - 1, d - 1);
        t.nodes[static_cast<std::size_t>(id)] = {static_cast<std::int32_t>(x), l, r};
        return id;
      }
    }
    throw ProtocolError("tree reconstruction failed");
  }

 private:
  static bool is_empty(const std::string& b) {
    return std::all_of(b.begin(), b.end(), [](char c) { return c == 0; });
  }

  std::string restrict_key(const std::string& b, std::uint32_t x, bool y) const {
    std::string out = b;
    for (std::size_t h = 0; h < out.size(); ++h) {
      char& c = out[h];
      if (c == 0) continue;
      const bool hx = H_.at(h, x);
      if (y) {
        if (!hx) c = 0;
      } else if (hx) {
        c = static_cast<char>(c - 1);  // budget 0 (c == 1) drops out
      }
    }
    return out;
  }

  std::shared_ptr<const FiniteClass> keep_;
  const FiniteClass& H_;
  std::vector<std::uint32_t> cols_;
  SearchLimits limits_;
  std::string start_;
  std::unordered_map<std::string, bool> memo_;
};

}  // namespace

bool is_shattered(const WidthTree& tree, const BudgetedClass& B) {
  for (const auto& node : tree.nodes)
    if (node.instance >= 0) check_instance(static_cast<std::size_t>(node.instance), B.base->domain_size());
  return shattered_at(tree, 0, B);
}

std::size_t littlestone_dim(const FiniteClass& H, SearchLimits limits) {
  if (H.empty()) throw ParameterError("Littlestone dimension of an empty class");
  // A perfect tree of depth d is exactly a width-d tree of depth d.
  ShatterSearch s(make_budgeted(std::make_shared<const FiniteClass>(H), 0), limits);
  std::size_t d = 0;
  while (s.shattered(s.start(), d + 1, d + 1)) ++d;
  return d;
}

DepthResult width_depth(const BudgetedClass& B, std::size_t w, std::size_t cap, SearchLimits limits) {
  if (w < 1) throw ParameterError("width must be >= 1");
  if (cap < w) throw ParameterError("depth cap must be >= width");
  ShatterSearch s(B, limits);
  if (!s.shattered(s.start(), w, w)) return {0, false};
  std::size_t d = w;
  while (d < cap && s.shattered(s.start(), w, d + 1)) ++d;
  if (d == cap) return {cap, true};
  return {d, false};
}

DepthResult width_depth(const FiniteClass& H, std::size_t w, std::size_t cap, SearchLimits limits) {
  return width_depth(make_budgeted(std::make_shared<const FiniteClass>(H), 0), w, cap, limits);
}

std::optional<std::size_t> effective_width(const FiniteClass& H, std::size_t cap, SearchLimits limits) {
  for (std::size_t w = 1; w <= H.domain_size(); ++w)
    if (!width_depth(H, w, std::max(cap, w), limits).cap_exceeded) return w;
  return std::nullopt;
}

DepthResult d1_k(const FiniteClass& H, std::size_t k, std::size_t cap, SearchLimits limits) {
  return width_depth(make_budgeted(std::make_shared<const FiniteClass>(H), k), 1, std::max<std::size_t>(cap, 1),
                     limits);
}

std::optional<WidthTree> find_shattered_tree(const BudgetedClass& B, std::size_t w, std::size_t d,
                                             SearchLimits limits) {
  ShatterSearch s(B, limits);
  if (!s.shattered(s.start(), w, d)) return std::nullopt;
  WidthTree t;
  s.build(t, s.start(), w, d);
  return t;
}

std::string to_string(Trichotomy t) {
  switch (t) {
    case Trichotomy::easy: return "easy";
    case Trichotomy::hard: return "hard";
    case Trichotomy::unknown_at_cap: return "unknown-at-cap";
  }
  return "?";
}

Trichotomy classify(std::optional<std::size_t> w) {
  if (!w) return Trichotomy::unknown_at_cap;
  return *w == 1 ? Trichotomy::easy : Trichotomy::hard;
}

FiniteClass glue(const std::vector<FiniteClass>& classes, bool namespace_ids) {
  if (classes.empty()) throw ParameterError("glue needs at least one class");
  std::size_t m = 0;
  std::vector<std::string> names;
  std::unordered_set<std::string> seen_names;
  for (std::size_t r = 0; r < classes.size(); ++r) {
    for (const auto& nm : classes[r].instance_names()) {
      std::string id = namespace_ids ? std::to_string(r) + "." + nm : nm;
      if (!seen_names.insert(id).second) throw DomainError("glued classes share instance '" + id + "'");
      names.push_back(std::move(id));
    }
    m += classes[r].domain_size();
  }
  std::vector<Bits> rows;
  std::size_t offset = 0;
  for (const auto& H : classes) {
    for (std::size_t h = 0; h < H.size(); ++h) {
      Bits row(m, 0);
      for (std::size_t x = 0; x < H.domain_size(); ++x) row[offset + x] = H.at(h, x);
      rows.push_back(std::move(row));
    }
    offset += H.domain_size();
  }
  return FiniteClass::dedup(m, rows, std::move(names));
}

FiniteClass universal_class(std::size_t n) {
  if (n < 1 || n > 16) throw ParameterError("universal class supports 1 <= n <= 16");
  const std::size_t m = std::size_t{1} << n;
  std::vector<Bits> rows(n, Bits(m, 0));
  std::vector<std::string> names(m);
  for (std::size_t x = 0; x < m; ++x) {
    names[x].assign(n, '0');
    for (std::size_t i = 0; i < n; ++i) {
      rows[i][x] = (x >> i) & 1u;
      if (rows[i][x]) names[x][i] = '1';
    }
  }
  return FiniteClass(m, std::move(rows), std::move(names));
}

FiniteClass hamming_ball_class(std::size_t m, std::size_t d) {
  if (m < 1 || m > 20) throw ParameterError("hamming ball class supports 1 <= m <= 20");
  std::vector<Bits> rows;
  for (std::size_t weight = 0; weight <= std::min(d, m); ++weight) {
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcount(mask)) != weight) continue;
      Bits r(m);
      for (std::size_t x = 0; x < m; ++x) r[x] = (mask >> x) & 1u;
      rows.push_back(std::move(r));
    }
  }
  return FiniteClass(m, std::move(rows));
}

FiniteClass singletons_class(std::size_t m, bool with_zero) {
  if (m < 1) throw ParameterError("singletons need a non-empty domain");
  std::vector<Bits> rows;
  if (with_zero) rows.emplace_back(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    Bits r(m, 0);
    r[i] = 1;
    rows.push_back(std::move(r));
  }
  return FiniteClass(m, std::move(rows));
}

namespace {

// State: rounds left, per-hypothesis committed disagreements (capped at
// k+1), and the multiset of deferred columns as counts per distinct column.
class MinimaxSearch {
 public:
  MinimaxSearch(const FiniteClass& H, std::size_t k, SearchLimits limits)
      : H_(H), k_(k), limits_(limits), cols_(distinct_columns(H)) {}

  int value(std::size_t rounds_left, const std::vector<std::uint8_t>& dis, std::vector<std::uint8_t>& deferred) {
    if (rounds_left == 0) return terminal(dis, deferred);
    std::string key;
    key.reserve(1 + dis.size() + deferred.size());
    key.push_back(static_cast<char>(rounds_left));
    key.append(dis.begin(), dis.end());
    key.append(deferred.begin(), deferred.end());
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (memo_.size() >= limits_.max_states)
      throw BudgetExceeded("minimax oracle exceeded " + std::to_string(limits_.max_states) + " states");

    int best = -1;
    for (std::size_t c = 0; c < cols_.size(); ++c) {
      const std::uint32_t x = cols_[c];
      ++deferred[c];
      const int v0 = value(rounds_left - 1, dis, deferred);
      --deferred[c];
      int v1 = -1;
      for (int y = 0; y <= 1; ++y) {
        std::vector<std::uint8_t> next = dis;
        bool feasible = false;
        for (std::size_t h = 0; h < H_.size(); ++h) {
          if (H_.at(h, x) != static_cast<bool>(y) && next[h] <= k_) ++next[h];
          if (next[h] <= k_) feasible = true;
        }
        if (!feasible) continue;
        v1 = std::max(v1, (y == 0 ? 1 : 0) + value(rounds_left - 1, next, deferred));
      }
      best = std::max(best, std::min(v0, v1));
    }
    memo_.emplace(std::move(key), best);
    return best;
  }

 private:
  int terminal(const std::vector<std::uint8_t>& dis, const std::vector<std::uint8_t>& deferred) const {
    int best = -1;
    for (std::size_t h = 0; h < H_.size(); ++h) {
      if (dis[h] > k_) continue;
      int ones = 0, zeros = 0;
      for (std::size_t c = 0; c < cols_.size(); ++c)
        (H_.at(h, cols_[c]) ? ones : zeros) += deferred[c];
      best = std::max(best, ones + std::min(static_cast<int>(k_ - dis[h]), zeros));
    }
    return best;
  }

  const FiniteClass& H_;
  std::size_t k_;
  SearchLimits limits_;
  std::vector<std::uint32_t> cols_;
  std::unordered_map<std::string, int> memo_;
};

}  // namespace

std::size_t minimax_oracle(const FiniteClass& H, std::size_t T, std::size_t k, SearchLimits limits) {
  if (H.empty()) throw ParameterError("minimax oracle needs a non-empty class");
  if (T > 200 || k > 200) throw BudgetExceeded("minimax oracle is meant for tiny T and k");
  MinimaxSearch s(H, k, limits);
  std::vector<std::uint8_t> dis(H.size(), 0);
  std::vector<std::uint8_t> deferred(distinct_columns(H).size(), 0);
  return static_cast<std::size_t>(s.value(T, dis, deferred));
}

FiniteClass read_class(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++line_no;
      if (!out.empty() && out.back() == '\r') out.pop_back();
      const auto first = out.find_first_not_of(" \t");
      if (first == std::string::npos || out[first] == '#') continue;
      out = out.substr(first, out.find_last_not_of(" \t") - first + 1);
      return true;
    }
    return false;
  };
  if (!next_line(line)) throw ParseError("class file: missing 'm n' header");
  std::istringstream hs(line);
  long long m = -1, n = -1;
  std::string extra;
  if (!(hs >> m >> n) || (hs >> extra) || m < 1 || n < 1)
    throw ParseError("class file line " + std::to_string(line_no) + ": expected positive 'm n'");
  std::vector<Bits> rows;
  std::unordered_set<std::string> seen;
  for (long long i = 0; i < n; ++i) {
    if (!next_line(line))
      throw ParseError("class file: expected " + std::to_string(n) + " rows, found " + std::to_string(i));
    if (line.size() != static_cast<std::size_t>(m) || line.find_first_not_of("01") != std::string::npos)
      throw ParseError("class file line " + std::to_string(line_no) + ": expected " + std::to_string(m) +
                       " characters from {0,1}");
    if (!seen.insert(line).second)
      throw ParseError("class file line " + std::to_string(line_no) + ": duplicate hypothesis " + line);
    Bits b(line.size());
    for (std::size_t x = 0; x < line.size(); ++x) b[x] = line[x] == '1';
    rows.push_back(std::move(b));
  }
  if (next_line(line)) throw ParseError("class file line " + std::to_string(line_no) + ": trailing content");
  return FiniteClass(static_cast<std::size_t>(m), std::move(rows));
}

FiniteClass read_class_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open class file " + path);
  return read_class(in);
}

void write_class(std::ostream& out, const FiniteClass& H, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << H.domain_size() << ' ' << H.size() << '\n';
  for (std::size_t h = 0; h < H.size(); ++h) out << H.row_string(h) << '\n';
}

}  // namespace appletaste
