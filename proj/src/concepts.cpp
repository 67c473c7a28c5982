#include "appletaste/concepts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "appletaste/errors.hpp"

namespace appletaste {

namespace {

std::size_t point_id(const Instance& x) { return std::get<Point>(x).id; }

bool point_in_domain(const Instance& x, const FiniteClass& H) {
  const auto* p = std::get_if<Point>(&x);
  return p && p->id < H.domain_size();
}

}  // namespace

NarrowConceptAT::NarrowConceptAT(std::shared_ptr<const FiniteClass> H, std::size_t k, NarrowUpdate update)
    : V_(make_budgeted(std::move(H), k)), update_(update) {
  if (!V_.base || V_.base->empty()) throw ParameterError("NarrowConceptAT needs a non-empty class");
}

bool NarrowConceptAT::accepts(const Instance& x) const { return point_in_domain(x, *V_.base); }

bool NarrowConceptAT::predict(const Instance& x) {
  const std::size_t id = point_id(x);
  if (id >= V_.base->domain_size()) throw DomainError("instance outside the class domain");
  for (std::size_t h = 0; h < V_.budget.size(); ++h)
    if (V_.budget[h] >= 0 && V_.base->at(h, id)) return true;
  return false;
}

void NarrowConceptAT::observe(const Instance& x, bool prediction, std::optional<bool> label) {
  if (!prediction) return;
  const std::size_t id = point_id(x);
  if (update_ == NarrowUpdate::strict) {
    V_ = restrict_budgeted(V_, id, *label);
    return;
  }
  for (std::size_t h = 0; h < V_.budget.size(); ++h) {
    int& b = V_.budget[h];
    if (b < 0 || V_.base->at(h, id) == *label) continue;
    b = b == 0 ? -1 : b - 1;
  }
}

std::unique_ptr<Learner> NarrowConceptAT::clone() const { return std::make_unique<NarrowConceptAT>(*this); }

std::unique_ptr<NarrowConceptAT> make_narrow_concept_at(std::shared_ptr<const FiniteClass> H, std::size_t k,
                                                        NarrowUpdate update) {
  return std::make_unique<NarrowConceptAT>(std::move(H), k, update);
}

LdimCache::LdimCache(const FiniteClass& H, SearchLimits limits)
    : ones_(one_masks(H)), cols_(distinct_columns(H)), limits_(limits) {
  all_ = H.size() == 64 ? ~HypMask{0} : (HypMask{1} << H.size()) - 1;
}

int LdimCache::ldim(HypMask V) {
  if (V == 0) return -1;
  if ((V & (V - 1)) == 0) return 0;
  if (auto it = memo_.find(V); it != memo_.end()) return it->second;
  if (memo_.size() >= limits_.max_states)
    throw BudgetExceeded("Littlestone dimension cache exceeded " + std::to_string(limits_.max_states) + " states");
  int best = 0;
  for (std::uint32_t x : cols_) {
    const HypMask v1 = V & ones_[x];
    const HypMask v0 = V & ~ones_[x];
    if (v1 == 0 || v0 == 0) continue;
    const int a = ldim(v1);
    if (a + 1 <= best) continue;
    best = std::max(best, 1 + std::min(a, ldim(v0)));
  }
  memo_.emplace(V, best);
  return best;
}

bool LdimCache::soa(HypMask V, std::size_t x) {
  return ldim(V & ones_.at(x)) >= ldim(V & ~ones_.at(x));
}

bool soa_predict(const FiniteClass& V, std::size_t x) {
  if (x >= V.domain_size()) throw DomainError("instance outside the class domain");
  if (V.empty()) return true;
  LdimCache cache(V);
  return cache.soa(cache.all(), x);
}

std::size_t deviation_cover_size(std::size_t T, std::size_t L) {
  const std::size_t top = std::min(T, L);
  long double total = 0, term = 1;
  for (std::size_t i = 0; i <= top; ++i) {
    if (i > 0) term = term * static_cast<long double>(T - i + 1) / static_cast<long double>(i);
    total += term;
  }
  if (total >= static_cast<long double>(std::numeric_limits<std::size_t>::max()))
    return std::numeric_limits<std::size_t>::max();
  return static_cast<std::size_t>(std::llround(total));
}

namespace {

void enumerate_sets(std::size_t T, std::size_t L, std::vector<std::uint32_t>& cur,
                    std::vector<std::vector<std::uint32_t>>& out) {
  out.push_back(cur);
  if (cur.size() == L) return;
  const std::uint32_t start = cur.empty() ? 1 : cur.back() + 1;
  for (std::uint32_t r = start; r <= T; ++r) {
    cur.push_back(r);
    enumerate_sets(T, L, cur, out);
    cur.pop_back();
  }
}

}  // namespace

CoverExpertSet::CoverExpertSet(std::shared_ptr<const FiniteClass> H, std::size_t T, CoverStrategy strategy,
                               std::size_t max_experts)
    : H_(std::move(H)), T_(T), strategy_(strategy) {
  if (!H_ || H_->empty()) throw ParameterError("cover needs a non-empty class");
  if (strategy_ == CoverStrategy::automatic) {
    if (H_->size() > kMaxSearchHypotheses) {
      strategy_ = CoverStrategy::identity;
    } else {
      cache_ = std::make_shared<LdimCache>(*H_);
      ldim_ = static_cast<std::size_t>(cache_->ldim(cache_->all()));
      strategy_ = deviation_cover_size(T_, ldim_) < H_->size() ? CoverStrategy::soa_deviation
                                                               : CoverStrategy::identity;
    }
  }
  if (strategy_ == CoverStrategy::identity) {
    if (H_->size() > max_experts) throw BudgetExceeded("cover exceeds the expert budget");
    return;
  }
  if (!cache_) {
    cache_ = std::make_shared<LdimCache>(*H_);
    ldim_ = static_cast<std::size_t>(cache_->ldim(cache_->all()));
  }
  const std::size_t count = deviation_cover_size(T_, ldim_);
  if (count > max_experts)
    throw BudgetExceeded("deviation cover of " + std::to_string(count) + " experts exceeds the budget");
  std::vector<std::uint32_t> cur;
  sets_.reserve(count);
  enumerate_sets(T_, ldim_, cur, sets_);
  next_dev_.assign(sets_.size(), 0);
  V_.assign(sets_.size(), cache_->all());
}

std::size_t CoverExpertSet::size() const {
  return strategy_ == CoverStrategy::identity ? H_->size() : sets_.size();
}

Bits CoverExpertSet::votes(std::size_t x) {
  if (x >= H_->domain_size()) throw DomainError("instance outside the class domain");
  Bits v(size());
  if (strategy_ == CoverStrategy::identity) {
    for (std::size_t h = 0; h < v.size(); ++h) v[h] = H_->at(h, x);
    return v;
  }
  const auto round = static_cast<std::uint32_t>(round_ + 1);
  std::unordered_map<HypMask, bool> soa_round;
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto it = soa_round.find(V_[i]);
    if (it == soa_round.end()) it = soa_round.emplace(V_[i], cache_->soa(V_[i], x)).first;
    bool p = it->second;
    if (next_dev_[i] < sets_[i].size() && sets_[i][next_dev_[i]] == round) p = !p;
    v[i] = p;
  }
  return v;
}

void CoverExpertSet::commit(std::size_t x, const Bits& votes) {
  if (votes.size() != size()) throw ParameterError("vote vector does not match the cover");
  if (strategy_ == CoverStrategy::soa_deviation) {
    const auto round = static_cast<std::uint32_t>(round_ + 1);
    const HypMask ones = cache_->ones(x);
    for (std::size_t i = 0; i < V_.size(); ++i) {
      V_[i] &= votes[i] ? ones : ~ones;
      if (next_dev_[i] < sets_[i].size() && sets_[i][next_dev_[i]] == round) ++next_dev_[i];
    }
  }
  ++round_;
}

std::vector<Bits> cover_predictions(CoverExpertSet cover, const std::vector<std::uint32_t>& seq) {
  std::vector<Bits> rows(cover.size(), Bits(seq.size(), 0));
  for (std::size_t t = 0; t < seq.size(); ++t) {
    Bits v = cover.votes(seq[t]);
    for (std::size_t i = 0; i < v.size(); ++i) rows[i][t] = v[i];
    cover.commit(seq[t], v);
  }
  return rows;
}

ClassExpertAdapter::ClassExpertAdapter(std::shared_ptr<const FiniteClass> H, std::unique_ptr<Learner> inner)
    : H_(std::move(H)), inner_(std::move(inner)) {}

ClassExpertAdapter::ClassExpertAdapter(const ClassExpertAdapter& other)
    : H_(other.H_), inner_(other.inner_->clone()) {}

Instance ClassExpertAdapter::advice(const Instance& x) const {
  const std::size_t id = point_id(x);
  Advice a;
  a.votes.resize(H_->size());
  for (std::size_t h = 0; h < H_->size(); ++h) a.votes[h] = H_->at(h, id);
  return a;
}

bool ClassExpertAdapter::accepts(const Instance& x) const { return point_in_domain(x, *H_); }

bool ClassExpertAdapter::predict(const Instance& x) { return inner_->predict(advice(x)); }

void ClassExpertAdapter::observe(const Instance& x, bool prediction, std::optional<bool> label) {
  inner_->observe(advice(x), prediction, label);
}

std::unique_ptr<Learner> ClassExpertAdapter::clone() const { return std::make_unique<ClassExpertAdapter>(*this); }

ReductionLearner::ReductionLearner(std::shared_ptr<const FiniteClass> H, std::size_t T, std::size_t k,
                                   CoverStrategy strategy)
    : H_(H), k_(k), cover_(std::move(H), T, strategy) {
  if (cover_.size() >= 2) inner_ = expat_state(cover_.size(), std::max<std::size_t>(T, 2), k);
}

bool ReductionLearner::accepts(const Instance& x) const { return point_in_domain(x, *H_); }

bool ReductionLearner::predict(const Instance& x) {
  votes_ = cover_.votes(point_id(x));
  if (!inner_) return votes_[0] != 0;  // a single expert covers everything: follow it
  return expat_predict(*inner_, votes_);
}

void ReductionLearner::observe(const Instance& x, bool prediction, std::optional<bool> label) {
  if (inner_) expat_update(*inner_, votes_, prediction, label);
  cover_.commit(point_id(x), votes_);
}

std::unique_ptr<Learner> ReductionLearner::clone() const { return std::make_unique<ReductionLearner>(*this); }

double ReductionLearner::mistake_bound() const {
  if (!inner_) return static_cast<double>(k_);
  return expat_bounds(*inner_).total();
}

std::unique_ptr<ReductionLearner> make_reduction_learner(std::shared_ptr<const FiniteClass> H, std::size_t T,
                                                         std::size_t k, CoverStrategy strategy) {
  return std::make_unique<ReductionLearner>(std::move(H), T, k, strategy);
}

DoublingNarrow::DoublingNarrow(std::shared_ptr<const FiniteClass> H, NarrowUpdate update)
    : H_(H), update_(update), inner_(std::move(H), 1, update) {}

bool DoublingNarrow::accepts(const Instance& x) const { return inner_.accepts(x); }

bool DoublingNarrow::predict(const Instance& x) { return inner_.predict(x); }

void DoublingNarrow::observe(const Instance& x, bool prediction, std::optional<bool> label) {
  inner_.observe(x, prediction, label);
  if (inner_.version_space().empty()) {
    k_ *= 2;
    ++doublings_;
    inner_ = NarrowConceptAT(H_, k_, update_);
  }
}

std::unique_ptr<Learner> DoublingNarrow::clone() const { return std::make_unique<DoublingNarrow>(*this); }

std::unique_ptr<DoublingNarrow> make_doubling_narrow(std::shared_ptr<const FiniteClass> H) {
  return std::make_unique<DoublingNarrow>(std::move(H));
}

namespace {

std::size_t initial_T_guess(const FiniteClass& H) {
  const double n = std::max<double>(2.0, static_cast<double>(H.size()));
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(std::log2(n))));
}

}  // namespace

DoublingReduction::DoublingReduction(std::shared_ptr<const FiniteClass> H, CoverStrategy strategy)
    : H_(H), strategy_(strategy), T_guess_(initial_T_guess(*H)), cover_(std::move(H), T_guess_, strategy) {
  restart();
  restarts_ = 0;
}

std::size_t DoublingReduction::k_guess() const {
  const double n = std::max<double>(2.0, static_cast<double>(cover_.size()));
  return static_cast<std::size_t>(std::ceil(static_cast<double>(g_k_) * std::log2(n)));
}

void DoublingReduction::restart() {
  const std::size_t n = cover_.size();
  if (n >= 2) {
    inner_ = expat_state(n, T_guess_, k_guess());
  } else {
    inner_.reset();
  }
  false_positives_.assign(n, 0);
  epoch_rounds_ = 0;
  ++restarts_;
}

void DoublingReduction::maybe_restart() {
  const std::size_t kg = k_guess();
  const bool epoch_over = epoch_rounds_ >= T_guess_;
  const bool budgets_over = std::all_of(false_positives_.begin(), false_positives_.end(),
                                        [kg](std::uint32_t c) { return c > kg; });
  if (!epoch_over && !budgets_over) return;
  if (epoch_over) T_guess_ *= 2;
  if (budgets_over) g_k_ *= 2;
  cover_ = CoverExpertSet(H_, T_guess_, strategy_);
  restart();
}

bool DoublingReduction::accepts(const Instance& x) const { return point_in_domain(x, *H_); }

bool DoublingReduction::predict(const Instance& x) {
  maybe_restart();
  votes_ = cover_.votes(point_id(x));
  if (!inner_) return votes_[0] != 0;
  return expat_predict(*inner_, votes_);
}

void DoublingReduction::observe(const Instance& x, bool prediction, std::optional<bool> label) {
  if (inner_) expat_update(*inner_, votes_, prediction, label);
  if (prediction && !*label)
    for (std::size_t i = 0; i < votes_.size(); ++i)
      if (votes_[i]) ++false_positives_[i];
  cover_.commit(point_id(x), votes_);
  ++epoch_rounds_;
}

std::unique_ptr<Learner> DoublingReduction::clone() const { return std::make_unique<DoublingReduction>(*this); }

std::unique_ptr<DoublingReduction> make_doubling_reduction(std::shared_ptr<const FiniteClass> H) {
  return std::make_unique<DoublingReduction>(std::move(H));
}

}  // namespace appletaste
