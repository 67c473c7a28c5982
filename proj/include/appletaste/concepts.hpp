#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "appletaste/combinatorics.hpp"
#include "appletaste/experts.hpp"
#include "appletaste/game.hpp"

namespace appletaste {

enum class NarrowUpdate {
  // Every revealed disagreement costs a unit of budget (drops at budget 0).
  charge_disagreements,
  // Literal V <- V^(x -> y): a revealed 1 removes all hypotheses predicting 0.
  strict,
};

class NarrowConceptAT final : public Learner {
 public:
  NarrowConceptAT(std::shared_ptr<const FiniteClass> H, std::size_t k,
                  NarrowUpdate update = NarrowUpdate::charge_disagreements);
  bool accepts(const Instance& x) const override;
  bool predict(const Instance& x) override;
  void observe(const Instance& x, bool prediction, std::optional<bool> label) override;
  std::unique_ptr<Learner> clone() const override;
  std::string name() const override { return "narrow"; }
  const BudgetedClass& version_space() const { return V_; }

 private:
  BudgetedClass V_;
  NarrowUpdate update_;
};

std::unique_ptr<NarrowConceptAT> make_narrow_concept_at(std::shared_ptr<const FiniteClass> H, std::size_t k,
                                                        NarrowUpdate update = NarrowUpdate::charge_disagreements);

// Littlestone dimensions of subclasses of a fixed class (at most 64
// hypotheses), memoized by hypothesis mask. The empty class has dimension -1.
class LdimCache {
 public:
  explicit LdimCache(const FiniteClass& H, SearchLimits limits = {});
  int ldim(HypMask V);
  // Standard optimal algorithm: the label whose restriction keeps the larger
  // dimension, ties to 1.
  bool soa(HypMask V, std::size_t x);
  HypMask ones(std::size_t x) const { return ones_[x]; }
  HypMask all() const { return all_; }

 private:
  std::vector<HypMask> ones_;
  std::vector<std::uint32_t> cols_;
  HypMask all_;
  SearchLimits limits_;
  std::unordered_map<HypMask, int> memo_;
};

bool soa_predict(const FiniteClass& V, std::size_t x);

enum class CoverStrategy {
  automatic,      // the smaller of the two below; identity when L(H) is out of reach
  soa_deviation,  // one expert per set of at most L(H) deviation rounds
  identity,       // the hypotheses themselves
};

// sum_{i <= L} C(T, i), saturating at SIZE_MAX.
std::size_t deviation_cover_size(std::size_t T, std::size_t L);

// Experts covering H on every instance sequence of length <= T. Experts are
// advanced together, one instance per round.
class CoverExpertSet {
 public:
  CoverExpertSet(std::shared_ptr<const FiniteClass> H, std::size_t T,
                 CoverStrategy strategy = CoverStrategy::automatic, std::size_t max_experts = 1u << 22);

  std::size_t size() const;
  std::size_t horizon() const { return T_; }
  CoverStrategy strategy() const { return strategy_; }
  std::size_t base_ldim() const { return ldim_; }  // 0 when not computed (identity)
  const std::vector<std::vector<std::uint32_t>>& deviation_sets() const { return sets_; }

  // Predictions of every expert on x in the current round.
  Bits votes(std::size_t x);
  // Advances every expert past the current round given the votes it cast.
  void commit(std::size_t x, const Bits& votes);

 private:
  std::shared_ptr<const FiniteClass> H_;
  std::size_t T_;
  CoverStrategy strategy_;
  std::size_t ldim_ = 0;
  std::size_t round_ = 0;  // rounds already played
  std::shared_ptr<LdimCache> cache_;
  std::vector<std::vector<std::uint32_t>> sets_;  // 1-based deviation rounds
  std::vector<std::size_t> next_dev_;
  std::vector<HypMask> V_;
};

// Per-expert prediction rows of a fresh cover on the given instance sequence.
std::vector<Bits> cover_predictions(CoverExpertSet cover, const std::vector<std::uint32_t>& seq);

// Plays a class game with an expert learner whose experts are the hypotheses.
class ClassExpertAdapter final : public Learner {
 public:
  ClassExpertAdapter(std::shared_ptr<const FiniteClass> H, std::unique_ptr<Learner> inner);
  ClassExpertAdapter(const ClassExpertAdapter& other);
  bool accepts(const Instance& x) const override;
  bool predict(const Instance& x) override;
  void observe(const Instance& x, bool prediction, std::optional<bool> label) override;
  std::unique_ptr<Learner> clone() const override;
  std::string name() const override { return inner_->name(); }

 private:
  Instance advice(const Instance& x) const;
  std::shared_ptr<const FiniteClass> H_;
  std::unique_ptr<Learner> inner_;
};

class ReductionLearner final : public Learner {
 public:
  ReductionLearner(std::shared_ptr<const FiniteClass> H, std::size_t T, std::size_t k,
                   CoverStrategy strategy = CoverStrategy::automatic);
  bool accepts(const Instance& x) const override;
  bool predict(const Instance& x) override;
  void observe(const Instance& x, bool prediction, std::optional<bool> label) override;
  std::unique_ptr<Learner> clone() const override;
  std::string name() const override { return "reduction"; }

  const CoverExpertSet& cover() const { return cover_; }
  // ExpAT state over the cover; nullopt when the cover has a single expert.
  const std::optional<ExpertLearnerState>& expert_state() const { return inner_; }
  // Mistake bound of ExpAT instantiated with n = |cover|.
  double mistake_bound() const;

 private:
  std::shared_ptr<const FiniteClass> H_;
  std::size_t k_;
  CoverExpertSet cover_;
  std::optional<ExpertLearnerState> inner_;
  Bits votes_;
};

std::unique_ptr<ReductionLearner> make_reduction_learner(std::shared_ptr<const FiniteClass> H, std::size_t T,
                                                         std::size_t k,
                                                         CoverStrategy strategy = CoverStrategy::automatic);

class DoublingNarrow final : public Learner {
 public:
  explicit DoublingNarrow(std::shared_ptr<const FiniteClass> H,
                          NarrowUpdate update = NarrowUpdate::charge_disagreements);
  bool accepts(const Instance& x) const override;
  bool predict(const Instance& x) override;
  void observe(const Instance& x, bool prediction, std::optional<bool> label) override;
  std::unique_ptr<Learner> clone() const override;
  std::string name() const override { return "doubling_narrow"; }
  std::size_t k_guess() const { return k_; }
  std::size_t doublings() const { return doublings_; }

 private:
  std::shared_ptr<const FiniteClass> H_;
  NarrowUpdate update_;
  std::size_t k_ = 1;
  std::size_t doublings_ = 0;
  NarrowConceptAT inner_;
};

std::unique_ptr<DoublingNarrow> make_doubling_narrow(std::shared_ptr<const FiniteClass> H);

class DoublingReduction final : public Learner {
 public:
  explicit DoublingReduction(std::shared_ptr<const FiniteClass> H,
                             CoverStrategy strategy = CoverStrategy::automatic);
  bool accepts(const Instance& x) const override;
  bool predict(const Instance& x) override;
  void observe(const Instance& x, bool prediction, std::optional<bool> label) override;
  std::unique_ptr<Learner> clone() const override;
  std::string name() const override { return "doubling_reduction"; }

  std::size_t T_guess() const { return T_guess_; }
  std::size_t k_guess() const;
  std::size_t restarts() const { return restarts_; }
  const CoverExpertSet& cover() const { return cover_; }

 private:
  void restart();
  void maybe_restart();
  std::shared_ptr<const FiniteClass> H_;
  CoverStrategy strategy_;
  std::size_t g_k_ = 1;
  std::size_t T_guess_;
  std::size_t epoch_rounds_ = 0;
  std::size_t restarts_ = 0;
  CoverExpertSet cover_;
  std::optional<ExpertLearnerState> inner_;
  std::vector<std::uint32_t> false_positives_;
  Bits votes_;
};

std::unique_ptr<DoublingReduction> make_doubling_reduction(std::shared_ptr<const FiniteClass> H);

}  // namespace appletaste
