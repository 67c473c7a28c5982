#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "appletaste/game.hpp"

namespace appletaste {

enum class ExpertMode { realizable, agnostic };

// A positive real threshold stored as base * 2^shift, so that L = n * 2^(k+1)
// stays representable for large k.
struct Threshold {
  double base = 1.0;
  long shift = 0;
  double log2() const;
  double value() const;  // may be +inf for huge shifts
};

struct ExpertLearnerState {
  std::size_t n = 0;
  ExpertMode mode = ExpertMode::realizable;
  double eta = 0.0;
  Threshold L;
  std::size_t k = 0;  // initial budget (0 in realizable mode)
  std::size_t horizon = 0;
  Bits live;
  std::size_t live_count = 0;
  std::vector<std::uint64_t> distance;
  std::vector<std::uint32_t> budget;
};

ExpertLearnerState make_expert_state(std::size_t n, double eta, Threshold L, std::size_t k,
                                     ExpertMode mode, std::size_t horizon = 0);

// eta = sqrt(log2 n / T), L = n.
ExpertLearnerState realizable_expat_state(std::size_t n, std::size_t T);
// eta = sqrt((k + log2 n) / T), L = n * 2^(k+1).
ExpertLearnerState expat_state(std::size_t n, std::size_t T, std::size_t k);

bool expat_predict(const ExpertLearnerState& s, const Bits& preds);
void expat_update(ExpertLearnerState& s, const Bits& preds, bool yhat, std::optional<bool> y);

// Upper bounds with the explicit constants of the analysis.
struct ExpertBounds {
  double false_negatives = 0;
  double false_positives = 0;
  double total() const { return false_negatives + false_positives; }
};
ExpertBounds expat_bounds(const ExpertLearnerState& s);

class ExpertLearner final : public Learner {
 public:
  ExpertLearner(ExpertLearnerState state, std::string name);
  bool accepts(const Instance& x) const override;
  bool predict(const Instance& x) override;
  void observe(const Instance& x, bool prediction, std::optional<bool> label) override;
  std::unique_ptr<Learner> clone() const override;
  std::string name() const override { return name_; }
  const ExpertLearnerState& state() const { return state_; }

 private:
  ExpertLearnerState state_;
  std::string name_;
};

std::unique_ptr<ExpertLearner> make_realizable_expat(std::size_t n, std::size_t T);
std::unique_ptr<ExpertLearner> make_expat(std::size_t n, std::size_t T, std::size_t k);

// Baseline: predicts 1 iff some live expert predicts 1; every revealed
// disagreement costs the expert one unit of budget k, and an expert out of
// budget is dropped.
class GreedyExpertLearner final : public Learner {
 public:
  GreedyExpertLearner(std::size_t n, std::size_t k);
  bool accepts(const Instance& x) const override;
  bool predict(const Instance& x) override;
  void observe(const Instance& x, bool prediction, std::optional<bool> label) override;
  std::unique_ptr<Learner> clone() const override;
  std::string name() const override { return "greedy"; }

 private:
  std::size_t n_;
  std::vector<std::int64_t> budget_;  // -1 once dropped
};

struct DoublingState {
  std::size_t g_k = 1;
  std::size_t g_T = 1;
  std::size_t T0 = 0;  // round at which the current epoch started (0 before any restart)
  std::size_t epoch_rounds = 0;
  std::size_t restarts = 0;
  ExpertLearnerState inner;
  std::vector<std::uint32_t> false_positives;  // per expert, since the last restart
};

std::size_t dt_k_guess(std::size_t g_k, std::size_t n);
std::size_t dt_T_guess(std::size_t g_T, std::size_t n);

class DTExpAT final : public Learner {
 public:
  explicit DTExpAT(std::size_t n);
  bool accepts(const Instance& x) const override;
  bool predict(const Instance& x) override;
  void observe(const Instance& x, bool prediction, std::optional<bool> label) override;
  std::unique_ptr<Learner> clone() const override;
  std::string name() const override { return "dt_expat"; }
  const DoublingState& state() const { return state_; }

 private:
  void maybe_restart();
  std::size_t n_;
  DoublingState state_;
};

std::unique_ptr<DTExpAT> make_dt_expat(std::size_t n);

struct DiagnosticsLedger {
  double twdg = 0;
  double tw2dg = 0;
  // realizable buckets: n_d indexed by d
  std::vector<std::size_t> n_d;
  // agnostic buckets: n_dl[l][d]
  std::vector<std::vector<std::size_t>> n_dl;
  double realizable_helper_sum = 0;  // sum_d n_d 2^d
  double agnostic_helper_sum = 0;    // sum_l sum_d n_d^(l) 2^(k-l+d)
};

// Replays the transcript through a fresh learner with the given parameters;
// throws ProtocolError when the recorded predictions do not match.
DiagnosticsLedger diagnostics(const Transcript& tr, const ExpertLearnerState& params);

}  // namespace appletaste
