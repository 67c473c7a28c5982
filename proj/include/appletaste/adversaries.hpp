#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "appletaste/combinatorics.hpp"
#include "appletaste/game.hpp"
#include "appletaste/rng.hpp"

namespace appletaste {

// Block count ceil(sqrt(T / log2 n)), never below 2.
std::size_t phase_block_count(std::size_t n, std::size_t T);

class PhaseAdversary final : public Adversary {
 public:
  PhaseAdversary(std::size_t n, std::size_t T);
  Instance next(std::size_t t) override;
  std::optional<bool> answer(std::size_t t, bool prediction) override;
  Resolution finalize(std::size_t horizon) override;
  std::string name() const override { return "phase"; }

  std::size_t blocks() const { return B_; }
  std::size_t phases_completed() const { return phases_; }
  std::size_t live_count() const { return live_.size(); }

 private:
  void start_phase();
  std::size_t n_, B_;
  std::vector<std::uint32_t> live_;  // sorted survivors
  bool in_phase_ = false;
  bool exhausted_ = false;
  std::size_t j_ = 0;
  std::vector<std::size_t> block_start_;  // offsets into live_, size B_ + 1
  std::size_t phases_ = 0;
  std::vector<std::vector<std::uint32_t>> one_rounds_;  // per expert, rounds it voted 1
};

class AgnosticPhaseAdversary final : public Adversary {
 public:
  AgnosticPhaseAdversary(std::size_t n, std::size_t T, std::size_t k);
  Instance next(std::size_t t) override;
  std::optional<bool> answer(std::size_t t, bool prediction) override;
  Resolution finalize(std::size_t horizon) override;
  std::string name() const override { return "agnostic_phase"; }

  std::size_t phases() const { return P_; }
  std::size_t phase_length() const { return len_; }
  // Forced-mistake floor min(sqrt(Tk) - k, floor(sqrt(T/k)) k).
  double floor_bound() const;

 private:
  std::optional<std::size_t> phase_of(std::size_t t) const;
  std::size_t n_, T_, k_, P_, len_;
  std::vector<std::size_t> ones_;                       // learner 1-predictions per phase
  std::vector<std::vector<std::uint32_t>> deferred_;    // deferred rounds per phase
};

class Width1Adversary final : public Adversary {
 public:
  Width1Adversary(std::shared_ptr<const FiniteClass> H, const WidthTree& tree, std::size_t k, std::size_t D,
                  std::size_t T);
  Instance next(std::size_t t) override;
  std::optional<bool> answer(std::size_t t, bool prediction) override;
  Resolution finalize(std::size_t horizon) override;
  std::string name() const override { return "width1"; }
  std::size_t forced_floor() const { return D_ * (k_ + 1); }

 private:
  std::size_t block_len() const { return D_ * (k_ + 1); }
  std::shared_ptr<const FiniteClass> H_;
  std::size_t k_, D_, T_;
  std::vector<std::uint32_t> spine_;
  std::vector<std::size_t> right_realizer_;
  std::size_t left_realizer_;
  std::optional<std::size_t> witness_;
  std::size_t block_ones_ = 0;
  std::vector<std::uint32_t> instances_;  // per round
  std::vector<std::int8_t> committed_;    // per round, -1 while deferred
};

class VersionSpaceAdversary final : public Adversary {
 public:
  // Instances are x_1..x_m of H presented cyclically, emitted as ids shifted
  // by `offset` (to play inside a glued domain).
  VersionSpaceAdversary(std::shared_ptr<const FiniteClass> H, std::size_t threshold, std::size_t offset = 0);
  Instance next(std::size_t t) override;
  std::optional<bool> answer(std::size_t t, bool prediction) override;
  Resolution finalize(std::size_t horizon) override;
  std::string name() const override { return "version_space"; }

  std::size_t version_space_size() const { return V_.size(); }
  std::optional<std::size_t> locked_round() const { return locked_round_; }

 private:
  std::size_t local(std::size_t t) const { return (t - 1) % H_->domain_size(); }
  std::shared_ptr<const FiniteClass> H_;
  std::size_t threshold_, offset_;
  std::vector<std::uint32_t> V_;
  std::optional<std::size_t> witness_;
  std::optional<std::size_t> locked_round_;
};

enum class FuzzKind { realizable, agnostic };

// Oblivious random sequences with a hidden witness and at most k flipped
// labels. Each game draws one of several regimes (independent votes, noisy
// clones of the witness, sparse votes).
class FuzzAdversary final : public Adversary {
 public:
  FuzzAdversary(std::size_t n_experts, std::size_t T, FuzzKind kind, std::size_t k, std::uint64_t seed);
  FuzzAdversary(std::shared_ptr<const FiniteClass> H, std::size_t T, FuzzKind kind, std::size_t k,
                std::uint64_t seed);
  Instance next(std::size_t t) override;
  std::optional<bool> answer(std::size_t t, bool prediction) override;
  Resolution finalize(std::size_t horizon) override;
  std::string name() const override;
  std::size_t declared_k() const { return k_; }

 private:
  void setup(std::size_t T);
  std::shared_ptr<const FiniteClass> H_;
  std::size_t n_ = 0;
  FuzzKind kind_;
  std::size_t k_;
  Rng rng_;
  std::size_t witness_ = 0;
  int regime_ = 0;
  double q_ = 0.5;
  double q_witness_ = 0.5;
  Bits flip_;
  Bits labels_;
  Bits witness_votes_;
};

struct RandomClassSpec {
  std::size_t d = 2;
  std::size_t T = 64;
  double c = 1.0;
  std::optional<double> p;  // default min(1/2, c sqrt(d log2 T / T))
  std::uint64_t seed = 1;
  std::size_t max_hypotheses = std::size_t{1} << 21;
};

double default_random_class_p(std::size_t d, std::size_t T, double c);

struct SampledClass {
  FiniteClass H;
  double p = 0;
  std::size_t requested = 0;  // T^d before dedup
  std::vector<std::string> header() const;  // "seed=<s> p=<p>" comment
  std::uint64_t seed = 0;
};

SampledClass sample_random_class(const RandomClassSpec& spec);

enum class ItemStatus { pass, fail, skipped };
std::string to_string(ItemStatus s);

struct RandomClassCheck {
  std::size_t d = 2;
  std::size_t T = 64;
  double ones_threshold = 0;
  double decay = 1.0;
  std::size_t ldim_cap = 64;  // exact search only for classes up to this many hypotheses
  std::size_t chains = 4;
  std::uint64_t seed = 1;
};

// Desk-scale defaults: item-1/item-2 thresholds scaled by c/100.
RandomClassCheck default_random_class_check(std::size_t d, std::size_t T, double c);

struct RandomClassReport {
  ItemStatus item1 = ItemStatus::skipped;
  ItemStatus item2 = ItemStatus::skipped;
  ItemStatus item3 = ItemStatus::skipped;
  std::size_t min_ones = 0;
  double worst_ratio = 1.0;  // min |H_{X->0}^(x->0)| / |H_{X->0}| seen in audited chains
  std::size_t restrictions_audited = 0;
  std::string item3_note;
  bool all_pass() const;
};

RandomClassReport verify_random_class(const FiniteClass& H, const RandomClassCheck& check);

}  // namespace appletaste
