#include "appletaste/adversaries.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "appletaste/errors.hpp"

namespace appletaste {

std::size_t phase_block_count(std::size_t n, std::size_t T) {
  if (n < 2) throw ParameterError("phase adversary needs n >= 2");
  if (T < 1) throw ParameterError("phase adversary needs T >= 1");
  const double b = std::ceil(std::sqrt(static_cast<double>(T) / std::log2(static_cast<double>(n))));
  return std::max<std::size_t>(2, static_cast<std::size_t>(b));
}

PhaseAdversary::PhaseAdversary(std::size_t n, std::size_t T)
    : n_(n), B_(phase_block_count(n, T)), live_(n), one_rounds_(n) {
  for (std::size_t j = 0; j < n; ++j) live_[j] = static_cast<std::uint32_t>(j);
}

void PhaseAdversary::start_phase() {
  if (live_.size() < B_) {
    exhausted_ = true;
    return;
  }
  block_start_.assign(B_ + 1, 0);
  const std::size_t base = live_.size() / B_, extra = live_.size() % B_;
  for (std::size_t b = 0; b < B_; ++b) block_start_[b + 1] = block_start_[b] + base + (b < extra ? 1 : 0);
  j_ = 0;
  in_phase_ = true;
}

Instance PhaseAdversary::next(std::size_t) {
  if (!in_phase_ && !exhausted_) start_phase();
  Advice a;
  a.votes.assign(n_, 0);
  if (exhausted_) return a;
  for (std::size_t i = block_start_[j_]; i < block_start_[j_ + 1]; ++i) a.votes[live_[i]] = 1;
  return a;
}

std::optional<bool> PhaseAdversary::answer(std::size_t t, bool prediction) {
  if (exhausted_) return false;
  const std::size_t lo = block_start_[j_], hi = block_start_[j_ + 1];
  if (prediction) {
    for (std::size_t i = lo; i < hi; ++i) one_rounds_[live_[i]].clear();
    live_.erase(live_.begin() + static_cast<std::ptrdiff_t>(lo), live_.begin() + static_cast<std::ptrdiff_t>(hi));
    in_phase_ = false;
    ++phases_;
    return false;
  }
  for (std::size_t i = lo; i < hi; ++i) one_rounds_[live_[i]].push_back(static_cast<std::uint32_t>(t));
  j_ = (j_ + 1) % B_;
  return std::nullopt;
}

Resolution PhaseAdversary::finalize(std::size_t horizon) {
  // Any survivor is consistent; the one that voted 1 most often on deferred
  // rounds turns the most learner 0s into mistakes.
  std::size_t witness = live_.front();
  for (std::uint32_t j : live_)
    if (one_rounds_[j].size() > one_rounds_[witness].size()) witness = j;
  Resolution r;
  r.labels.assign(horizon, 0);
  for (std::uint32_t t : one_rounds_[witness])
    if (t <= horizon) r.labels[t - 1] = 1;
  r.k = 0;
  r.certificate.witness = witness;
  r.certificate.witness_predictions = r.labels;
  return r;
}

AgnosticPhaseAdversary::AgnosticPhaseAdversary(std::size_t n, std::size_t T, std::size_t k)
    : n_(n), T_(T), k_(k) {
  if (k == 0) throw ParameterError("agnostic phase adversary needs k >= 1 (use the phase adversary for k = 0)");
  if (k > T) throw ParameterError("agnostic phase adversary needs k <= T");
  P_ = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(T) / static_cast<double>(k))));
  len_ = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(T) * static_cast<double>(k))));
  if (n <= P_)
    throw ParameterError("agnostic phase adversary needs more than " + std::to_string(P_) + " experts");
  ones_.assign(P_, 0);
  deferred_.assign(P_, {});
}

double AgnosticPhaseAdversary::floor_bound() const {
  const double a = std::sqrt(static_cast<double>(T_) * static_cast<double>(k_)) - static_cast<double>(k_);
  const double b = static_cast<double>(P_ * k_);
  return std::min(a, b);
}

std::optional<std::size_t> AgnosticPhaseAdversary::phase_of(std::size_t t) const {
  const std::size_t i = (t - 1) / len_;
  if (i >= P_) return std::nullopt;
  return i;
}

Instance AgnosticPhaseAdversary::next(std::size_t t) {
  Advice a;
  a.votes.assign(n_, 0);
  if (auto i = phase_of(t)) a.votes[*i] = 1;
  return a;
}

std::optional<bool> AgnosticPhaseAdversary::answer(std::size_t t, bool prediction) {
  const auto i = phase_of(t);
  if (!i) return false;
  if (prediction) {
    ++ones_[*i];
    return false;
  }
  deferred_[*i].push_back(static_cast<std::uint32_t>(t));
  return std::nullopt;
}

Resolution AgnosticPhaseAdversary::finalize(std::size_t horizon) {
  Resolution r;
  r.labels.assign(horizon, 0);
  r.k = k_;
  r.certificate.witness_predictions.assign(horizon, 0);
  // Only phases that were played in full can be charged to their expert.
  const std::size_t played = std::min(P_, horizon / len_);
  for (std::size_t i = 0; i < played; ++i) {
    if (ones_[i] >= k_) continue;
    for (std::uint32_t t : deferred_[i]) r.labels[t - 1] = 1;
    for (std::size_t t = i * len_; t < (i + 1) * len_; ++t) r.certificate.witness_predictions[t] = 1;
    r.certificate.witness = i;
    return r;
  }
  r.certificate.witness = P_;  // votes 0 on every round
  return r;
}

Width1Adversary::Width1Adversary(std::shared_ptr<const FiniteClass> H, const WidthTree& tree, std::size_t k,
                                 std::size_t D, std::size_t T)
    : H_(std::move(H)), k_(k), D_(D), T_(T) {
  if (D < 1) throw ParameterError("width-1 adversary needs D >= 1");
  if (tree.width() > 1) throw ParameterError("tree is not of width 1");
  if (!is_shattered(tree, make_budgeted(H_, 0))) throw ParameterError("tree is not shattered by the class");
  spine_ = tree.left_spine();
  if (spine_.size() < D) throw ParameterError("tree is shallower than D");
  spine_.resize(D);
  if (D * D * (k + 1) > T) throw ParameterError("horizon too short: need D^2 (k+1) <= T");

  auto first_match = [this](std::size_t zeros, std::optional<std::uint32_t> one) -> std::size_t {
    for (std::size_t h = 0; h < H_->size(); ++h) {
      bool ok = true;
      for (std::size_t i = 0; i < zeros && ok; ++i) ok = !H_->at(h, spine_[i]);
      if (ok && one) ok = H_->at(h, *one);
      if (ok) return h;
    }
    throw ParameterError("tree branch has no realizer");
  };
  for (std::size_t i = 0; i < D; ++i) right_realizer_.push_back(first_match(i, spine_[i]));
  left_realizer_ = first_match(D, std::nullopt);
}

Instance Width1Adversary::next(std::size_t t) {
  std::uint32_t x = spine_.front();
  if (!witness_) x = spine_[(t - 1) / block_len()];
  instances_.push_back(x);
  return Point{x};
}

std::optional<bool> Width1Adversary::answer(std::size_t t, bool prediction) {
  const std::uint32_t x = instances_.at(t - 1);
  if (witness_) {
    committed_.push_back(H_->at(*witness_, x));
    return committed_.back() != 0;
  }
  if (prediction) ++block_ones_;
  std::optional<bool> reply = prediction ? std::optional<bool>(false) : std::nullopt;
  committed_.push_back(prediction ? 0 : -1);
  if (t % block_len() == 0) {
    const std::size_t i = t / block_len() - 1;
    if (block_ones_ < k_ + 1) {
      witness_ = right_realizer_[i];
    } else if (i + 1 == D_) {
      witness_ = left_realizer_;
    }
    block_ones_ = 0;
  }
  return reply;
}

Resolution Width1Adversary::finalize(std::size_t horizon) {
  const std::size_t w = witness_ ? *witness_ : left_realizer_;
  Resolution r;
  r.k = k_;
  r.certificate.witness = w;
  r.certificate.witness_predictions.resize(horizon);
  r.labels.resize(horizon);
  // Deferred rounds follow the witness; the (at most k) rounds answered 0
  // where it votes 1 are its disagreements.
  for (std::size_t t = 0; t < horizon; ++t) {
    const bool h = H_->at(w, instances_.at(t));
    r.certificate.witness_predictions[t] = h;
    r.labels[t] = committed_.at(t) >= 0 ? static_cast<std::uint8_t>(committed_[t]) : h;
  }
  return r;
}

VersionSpaceAdversary::VersionSpaceAdversary(std::shared_ptr<const FiniteClass> H, std::size_t threshold,
                                             std::size_t offset)
    : H_(std::move(H)), threshold_(threshold), offset_(offset) {
  if (!H_ || H_->empty()) throw ParameterError("version-space adversary needs a non-empty class");
  if (threshold < 1) throw ParameterError("version-space threshold must be >= 1");
  V_.resize(H_->size());
  for (std::size_t h = 0; h < V_.size(); ++h) V_[h] = static_cast<std::uint32_t>(h);
}

Instance VersionSpaceAdversary::next(std::size_t t) {
  return Point{static_cast<std::uint32_t>(offset_ + local(t))};
}

std::optional<bool> VersionSpaceAdversary::answer(std::size_t t, bool prediction) {
  const std::size_t x = local(t);
  if (!witness_ && V_.size() < threshold_) {
    witness_ = V_.front();
    locked_round_ = t;
  }
  if (witness_) return H_->at(*witness_, x);
  if (!prediction) return std::nullopt;
  std::vector<std::uint32_t> zeros;
  zeros.reserve(V_.size());
  for (std::uint32_t h : V_)
    if (!H_->at(h, x)) zeros.push_back(h);
  if (zeros.empty()) {
    // Answering 0 would leave no consistent hypothesis.
    witness_ = V_.front();
    locked_round_ = t;
    return H_->at(*witness_, x);
  }
  V_ = std::move(zeros);
  return false;
}

Resolution VersionSpaceAdversary::finalize(std::size_t horizon) {
  const std::size_t w = witness_ ? *witness_ : V_.front();
  Resolution r;
  r.k = 0;
  r.certificate.witness = w;
  r.labels.resize(horizon);
  for (std::size_t t = 1; t <= horizon; ++t) r.labels[t - 1] = H_->at(w, local(t));
  r.certificate.witness_predictions = r.labels;
  return r;
}

FuzzAdversary::FuzzAdversary(std::size_t n_experts, std::size_t T, FuzzKind kind, std::size_t k,
                             std::uint64_t seed)
    : n_(n_experts), kind_(kind), k_(kind == FuzzKind::realizable ? 0 : k), rng_(seed) {
  if (n_ < 1) throw ParameterError("fuzz adversary needs at least one expert");
  if (kind == FuzzKind::realizable && k != 0) throw ParameterError("realizable fuzzing takes k = 0");
  setup(T);
}

FuzzAdversary::FuzzAdversary(std::shared_ptr<const FiniteClass> H, std::size_t T, FuzzKind kind, std::size_t k,
                             std::uint64_t seed)
    : H_(std::move(H)), kind_(kind), k_(kind == FuzzKind::realizable ? 0 : k), rng_(seed) {
  if (!H_ || H_->empty()) throw ParameterError("fuzz adversary needs a non-empty class");
  if (kind == FuzzKind::realizable && k != 0) throw ParameterError("realizable fuzzing takes k = 0");
  n_ = H_->size();
  setup(T);
}

void FuzzAdversary::setup(std::size_t T) {
  static constexpr double kDensity[] = {0.05, 0.2, 0.5, 0.8};
  witness_ = rng_.below(n_);
  regime_ = static_cast<int>(rng_.below(3));
  q_ = kDensity[rng_.below(4)];
  q_witness_ = kDensity[rng_.below(4)];
  flip_.assign(T, 0);
  std::size_t flips = 0;
  if (k_ > 0) {
    const std::size_t cap = std::min(k_, T);
    flips = rng_.bernoulli(0.5) ? cap : rng_.below(cap + 1);
  }
  // Partial Fisher-Yates picks `flips` distinct rounds.
  std::vector<std::uint32_t> rounds(T);
  for (std::size_t t = 0; t < T; ++t) rounds[t] = static_cast<std::uint32_t>(t);
  for (std::size_t i = 0; i < flips; ++i) {
    const std::size_t j = i + rng_.below(T - i);
    std::swap(rounds[i], rounds[j]);
    flip_[rounds[i]] = 1;
  }
}

std::string FuzzAdversary::name() const {
  return kind_ == FuzzKind::realizable ? "fuzz_realizable" : "fuzz_agnostic";
}

Instance FuzzAdversary::next(std::size_t t) {
  if (t > flip_.size()) throw ProtocolError("fuzz adversary ran past its horizon");
  bool w = false;
  Instance out;
  if (H_) {
    const auto x = static_cast<std::uint32_t>(rng_.below(H_->domain_size()));
    w = H_->at(witness_, x);
    out = Point{x};
  } else {
    Advice a;
    a.votes.resize(n_);
    w = rng_.bernoulli(q_witness_);
    for (std::size_t j = 0; j < n_; ++j) {
      if (j == witness_) {
        a.votes[j] = w;
      } else if (regime_ == 1) {
        a.votes[j] = rng_.bernoulli(0.1) ? !w : w;  // noisy clone
      } else if (regime_ == 2) {
        a.votes[j] = rng_.bernoulli(q_ / 8);  // sparse
      } else {
        a.votes[j] = rng_.bernoulli(q_);
      }
    }
    out = std::move(a);
  }
  witness_votes_.push_back(w);
  labels_.push_back(flip_[t - 1] ? !w : w);
  return out;
}

std::optional<bool> FuzzAdversary::answer(std::size_t t, bool) { return labels_.at(t - 1) != 0; }

Resolution FuzzAdversary::finalize(std::size_t horizon) {
  Resolution r;
  r.labels.assign(labels_.begin(), labels_.begin() + static_cast<std::ptrdiff_t>(horizon));
  r.k = k_;
  r.certificate.witness = witness_;
  r.certificate.witness_predictions.assign(witness_votes_.begin(),
                                           witness_votes_.begin() + static_cast<std::ptrdiff_t>(horizon));
  return r;
}

double default_random_class_p(std::size_t d, std::size_t T, double c) {
  const double p = c * std::sqrt(static_cast<double>(d) * std::log2(static_cast<double>(T)) / static_cast<double>(T));
  return std::min(0.5, p);
}

std::vector<std::string> SampledClass::header() const {
  char buf[96];
  std::snprintf(buf, sizeof buf, "seed=%llu p=%.17g", static_cast<unsigned long long>(seed), p);
  return {buf};
}

SampledClass sample_random_class(const RandomClassSpec& spec) {
  if (spec.T < 2) throw ParameterError("random class needs T >= 2");
  if (spec.d < 1) throw ParameterError("random class needs d >= 1");
  const double p = spec.p ? *spec.p : default_random_class_p(spec.d, spec.T, spec.c);
  if (!(p > 0) || p > 1) throw ParameterError("p must lie in (0, 1]");
  const double n_real = std::pow(static_cast<double>(spec.T), static_cast<double>(spec.d));
  if (n_real > static_cast<double>(spec.max_hypotheses))
    throw BudgetExceeded("random class of T^d = " + std::to_string(static_cast<unsigned long long>(n_real)) +
                         " hypotheses exceeds the budget");
  std::size_t n = 1;
  for (std::size_t i = 0; i < spec.d; ++i) n *= spec.T;

  const std::size_t words = (spec.T + 63) / 64;
  std::vector<std::uint64_t> data(n * words, 0);
  Rng rng(spec.seed);
  for (std::size_t h = 0; h < n; ++h)
    for (std::size_t x = 0; x < spec.T; ++x)
      if (rng.bernoulli(p)) data[h * words + x / 64] |= std::uint64_t{1} << (x % 64);

  SampledClass out;
  out.H = FiniteClass::from_packed(spec.T, n, std::move(data), true);
  out.p = p;
  out.requested = n;
  out.seed = spec.seed;
  return out;
}

std::string to_string(ItemStatus s) {
  switch (s) {
    case ItemStatus::pass: return "pass";
    case ItemStatus::fail: return "fail";
    case ItemStatus::skipped: return "skipped";
  }
  return "?";
}

bool RandomClassReport::all_pass() const {
  return item1 != ItemStatus::fail && item2 != ItemStatus::fail && item3 != ItemStatus::fail;
}

RandomClassCheck default_random_class_check(std::size_t d, std::size_t T, double c) {
  RandomClassCheck chk;
  chk.d = d;
  chk.T = T;
  const double lt = std::log2(static_cast<double>(T));
  chk.ones_threshold = c / 100.0 * std::sqrt(static_cast<double>(d) * static_cast<double>(T) * lt);
  chk.decay = std::min(1.0, 1000.0 * c / 100.0 * std::sqrt(static_cast<double>(d) * lt / static_cast<double>(T)));
  return chk;
}

RandomClassReport verify_random_class(const FiniteClass& H, const RandomClassCheck& check) {
  RandomClassReport rep;
  const std::size_t m = H.domain_size();
  const std::size_t words = H.words_per_row();

  rep.min_ones = m;
  for (std::size_t h = 0; h < H.size(); ++h) rep.min_ones = std::min(rep.min_ones, H.ones(h));
  rep.item1 = static_cast<double>(rep.min_ones) >= check.ones_threshold ? ItemStatus::pass : ItemStatus::fail;

  // Item 2, audited along random chains X_1 ⊂ X_2 ⊂ ... of instances labeled 0.
  const double size_floor = std::pow(static_cast<double>(check.T), static_cast<double>(check.d) / 2.0);
  Rng rng(check.seed);
  bool item2_ok = true;
  std::vector<std::size_t> ones_in_col(m);
  for (std::size_t c = 0; c < check.chains; ++c) {
    std::vector<std::uint32_t> order(m);
    for (std::size_t x = 0; x < m; ++x) order[x] = static_cast<std::uint32_t>(x);
    for (std::size_t i = m; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    std::vector<std::uint32_t> S(H.size());
    for (std::size_t h = 0; h < S.size(); ++h) S[h] = static_cast<std::uint32_t>(h);
    for (std::size_t step = 0; step <= m; ++step) {
      if (static_cast<double>(S.size()) < size_floor || S.empty()) break;
      std::fill(ones_in_col.begin(), ones_in_col.end(), 0);
      for (std::uint32_t h : S) {
        const std::uint64_t* row = H.row_words(h);
        for (std::size_t w = 0; w < words; ++w)
          for (std::uint64_t bits = row[w]; bits; bits &= bits - 1)
            ++ones_in_col[w * 64 + static_cast<std::size_t>(__builtin_ctzll(bits))];
      }
      for (std::size_t x = 0; x < m; ++x) {
        const double ratio = static_cast<double>(S.size() - ones_in_col[x]) / static_cast<double>(S.size());
        rep.worst_ratio = std::min(rep.worst_ratio, ratio);
        if (ratio < 1.0 - check.decay) item2_ok = false;
      }
      ++rep.restrictions_audited;
      if (step == m) break;
      const std::uint32_t x = order[step];
      std::erase_if(S, [&](std::uint32_t h) { return H.at(h, x); });
    }
  }
  rep.item2 = rep.restrictions_audited == 0 ? ItemStatus::skipped
                                            : (item2_ok ? ItemStatus::pass : ItemStatus::fail);

  const double limit = 10.0 * static_cast<double>(check.d);
  const auto log_bound = static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(H.size()))));
  if (static_cast<double>(log_bound) < limit) {
    rep.item3 = ItemStatus::pass;
    rep.item3_note = "L(H) <= floor(log2 |H|) = " + std::to_string(log_bound);
  } else if (H.size() <= std::min(check.ldim_cap, kMaxSearchHypotheses)) {
    const std::size_t L = littlestone_dim(H);
    rep.item3 = static_cast<double>(L) < limit ? ItemStatus::pass : ItemStatus::fail;
    rep.item3_note = "L(H) = " + std::to_string(L) + " by exhaustive search";
  } else {
    rep.item3 = ItemStatus::skipped;
    rep.item3_note = "class too large for exact Littlestone search";
  }
  return rep;
}

}  // namespace appletaste
