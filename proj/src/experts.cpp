#include "appletaste/experts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "appletaste/errors.hpp"

namespace appletaste {

double Threshold::log2() const { return std::log2(base) + static_cast<double>(shift); }

double Threshold::value() const {
  if (shift > std::numeric_limits<double>::max_exponent) return std::numeric_limits<double>::infinity();
  return std::ldexp(base, static_cast<int>(shift));
}

ExpertLearnerState make_expert_state(std::size_t n, double eta, Threshold L, std::size_t k,
                                     ExpertMode mode, std::size_t horizon) {
  if (n < 1) throw ParameterError("expert learner needs at least one expert");
  if (!(eta > 0) || !std::isfinite(eta)) throw ParameterError("eta must be a positive real");
  if (!(L.base > 0) || !std::isfinite(L.base)) throw ParameterError("threshold L must be positive");
  if (mode == ExpertMode::realizable && k != 0)
    throw ParameterError("realizable mode carries no false-positive budget");
  if (k > std::numeric_limits<std::uint32_t>::max()) throw ParameterError("budget k too large");
  ExpertLearnerState s;
  s.n = n;
  s.mode = mode;
  s.eta = eta;
  s.L = L;
  s.k = k;
  s.horizon = horizon;
  s.live.assign(n, 1);
  s.live_count = n;
  s.distance.assign(n, 0);
  s.budget.assign(n, static_cast<std::uint32_t>(k));
  return s;
}

namespace {

void check_n_T(std::size_t n, std::size_t T) {
  if (n < 2) throw ParameterError("need n >= 2 experts, got " + std::to_string(n));
  if (T < 2) throw ParameterError("need horizon T >= 2, got " + std::to_string(T));
}

}  // namespace

ExpertLearnerState realizable_expat_state(std::size_t n, std::size_t T) {
  check_n_T(n, T);
  const double eta = std::sqrt(std::log2(static_cast<double>(n)) / static_cast<double>(T));
  return make_expert_state(n, eta, Threshold{static_cast<double>(n), 0}, 0, ExpertMode::realizable, T);
}

ExpertLearnerState expat_state(std::size_t n, std::size_t T, std::size_t k) {
  check_n_T(n, T);
  const double eta =
      std::sqrt((static_cast<double>(k) + std::log2(static_cast<double>(n))) / static_cast<double>(T));
  return make_expert_state(n, eta, Threshold{static_cast<double>(n), static_cast<long>(k) + 1}, k,
                           ExpertMode::agnostic, T);
}

bool expat_predict(const ExpertLearnerState& s, const Bits& preds) {
  if (preds.size() != s.n)
    throw ParameterError("expected " + std::to_string(s.n) + " expert predictions, got " +
                         std::to_string(preds.size()));
  // Exponents k_j + eta d_j of live experts voting 1, summed after shifting by
  // the maximum so that large budgets cannot overflow.
  double top = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t j = 0; j < s.n; ++j) {
    if (!s.live[j] || !preds[j]) continue;
    const double e = static_cast<double>(s.budget[j]) + s.eta * static_cast<double>(s.distance[j]);
    top = std::max(top, e);
    any = true;
  }
  if (!any) return false;
  double sum = 0;
  for (std::size_t j = 0; j < s.n; ++j) {
    if (!s.live[j] || !preds[j]) continue;
    const double e = static_cast<double>(s.budget[j]) + s.eta * static_cast<double>(s.distance[j]);
    sum += std::exp2(e - top);
  }
  const double rhs = s.L.base * std::exp2(static_cast<double>(s.L.shift) - top);
  return sum >= rhs;
}

void expat_update(ExpertLearnerState& s, const Bits& preds, bool yhat, std::optional<bool> y) {
  if (preds.size() != s.n) throw ParameterError("prediction vector has the wrong length");
  if (yhat && !y) throw ProtocolError("label missing on a round predicted 1");
  if (!yhat && y) throw ProtocolError("label supplied on a round predicted 0");
  if (!yhat) {
    for (std::size_t j = 0; j < s.n; ++j)
      if (s.live[j] && preds[j]) ++s.distance[j];
    return;
  }
  if (*y) return;
  for (std::size_t j = 0; j < s.n; ++j) {
    if (!s.live[j] || !preds[j]) continue;
    if (s.budget[j] == 0) {
      s.live[j] = 0;
      --s.live_count;
    } else {
      --s.budget[j];
    }
  }
}

ExpertBounds expat_bounds(const ExpertLearnerState& s) {
  ExpertBounds b;
  const double T = static_cast<double>(s.horizon);
  b.false_negatives = s.L.log2() / s.eta + static_cast<double>(s.k) + 1.0;
  b.false_positives = (s.mode == ExpertMode::realizable ? 6.0 : 200.0) * s.eta * T;
  return b;
}

ExpertLearner::ExpertLearner(ExpertLearnerState state, std::string name)
    : state_(std::move(state)), name_(std::move(name)) {}

bool ExpertLearner::accepts(const Instance& x) const {
  const auto* a = std::get_if<Advice>(&x);
  return a && a->votes.size() == state_.n;
}

bool ExpertLearner::predict(const Instance& x) { return expat_predict(state_, std::get<Advice>(x).votes); }

void ExpertLearner::observe(const Instance& x, bool prediction, std::optional<bool> label) {
  expat_update(state_, std::get<Advice>(x).votes, prediction, label);
}

std::unique_ptr<Learner> ExpertLearner::clone() const { return std::make_unique<ExpertLearner>(*this); }

std::unique_ptr<ExpertLearner> make_realizable_expat(std::size_t n, std::size_t T) {
  return std::make_unique<ExpertLearner>(realizable_expat_state(n, T), "realizable_expat");
}

std::unique_ptr<ExpertLearner> make_expat(std::size_t n, std::size_t T, std::size_t k) {
  return std::make_unique<ExpertLearner>(expat_state(n, T, k), "expat");
}

GreedyExpertLearner::GreedyExpertLearner(std::size_t n, std::size_t k)
    : n_(n), budget_(n, static_cast<std::int64_t>(k)) {
  if (n < 1) throw ParameterError("greedy learner needs at least one expert");
}

bool GreedyExpertLearner::accepts(const Instance& x) const {
  const auto* a = std::get_if<Advice>(&x);
  return a && a->votes.size() == n_;
}

bool GreedyExpertLearner::predict(const Instance& x) {
  const auto& v = std::get<Advice>(x).votes;
  for (std::size_t j = 0; j < n_; ++j)
    if (budget_[j] >= 0 && v[j]) return true;
  return false;
}

void GreedyExpertLearner::observe(const Instance& x, bool prediction, std::optional<bool> label) {
  if (!prediction) return;
  const auto& v = std::get<Advice>(x).votes;
  for (std::size_t j = 0; j < n_; ++j)
    if (budget_[j] >= 0 && (v[j] != 0) != *label) --budget_[j];
}

std::unique_ptr<Learner> GreedyExpertLearner::clone() const {
  return std::make_unique<GreedyExpertLearner>(*this);
}

std::size_t dt_k_guess(std::size_t g_k, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(static_cast<double>(g_k) * std::log2(static_cast<double>(n))));
}

std::size_t dt_T_guess(std::size_t g_T, std::size_t n) {
  const auto t =
      static_cast<std::size_t>(std::ceil(static_cast<double>(g_T) * std::log2(static_cast<double>(n))));
  return std::max<std::size_t>(2, t);
}

DTExpAT::DTExpAT(std::size_t n) : n_(n) {
  if (n < 2) throw ParameterError("DTExpAT needs n >= 2 experts");
  state_.inner = expat_state(n, dt_T_guess(1, n), dt_k_guess(1, n));
  state_.false_positives.assign(n, 0);
}

bool DTExpAT::accepts(const Instance& x) const {
  const auto* a = std::get_if<Advice>(&x);
  return a && a->votes.size() == n_;
}

void DTExpAT::maybe_restart() {
  const std::size_t kg = dt_k_guess(state_.g_k, n_);
  const std::size_t Tg = dt_T_guess(state_.g_T, n_);
  const bool epoch_over = state_.epoch_rounds >= Tg;
  const bool budgets_over = std::all_of(state_.false_positives.begin(), state_.false_positives.end(),
                                        [kg](std::uint32_t c) { return c > kg; });
  if (!epoch_over && !budgets_over) return;
  if (epoch_over) state_.g_T *= 2;
  if (budgets_over) state_.g_k *= 2;
  state_.T0 += state_.epoch_rounds;
  state_.epoch_rounds = 0;
  ++state_.restarts;
  std::fill(state_.false_positives.begin(), state_.false_positives.end(), 0);
  state_.inner = expat_state(n_, dt_T_guess(state_.g_T, n_), dt_k_guess(state_.g_k, n_));
}

bool DTExpAT::predict(const Instance& x) {
  maybe_restart();
  return expat_predict(state_.inner, std::get<Advice>(x).votes);
}

void DTExpAT::observe(const Instance& x, bool prediction, std::optional<bool> label) {
  const auto& v = std::get<Advice>(x).votes;
  expat_update(state_.inner, v, prediction, label);
  if (prediction && !*label)
    for (std::size_t j = 0; j < n_; ++j)
      if (v[j]) ++state_.false_positives[j];
  ++state_.epoch_rounds;
}

std::unique_ptr<Learner> DTExpAT::clone() const { return std::make_unique<DTExpAT>(*this); }

std::unique_ptr<DTExpAT> make_dt_expat(std::size_t n) { return std::make_unique<DTExpAT>(n); }

DiagnosticsLedger diagnostics(const Transcript& tr, const ExpertLearnerState& params) {
  if (!tr.instances_recorded) throw ProtocolError("diagnostics: transcript has no recorded advice");
  ExpertLearnerState s = make_expert_state(params.n, params.eta, params.L, params.k, params.mode,
                                           params.horizon);
  const std::size_t k = s.k;
  // fp_distance[l][j]: distance of expert j at its (l+1)-th false positive
  std::vector<std::vector<std::int64_t>> fp_distance(k + 1, std::vector<std::int64_t>(s.n, -1));
  DiagnosticsLedger led;

  for (const auto& r : tr.rounds) {
    const auto* a = std::get_if<Advice>(&r.instance);
    if (!a) throw ProtocolError("diagnostics: round " + std::to_string(r.t) + " carries no advice");
    if (!r.label) throw ProtocolError("diagnostics: transcript not finalized");
    const auto& v = a->votes;
    const bool yhat = expat_predict(s, v);
    if (yhat != r.prediction)
      throw ProtocolError("diagnostics: parameters do not reproduce the prediction at round " +
                          std::to_string(r.t));
    if (!yhat) {
      for (std::size_t j = 0; j < s.n; ++j) {
        if (!s.live[j] || !v[j]) continue;
        const double ed = s.eta * static_cast<double>(s.distance[j]);
        led.twdg += std::exp2(ed);
        led.tw2dg += std::exp2(static_cast<double>(s.budget[j]) + ed);
      }
    } else if (!*r.label) {
      for (std::size_t j = 0; j < s.n; ++j) {
        if (!s.live[j] || !v[j]) continue;
        const std::size_t l = k - s.budget[j];
        fp_distance[l][j] = static_cast<std::int64_t>(s.distance[j]);
      }
    }
    expat_update(s, v, yhat, yhat ? r.label : std::nullopt);
  }

  auto bucket = [&](std::uint64_t dist) {
    return static_cast<std::size_t>(std::floor(s.eta * static_cast<double>(dist)));
  };
  auto bump = [](std::vector<std::size_t>& counts, std::size_t d) {
    if (counts.size() <= d) counts.resize(d + 1, 0);
    ++counts[d];
  };

  for (std::size_t j = 0; j < s.n; ++j) bump(led.n_d, bucket(s.distance[j]));
  for (std::size_t d = 0; d < led.n_d.size(); ++d)
    led.realizable_helper_sum += std::ldexp(static_cast<double>(led.n_d[d]), static_cast<int>(d));

  // Experts that never reach their (l+1)-th false positive are treated as if
  // the remaining false positives happened at their final distance.
  led.n_dl.assign(k + 1, {});
  for (std::size_t l = 0; l <= k; ++l) {
    for (std::size_t j = 0; j < s.n; ++j) {
      const std::uint64_t dist =
          fp_distance[l][j] >= 0 ? static_cast<std::uint64_t>(fp_distance[l][j]) : s.distance[j];
      bump(led.n_dl[l], bucket(dist));
    }
    for (std::size_t d = 0; d < led.n_dl[l].size(); ++d)
      led.agnostic_helper_sum += std::ldexp(static_cast<double>(led.n_dl[l][d]),
                                            static_cast<int>(k - l + d));
  }
  return led;
}

}  // namespace appletaste
