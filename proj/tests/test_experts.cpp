#include <gtest/gtest.h>

#include <cmath>

#include "appletaste/adversaries.hpp"
#include "appletaste/errors.hpp"
#include "appletaste/experts.hpp"
#include "oracles.hpp"

using namespace appletaste;

namespace {

ExpertLearnerState with_distances(ExpertLearnerState s, std::vector<std::uint64_t> d) {
  s.distance = std::move(d);
  return s;
}

// Plays one game step by step so that the learner state can be inspected
// after every round.
template <class Check>
void step_game(ExpertLearner& learner, Adversary& adv, std::size_t T, Check check) {
  for (std::size_t t = 1; t <= T; ++t) {
    const ExpertLearnerState before = learner.state();
    Instance x = adv.next(t);
    const bool yhat = learner.predict(x);
    auto y = adv.answer(t, yhat);
    learner.observe(x, yhat, yhat ? y : std::nullopt);
    check(before, learner.state(), std::get<Advice>(x).votes, yhat);
  }
}

}  // namespace

TEST(ExpertParams, RealizableFormulas) {
  const auto s = realizable_expat_state(4, 16);
  EXPECT_NEAR(s.eta, 0.35355339, 1e-8);
  EXPECT_DOUBLE_EQ(s.L.value(), 4.0);
  EXPECT_EQ(s.k, 0u);
  const auto s2 = realizable_expat_state(2, 2);
  EXPECT_NEAR(s2.eta, std::sqrt(0.5), 1e-12);
  EXPECT_DOUBLE_EQ(s2.L.value(), 2.0);
  EXPECT_THROW(realizable_expat_state(1, 16), ParameterError);
  EXPECT_THROW(realizable_expat_state(4, 1), ParameterError);
}

TEST(ExpertParams, AgnosticFormulas) {
  const auto s = expat_state(4, 16, 0);
  EXPECT_NEAR(s.eta, std::sqrt(2.0 / 16), 1e-12);
  EXPECT_DOUBLE_EQ(s.L.value(), 8.0);
  const auto s2 = expat_state(4, 16, 2);
  EXPECT_DOUBLE_EQ(s2.eta, 0.5);
  EXPECT_DOUBLE_EQ(s2.L.value(), 32.0);
  EXPECT_EQ(s2.budget, (std::vector<std::uint32_t>(4, 2)));
  EXPECT_THROW(expat_state(1, 16, 0), ParameterError);
}

TEST(ExpertParams, HugeBudgetThresholdStaysFinite) {
  const auto s = expat_state(8, 64, 4000);
  EXPECT_NEAR(s.L.log2(), 3.0 + 4001.0, 1e-9);
  Bits all(8, 1);
  EXPECT_FALSE(expat_predict(s, all));  // 8 * 2^4000 < 8 * 2^4001
}

TEST(ExpatPredict, Examples) {
  auto s = realizable_expat_state(4, 16);
  EXPECT_FALSE(expat_predict(s, Bits(4, 0)));
  EXPECT_TRUE(expat_predict(s, Bits(4, 1)));
  auto d7 = with_distances(s, {7, 0, 0, 0});
  EXPECT_TRUE(expat_predict(d7, Bits{1, 0, 0, 0}));  // 2^2.4749 = 5.56 >= 4
  auto d5 = with_distances(s, {5, 0, 0, 0});
  EXPECT_FALSE(expat_predict(d5, Bits{1, 0, 0, 0}));  // 2^1.77 = 3.41 < 4
  EXPECT_THROW(expat_predict(s, Bits(3, 1)), ParameterError);
}

TEST(ExpatPredict, TieMeansOne) {
  auto s = make_expert_state(3, 0.5, Threshold{2.0, 0}, 0, ExpertMode::realizable, 10);
  EXPECT_TRUE(expat_predict(s, Bits{1, 1, 0}));
  EXPECT_FALSE(expat_predict(s, Bits{1, 0, 0}));
}

TEST(ExpatUpdate, Examples) {
  auto s = expat_state(3, 16, 2);
  s.distance = {3, 0, 0};
  expat_update(s, Bits{1, 0, 0}, false, std::nullopt);
  EXPECT_EQ(s.distance[0], 4u);
  EXPECT_EQ(s.budget[0], 2u);

  auto r = realizable_expat_state(3, 16);
  expat_update(r, Bits{1, 0, 0}, true, false);
  EXPECT_FALSE(r.live[0]);
  EXPECT_EQ(r.live_count, 2u);

  auto a = expat_state(3, 16, 2);
  a.distance = {5, 0, 0};
  expat_update(a, Bits{1, 0, 0}, true, false);
  EXPECT_TRUE(a.live[0]);
  EXPECT_EQ(a.budget[0], 1u);
  EXPECT_EQ(a.distance[0], 5u);

  auto b = expat_state(3, 16, 2);
  expat_update(b, Bits{1, 1, 0}, true, true);
  EXPECT_EQ(b.budget, (std::vector<std::uint32_t>{2, 2, 2}));
  EXPECT_EQ(b.live_count, 3u);

  EXPECT_THROW(expat_update(b, Bits{1, 1, 0}, false, true), ProtocolError);
  EXPECT_THROW(expat_update(b, Bits{1, 1, 0}, true, std::nullopt), ProtocolError);
}

TEST(ExpatPredict, AgreesWithExactArithmetic) {
  using boost::multiprecision::cpp_int;
  Rng rng(2024);
  for (int trial = 0; trial < 4000; ++trial) {
    const std::size_t n = 1 + rng.below(6);
    const std::size_t kmax = rng.below(5);
    const std::uint64_t Lint = 1 + rng.below(400);
    auto s = make_expert_state(n, 0.5, Threshold{static_cast<double>(Lint), 0}, kmax, ExpertMode::agnostic, 64);
    std::vector<bool> voting(n);
    Bits votes(n);
    for (std::size_t j = 0; j < n; ++j) {
      s.budget[j] = static_cast<std::uint32_t>(rng.below(kmax + 1));
      s.distance[j] = rng.below(14);
      voting[j] = rng.bernoulli(0.6);
      votes[j] = voting[j];
    }
    const bool exact = oracle::exact_threshold_half(s.budget, s.distance, voting, cpp_int(Lint));
    ASSERT_EQ(expat_predict(s, votes), exact) << "trial " << trial;
  }
}

TEST(ExpatRelationship, ZeroBudgetAgnosticIsRealizableRuleAtDoubleThreshold) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const std::size_t n = 6, T = 48;
    auto agnostic = make_expat(n, T, 0);
    const auto p = agnostic->state();
    ExpertLearner doubled(make_expert_state(n, p.eta, Threshold{2.0 * n, 0}, 0, ExpertMode::realizable, T), "r2");
    FuzzAdversary a1(n, T, FuzzKind::realizable, 0, seed), a2(n, T, FuzzKind::realizable, 0, seed);
    Transcript t1 = run_game(*agnostic, a1, T), t2 = run_game(doubled, a2, T);
    for (std::size_t i = 0; i < T; ++i) ASSERT_EQ(t1.rounds[i].prediction, t2.rounds[i].prediction);
  }
  // Round one with unanimous 1-votes separates the two thresholds.
  EXPECT_TRUE(expat_predict(realizable_expat_state(4, 16), Bits(4, 1)));
  EXPECT_FALSE(expat_predict(expat_state(4, 16, 0), Bits(4, 1)));
}

TEST(ExpertInvariants, MonotoneStateAndWitnessSafety) {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    const std::size_t n = 2 + seed % 9, T = 20 + seed % 37, k = seed % 4;
    const bool realizable = seed % 3 == 0;
    ExpertLearner learner = realizable ? ExpertLearner(realizable_expat_state(n, T), "r")
                                       : ExpertLearner(expat_state(n, T, k), "a");
    FuzzAdversary adv(n, T, realizable ? FuzzKind::realizable : FuzzKind::agnostic, realizable ? 0 : k, seed);
    step_game(learner, adv, T, [&](const ExpertLearnerState& b, const ExpertLearnerState& a, const Bits& v, bool yhat) {
      for (std::size_t j = 0; j < n; ++j) {
        ASSERT_LE(a.live[j], b.live[j]);
        if (!a.live[j]) continue;
        ASSERT_GE(a.distance[j], b.distance[j]);
        ASSERT_LE(a.budget[j], b.budget[j]);
        if (yhat) ASSERT_EQ(a.distance[j], b.distance[j]);
        if (a.distance[j] > b.distance[j]) ASSERT_TRUE(v[j]);
        if (realizable) ASSERT_EQ(a.budget[j], 0u);
      }
    });
    Resolution res = adv.finalize(T);
    EXPECT_TRUE(learner.state().live[res.certificate.witness]) << "seed " << seed;
  }
}

TEST(ExpertBoundsOnFuzz, RealizableAndAgnostic) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const std::size_t n = 2 + seed % 15, T = 8 + (seed * 7) % 120;
    {
      auto learner = make_realizable_expat(n, T);
      FuzzAdversary adv(n, T, FuzzKind::realizable, 0, seed);
      Transcript tr = run_game(*learner, adv, T);
      const auto m = score(tr);
      const auto b = expat_bounds(learner->state());
      EXPECT_LE(m.false_negatives, b.false_negatives);
      EXPECT_LE(m.false_positives, b.false_positives);
      const auto led = diagnostics(tr, realizable_expat_state(n, T));
      EXPECT_LE(led.twdg, learner->state().L.value() * T * (1 + 1e-12));
      EXPECT_LE(led.realizable_helper_sum, 3 * learner->state().eta * T * learner->state().L.value() * (1 + 1e-12));
    }
    {
      const std::size_t k = seed % 5;
      auto learner = make_expat(n, T, k);
      FuzzAdversary adv(n, T, FuzzKind::agnostic, k, seed);
      Transcript tr = run_game(*learner, adv, T);
      const auto m = score(tr);
      const auto b = expat_bounds(learner->state());
      EXPECT_LE(m.false_negatives, b.false_negatives);
      EXPECT_LE(m.false_positives, b.false_positives);
      const auto led = diagnostics(tr, expat_state(n, T, k));
      const auto& s = learner->state();
      EXPECT_LE(led.agnostic_helper_sum, 200 * s.eta * s.L.value() * T * (1 + 1e-12));
    }
  }
}

TEST(ExpertBounds, ClosedForms) {
  const auto s = realizable_expat_state(16, 64);
  const auto b = expat_bounds(s);
  EXPECT_NEAR(b.false_negatives, 4.0 / s.eta + 1, 1e-9);
  EXPECT_NEAR(b.false_positives, 6 * s.eta * 64, 1e-9);
  const auto a = expat_state(16, 64, 3);
  const auto ab = expat_bounds(a);
  EXPECT_NEAR(ab.false_negatives, (4.0 + 4.0) / a.eta + 3 + 1, 1e-9);
  EXPECT_NEAR(ab.false_positives, 200 * a.eta * 64, 1e-9);
}

TEST(Diagnostics, ZeroCases) {
  const std::size_t n = 3, T = 6;
  {
    std::vector<Instance> xs(T, Advice{Bits(n, 1)});
    SequenceAdversary adv(xs, Bits(T, 1), 0, Certificate{0, Bits(T, 1)});
    auto learner = make_realizable_expat(n, T);
    Transcript tr = run_game(*learner, adv, T);
    for (const auto& r : tr.rounds) ASSERT_TRUE(r.prediction);
    EXPECT_EQ(diagnostics(tr, realizable_expat_state(n, T)).twdg, 0.0);
  }
  {
    std::vector<Instance> xs(T, Advice{Bits(n, 0)});
    SequenceAdversary adv(xs, Bits(T, 0), 0, Certificate{0, Bits(T, 0)});
    auto learner = make_realizable_expat(n, T);
    Transcript tr = run_game(*learner, adv, T);
    EXPECT_EQ(diagnostics(tr, realizable_expat_state(n, T)).twdg, 0.0);
  }
}

TEST(Diagnostics, HandComputedTwdg) {
  // n=2, T=4: expert 0 votes 1 twice while the learner says 0.
  const std::size_t n = 2, T = 4;
  std::vector<Instance> xs{Advice{Bits{1, 0}}, Advice{Bits{1, 0}}, Advice{Bits{0, 0}}, Advice{Bits{0, 0}}};
  SequenceAdversary adv(xs, Bits{1, 1, 0, 0}, 0, Certificate{0, Bits{1, 1, 0, 0}});
  auto learner = make_realizable_expat(n, T);
  Transcript tr = run_game(*learner, adv, T);
  const double eta = std::sqrt(1.0 / 4);
  // Round 1: weight 1 < 2, predict 0. Round 2: 2^eta = 1.41 < 2, predict 0.
  ASSERT_FALSE(tr.rounds[0].prediction);
  ASSERT_FALSE(tr.rounds[1].prediction);
  const auto led = diagnostics(tr, realizable_expat_state(n, T));
  EXPECT_NEAR(led.twdg, 1.0 + std::exp2(eta), 1e-12);
}

TEST(Diagnostics, RejectsMismatchedParameters) {
  auto learner = make_realizable_expat(5, 30);
  FuzzAdversary adv(5, 30, FuzzKind::realizable, 0, 4);
  Transcript tr = run_game(*learner, adv, 30);
  EXPECT_THROW(diagnostics(tr, realizable_expat_state(6, 30)), std::exception);
  // A different threshold makes the replay disagree with the recorded predictions.
  bool threw = false;
  for (std::uint64_t seed = 1; seed <= 30 && !threw; ++seed) {
    auto l2 = make_realizable_expat(5, 30);
    FuzzAdversary a2(5, 30, FuzzKind::realizable, 0, seed);
    Transcript t2 = run_game(*l2, a2, 30);
    try {
      diagnostics(t2, make_expert_state(5, 0.9, Threshold{1.0, 0}, 0, ExpertMode::realizable, 30));
    } catch (const ProtocolError&) {
      threw = true;
    }
  }
  EXPECT_TRUE(threw);
}

TEST(DTExpAT, InitialGuesses) {
  auto dt = make_dt_expat(16);
  EXPECT_EQ(dt->state().g_k, 1u);
  EXPECT_EQ(dt->state().g_T, 1u);
  EXPECT_EQ(dt_k_guess(1, 16), 4u);
  EXPECT_EQ(dt_T_guess(1, 16), 4u);
  EXPECT_EQ(dt->state().inner.k, 4u);
  EXPECT_EQ(dt->state().inner.horizon, 4u);
  EXPECT_THROW(make_dt_expat(1), ParameterError);
}

TEST(DTExpAT, EpochRestartDoublesTGuess) {
  auto dt = make_dt_expat(16);
  const Instance zeros = Advice{Bits(16, 0)};
  for (int t = 1; t <= 4; ++t) {
    ASSERT_FALSE(dt->predict(zeros));
    dt->observe(zeros, false, std::nullopt);
  }
  EXPECT_EQ(dt->state().g_T, 1u);
  dt->predict(zeros);  // round T-guess + 1
  EXPECT_EQ(dt->state().g_T, 2u);
  EXPECT_EQ(dt->state().g_k, 1u);
  EXPECT_EQ(dt->state().restarts, 1u);
  EXPECT_EQ(dt->state().inner.horizon, 8u);
  EXPECT_EQ(dt->state().inner.live_count, 16u);
}

TEST(DTExpAT, GuessesOnlyDoubleAndRestartsAreFresh) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const std::size_t n = 2 + seed % 10, T = 100 + seed;
    auto dt = make_dt_expat(n);
    FuzzAdversary adv(n, T, FuzzKind::agnostic, seed % 6, seed);
    std::size_t gk = 1, gT = 1, restarts = 0;
    for (std::size_t t = 1; t <= T; ++t) {
      Instance x = adv.next(t);
      const bool yhat = dt->predict(x);
      const auto& st = dt->state();
      ASSERT_GE(st.g_k, gk);
      ASSERT_GE(st.g_T, gT);
      ASSERT_TRUE(st.g_k == gk || st.g_k == 2 * gk);
      ASSERT_TRUE(st.g_T == gT || st.g_T == 2 * gT);
      if (st.restarts != restarts) {
        ASSERT_EQ(st.restarts, restarts + 1);
        ASSERT_EQ(st.epoch_rounds, 0u);
        ASSERT_EQ(st.inner.live_count, n);
        for (auto c : st.false_positives) ASSERT_EQ(c, 0u);
        for (auto d : st.inner.distance) ASSERT_EQ(d, 0u);
      }
      gk = st.g_k;
      gT = st.g_T;
      restarts = st.restarts;
      auto y = adv.answer(t, yhat);
      dt->observe(x, yhat, yhat ? y : std::nullopt);
    }
  }
}

TEST(Greedy, PredictsOneWhileAnyLiveExpertDoes) {
  GreedyExpertLearner g(3, 0);
  EXPECT_FALSE(g.predict(Advice{Bits{0, 0, 0}}));
  EXPECT_TRUE(g.predict(Advice{Bits{0, 1, 0}}));
  g.observe(Advice{Bits{0, 1, 0}}, true, false);  // expert 1 is out
  EXPECT_FALSE(g.predict(Advice{Bits{0, 1, 0}}));
  EXPECT_TRUE(g.predict(Advice{Bits{1, 1, 0}}));
}
