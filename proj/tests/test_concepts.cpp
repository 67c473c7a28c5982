#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "appletaste/adversaries.hpp"
#include "appletaste/concepts.hpp"
#include "appletaste/errors.hpp"
#include "oracles.hpp"

using namespace appletaste;

namespace {

std::shared_ptr<const FiniteClass> share(FiniteClass H) { return std::make_shared<const FiniteClass>(std::move(H)); }

std::shared_ptr<const FiniteClass> random_class(Rng& rng, std::size_t m, std::size_t n) {
  std::vector<Bits> rows;
  for (std::size_t i = 0; i < n; ++i) {
    Bits r(m);
    for (auto& b : r) b = rng.bernoulli(0.5);
    rows.push_back(r);
  }
  return share(FiniteClass::dedup(m, rows));
}

Instance pt(std::size_t x) { return Point{static_cast<std::uint32_t>(x)}; }

// Plays a fixed labeled sequence and returns the transcript.
Transcript play(Learner& learner, const std::vector<std::pair<std::size_t, bool>>& seq, std::size_t k,
                std::size_t witness, const FiniteClass& H) {
  std::vector<Instance> xs;
  Bits ys, wp;
  for (auto [x, y] : seq) {
    xs.push_back(pt(x));
    ys.push_back(y);
    wp.push_back(H.at(witness, x));
  }
  SequenceAdversary adv(xs, ys, k, Certificate{witness, wp});
  return run_game(learner, adv, seq.size());
}

}  // namespace

TEST(NarrowConceptAT, Examples) {
  auto H = share(FiniteClass::from_strings({"10", "00"}));
  auto learner = make_narrow_concept_at(H, 1);
  EXPECT_TRUE(learner->predict(pt(0)));
  EXPECT_FALSE(learner->predict(pt(1)));
  learner->observe(pt(1), false, std::nullopt);
  EXPECT_EQ(learner->version_space().budget, (std::vector<int>{1, 1}));
  learner->observe(pt(0), true, false);
  EXPECT_EQ(learner->version_space().budget, (std::vector<int>{0, 1}));
  learner->observe(pt(0), true, false);
  EXPECT_EQ(learner->version_space().budget, (std::vector<int>{-1, 1}));
  EXPECT_FALSE(learner->predict(pt(0)));
  EXPECT_FALSE(learner->accepts(pt(2)));
  EXPECT_FALSE(learner->accepts(Advice{Bits{1, 0}}));
}

TEST(NarrowConceptAT, LiteralUpdateLosesTheWitness) {
  // H = {10, 01}, k = 1: the sequence (b,1),(a,1)^5 is 1-realizable by 10.
  auto H = share(FiniteClass::from_strings({"10", "01"}));
  std::vector<std::pair<std::size_t, bool>> seq{{1, true}};
  for (int i = 0; i < 5; ++i) seq.push_back({0, true});
  const std::size_t bound = d1_k(*H, 1, 16).value + 1;

  NarrowConceptAT strict(H, 1, NarrowUpdate::strict);
  EXPECT_EQ(score(play(strict, seq, 1, 0, *H)).total, 5u);
  EXPECT_GT(5u, bound - 1);

  auto charged = make_narrow_concept_at(H, 1);
  EXPECT_LE(score(play(*charged, seq, 1, 0, *H)).total, bound);
}

TEST(NarrowConceptAT, WitnessRetention) {
  Rng rng(4);
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    auto H = random_class(rng, 2 + rng.below(6), 1 + rng.below(8));
    const std::size_t k = seed % 3, T = 10 + seed % 20;
    auto learner = make_narrow_concept_at(H, k);
    FuzzAdversary adv(H, T, k == 0 ? FuzzKind::realizable : FuzzKind::agnostic, k, seed);
    Transcript tr = run_game(*learner, adv, T);
    ASSERT_TRUE(verify_certificate(tr));
    EXPECT_GE(learner->version_space().budget[tr.certificate->witness], 0) << seed;
  }
}

TEST(Soa, Examples) {
  FiniteClass one = FiniteClass::from_strings({"0110"});
  for (std::size_t x = 0; x < 4; ++x) EXPECT_EQ(soa_predict(one, x), one.at(0, x));
  FiniteClass U2 = universal_class(2);
  for (std::size_t x = 0; x < U2.domain_size(); ++x) {
    const bool split = U2.at(0, x) != U2.at(1, x);
    if (split) EXPECT_TRUE(soa_predict(U2, x));
  }
  LdimCache cache(U2);
  EXPECT_EQ(cache.ldim(0), -1);
  EXPECT_EQ(cache.ldim(cache.all()), 1);
}

TEST(Soa, MistakeBoundUnderFullInformation) {
  Rng rng(61);
  for (int trial = 0; trial < 25; ++trial) {
    auto H = random_class(rng, 3 + rng.below(2), 4);
    LdimCache cache(*H);
    const int L = cache.ldim(cache.all());
    // Worst case over realizable sequences of length <= 6, SOA updated on every round.
    std::function<int(HypMask, int)> worst = [&](HypMask V, int depth) -> int {
      if (depth == 6) return 0;
      int best = 0;
      for (std::size_t x = 0; x < H->domain_size(); ++x) {
        const bool yhat = cache.soa(V, x);
        for (bool y : {false, true}) {
          const HypMask next = y ? (V & cache.ones(x)) : (V & ~cache.ones(x));
          if (!next) continue;
          best = std::max(best, (yhat != y) + worst(next, depth + 1));
        }
      }
      return best;
    };
    EXPECT_LE(worst(cache.all(), 0), L) << trial;
  }
}

TEST(Cover, Sizes) {
  EXPECT_EQ(deviation_cover_size(3, 1), 4u);
  EXPECT_EQ(deviation_cover_size(5, 2), 16u);
  EXPECT_EQ(deviation_cover_size(4, 0), 1u);
  EXPECT_EQ(deviation_cover_size(1000000, 5), SIZE_MAX);

  auto single = share(FiniteClass::from_strings({"0110"}));
  CoverExpertSet c1(single, 4, CoverStrategy::soa_deviation);
  EXPECT_EQ(c1.size(), 1u);
  EXPECT_EQ(cover_predictions(c1, {0, 1, 2, 3})[0], (Bits{0, 1, 1, 0}));

  auto U2 = share(universal_class(2));
  CoverExpertSet dev(U2, 3, CoverStrategy::soa_deviation);
  EXPECT_EQ(dev.size(), 4u);
  EXPECT_EQ(dev.base_ldim(), 1u);
  EXPECT_EQ(dev.deviation_sets()[1], (std::vector<std::uint32_t>{1}));
  CoverExpertSet autoc(U2, 3, CoverStrategy::automatic);
  EXPECT_EQ(autoc.strategy(), CoverStrategy::identity);
  EXPECT_EQ(autoc.size(), 2u);
  EXPECT_THROW(CoverExpertSet(U2, 3, CoverStrategy::soa_deviation, 3), BudgetExceeded);
}

TEST(Cover, CoversEveryHypothesisOnEverySequence) {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    auto H = random_class(rng, 3, 2 + rng.below(5));
    for (std::size_t T = 1; T <= 4; ++T) {
      CoverExpertSet cover(H, T, CoverStrategy::soa_deviation);
      std::vector<std::uint32_t> seq(T);
      std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == T) {
          const auto rows = cover_predictions(cover, seq);
          for (std::size_t h = 0; h < H->size(); ++h) {
            bool covered = false;
            for (const auto& r : rows) {
              bool same = true;
              for (std::size_t t = 0; t < T && same; ++t) same = r[t] == H->at(h, seq[t]);
              covered = covered || same;
            }
            ASSERT_TRUE(covered) << "trial " << trial << " h " << h;
          }
          return;
        }
        for (std::uint32_t x = 0; x < 3; ++x) {
          seq[i] = x;
          rec(i + 1);
        }
      };
      rec(0);
    }
  }
}

TEST(Reduction, SingletonClassIsExact) {
  auto H = share(FiniteClass::from_strings({"01101"}));
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto learner = make_reduction_learner(H, 20, 0);
    FuzzAdversary adv(H, 20, FuzzKind::realizable, 0, seed);
    EXPECT_EQ(score(run_game(*learner, adv, 20)).total, 0u);
  }
}

TEST(Reduction, BoundOnFuzz) {
  Rng rng(71);
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    auto H = random_class(rng, 2 + rng.below(5), 2 + rng.below(6));
    const std::size_t k = seed % 3, T = 8 + seed % 25;
    const CoverStrategy strategy = seed % 2 ? CoverStrategy::soa_deviation : CoverStrategy::automatic;
    auto learner = make_reduction_learner(H, T, k, strategy);
    FuzzAdversary adv(H, T, k ? FuzzKind::agnostic : FuzzKind::realizable, k, seed);
    Transcript tr = run_game(*learner, adv, T);
    EXPECT_TRUE(verify_certificate(tr));
    EXPECT_LE(static_cast<double>(score(tr).total), learner->mistake_bound()) << seed;
  }
}

TEST(Reduction, InducedExpertGameStaysKRealizable) {
  Rng rng(5);
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    auto H = random_class(rng, 3 + rng.below(3), 2 + rng.below(5));
    const std::size_t k = seed % 3, T = 6 + seed % 6;
    FuzzAdversary adv(H, T, k ? FuzzKind::agnostic : FuzzKind::realizable, k, seed);
    auto learner = make_narrow_concept_at(H, k);
    Transcript tr = run_game(*learner, adv, T);
    std::vector<std::uint32_t> seq;
    for (const auto& r : tr.rounds) seq.push_back(std::get<Point>(r.instance).id);
    CoverExpertSet cover(H, T, CoverStrategy::soa_deviation);
    std::size_t best = T + 1;
    for (const auto& row : cover_predictions(cover, seq)) {
      std::size_t dis = 0;
      for (std::size_t t = 0; t < T; ++t) dis += row[t] != (*tr.rounds[t].label ? 1 : 0);
      best = std::min(best, dis);
    }
    EXPECT_LE(best, k) << seed;
  }
}

TEST(Reduction, SingletonsOverSixSnapshot) {
  auto H = share(singletons_class(6, false));
  std::vector<std::size_t> mistakes;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto learner = make_reduction_learner(H, 32, 0);
    FuzzAdversary adv(H, 32, FuzzKind::realizable, 0, seed);
    mistakes.push_back(score(run_game(*learner, adv, 32)).total);
    EXPECT_LE(static_cast<double>(mistakes.back()), learner->mistake_bound());
  }
  EXPECT_EQ(mistakes, (std::vector<std::size_t>{3, 2, 5}));
}

TEST(ClassExpertAdapter, MatchesDirectExpertGame) {
  auto H = share(FiniteClass::from_strings({"0110", "1010", "0001"}));
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ClassExpertAdapter adapted(H, make_realizable_expat(3, 15));
    FuzzAdversary adv(H, 15, FuzzKind::realizable, 0, seed);
    Transcript tr = run_game(adapted, adv, 15);
    std::vector<Instance> xs;
    Bits ys;
    for (const auto& r : tr.rounds) {
      const auto x = std::get<Point>(r.instance).id;
      xs.push_back(Advice{Bits{H->at(0, x), H->at(1, x), H->at(2, x)}});
      ys.push_back(*r.label);
    }
    SequenceAdversary direct(xs, ys, 0, tr.certificate.value());
    auto plain = make_realizable_expat(3, 15);
    Transcript tr2 = run_game(*plain, direct, 15);
    for (std::size_t t = 0; t < 15; ++t) ASSERT_EQ(tr.rounds[t].prediction, tr2.rounds[t].prediction);
  }
}

TEST(DoublingNarrow, RealizableInputMatchesKOne) {
  Rng rng(9);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto H = random_class(rng, 4, 5);
    auto dbl = make_doubling_narrow(H);
    auto fixed = make_narrow_concept_at(H, 1);
    FuzzAdversary a1(H, 25, FuzzKind::realizable, 0, seed), a2(H, 25, FuzzKind::realizable, 0, seed);
    Transcript t1 = run_game(*dbl, a1, 25), t2 = run_game(*fixed, a2, 25);
    for (std::size_t t = 0; t < 25; ++t) ASSERT_EQ(t1.rounds[t].prediction, t2.rounds[t].prediction);
    EXPECT_EQ(dbl->k_guess(), 1u);
    EXPECT_EQ(dbl->doublings(), 0u);
  }
}

TEST(DoublingNarrow, GuessAndMistakesStayBounded) {
  // Frozen constant for M <= c (D_1(H) + 1)(k* + 1).
  const double c = 1.25;
  Rng rng(10);
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    auto H = random_class(rng, 3 + rng.below(3), 2 + rng.below(5));
    const std::size_t kstar = 1 + seed % 4, T = 30;
    auto dbl = make_doubling_narrow(H);
    FuzzAdversary adv(H, T, FuzzKind::agnostic, kstar, seed);
    Transcript tr = run_game(*dbl, adv, T);
    EXPECT_LE(dbl->k_guess(), 8u);  // at most 2 k* rounded up to a power of two
    const double D1 = static_cast<double>(width_depth(*H, 1, 64).value);
    const double ratio = static_cast<double>(score(tr).total) / ((D1 + 1) * (kstar + 1));
    worst = std::max(worst, ratio);
    EXPECT_LE(ratio, c) << seed;
  }
  RecordProperty("worst_ratio", std::to_string(worst));
}

TEST(DoublingReduction, EpochsAndCoverSizes) {
  auto H = share(hamming_ball_class(5, 1));  // |H| = 6, L = 1
  auto learner = make_doubling_reduction(H);
  EXPECT_EQ(learner->T_guess(), 3u);  // ceil(log2 6)
  EXPECT_EQ(learner->restarts(), 0u);
  FuzzAdversary adv(H, 40, FuzzKind::agnostic, 2, 3);
  std::size_t last_T = learner->T_guess();
  for (std::size_t t = 1; t <= 40; ++t) {
    Instance x = adv.next(t);
    const bool yhat = learner->predict(x);
    const std::size_t Tg = learner->T_guess();
    EXPECT_TRUE(Tg == last_T || Tg == 2 * last_T);
    EXPECT_LE(learner->cover().size(), std::min<std::size_t>(H->size(), deviation_cover_size(Tg, 1)));
    EXPECT_EQ(learner->cover().horizon(), Tg);
    last_T = Tg;
    auto y = adv.answer(t, yhat);
    learner->observe(x, yhat, yhat ? y : std::nullopt);
  }
  EXPECT_GE(learner->restarts(), 3u);
}

TEST(DoublingReduction, EndToEndScale) {
  // Frozen constant for M <= c sqrt(T (k + L log2 T)).
  const double c = 3.0;
  Rng rng(14);
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    auto H = random_class(rng, 4 + rng.below(3), 3 + rng.below(6));
    const std::size_t k = seed % 4, T = 64;
    auto learner = make_doubling_reduction(H);
    FuzzAdversary adv(H, T, k ? FuzzKind::agnostic : FuzzKind::realizable, k, seed);
    const double M = static_cast<double>(score(run_game(*learner, adv, T)).total);
    const double L = static_cast<double>(littlestone_dim(*H));
    EXPECT_LE(M, c * std::sqrt(T * (k + L * std::log2(T)) + 1.0)) << seed;
  }
}

TEST(NarrowConceptAT, HardBoundExhaustive) {
  const std::vector<FiniteClass> catalogue{
      singletons_class(3, false), singletons_class(3, true), FiniteClass::from_strings({"000", "100", "110", "111"}),
      FiniteClass::from_strings({"01", "10"}), hamming_ball_class(3, 1)};
  for (const auto& C : catalogue) {
    auto H = share(C);
    for (std::size_t k = 0; k <= 1; ++k) {
      NarrowConceptAT learner(H, k);
      const long worst = oracle::learner_worst_case(learner, *H, 6, k, [](std::size_t x) { return pt(x); });
      const auto bound = d1_k(*H, k, 64);
      ASSERT_FALSE(bound.cap_exceeded);
      EXPECT_LE(worst, static_cast<long>(bound.value + k)) << H->row_string(0) << " k=" << k;
    }
  }
}
