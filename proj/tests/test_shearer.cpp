#include <gtest/gtest.h>

#include "support.hpp"

using namespace prs;
using prs::testing::path_dependency;
using prs::testing::q_by_subsets;

namespace {

DependencyGraph empty_dependency(std::size_t m) { return DependencyGraph::from_edges(m, {}); }

DependencyGraph random_dependency(Rng& rng, std::size_t m, int edge_percent) {
  std::vector<std::pair<EventId, EventId>> e;
  for (EventId i = 0; i < m; ++i)
    for (EventId j = i + 1; j < m; ++j)
      if (static_cast<int>(rng.below(100)) < edge_percent) e.emplace_back(i, j);
  return DependencyGraph::from_edges(m, e);
}

std::vector<Rational> random_p(Rng& rng, std::size_t m, unsigned den) {
  std::vector<Rational> p;
  for (std::size_t i = 0; i < m; ++i) p.emplace_back(static_cast<unsigned>(rng.below(den / 3 + 1)), den);
  return p;
}

}  // namespace

TEST(QValue, SingleEvent) {
  auto g = empty_dependency(1);
  std::vector<Rational> p{Rational(1, 4)};
  EXPECT_EQ(q_value(g, p, {}).value, Rational(3, 4));
}

TEST(QValue, TwoAdjacentEvents) {
  auto g = path_dependency(2);
  std::vector<Rational> p{Rational(1, 4), Rational(1, 4)};
  EXPECT_EQ(q_value(g, p, {}).value, Rational(1, 2));
  std::vector<EventId> one{0};
  EXPECT_EQ(q_value(g, p, one).value, Rational(1, 4));
  std::vector<EventId> both{0, 1};
  auto q = q_value(g, p, both);
  EXPECT_FALSE(q.independent);
  EXPECT_EQ(q.value, 0);
}

TEST(QValue, EmptyGraphIsProduct) {
  auto g = empty_dependency(5);
  std::vector<Rational> p{Rational(1, 2), Rational(1, 3), Rational(1, 5), Rational(0), Rational(2, 7)};
  Rational prod = 1;
  for (const auto& x : p) prod *= 1 - x;
  EXPECT_EQ(q_value(g, p, {}).value, prod);
  EXPECT_EQ(q_empty(g, p), prod);
}

TEST(QValue, RoutesAgreeWithSubsetInclusionExclusion) {
  Rng rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = 1 + rng.below(8);
    auto g = random_dependency(rng, m, 40);
    auto p = random_p(rng, m, 12);
    QEmptyCalculator calc(g, p);
    for (EventMask s : independent_sets(g)) {
      const auto expected = q_by_subsets(g, p, s);
      EXPECT_EQ(q_value(g, p, from_mask(s)).value, expected);
      EXPECT_EQ(calc.q_of(s), expected);
    }
  }
}

TEST(QValue, NormalisationAndMobiusConsistency) {
  Rng rng(37);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = 1 + rng.below(9);
    auto g = random_dependency(rng, m, 35);
    auto p = random_p(rng, m, 9);
    auto sets = independent_sets(g);
    Rational sum = 0;
    QEmptyCalculator calc(g, p);
    for (EventMask s : sets) sum += calc.q_of(s);
    EXPECT_EQ(sum, 1);
    for (EventMask i : sets) {
      Rational rhs = 0;
      for (EventMask j : sets)
        if ((j & i) == i) rhs += calc.q_of(j);
      Rational prod = 1;
      for (EventId k : from_mask(i)) prod *= p[k];
      EXPECT_EQ(prod, rhs);
    }
  }
}

TEST(QValue, ExtremalInstancesMatchBruteForce) {
  Rng rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    auto inst = random_extremal_instance(rng);
    auto g = build_dependency_graph(inst);
    EXPECT_EQ(q_empty(g, event_probabilities(inst)), prs::testing::brute_no_bad(inst));
  }
}

TEST(QValue, MonotoneUnderShrinkingOneProbability) {
  Rng rng(43);
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t m = 2 + rng.below(6);
    auto g = random_dependency(rng, m, 50);
    auto p = random_p(rng, m, 20);
    const Rational base = q_empty(g, p);
    if (base <= 0) continue;
    for (EventId i = 0; i < m; ++i)
      for (int z = 0; z <= 4; ++z) {
        auto scaled = p;
        scaled[i] *= Rational(z, 4);
        EXPECT_GE(q_empty(g, scaled), base);
      }
  }
}

TEST(QValue, GuardOnEventCount) {
  auto g = empty_dependency(31);
  std::vector<Rational> p(31, Rational(1, 2));
  EXPECT_THROW(q_empty(g, p), EnumerationLimit);
}

TEST(ExpectedResamples, Examples) {
  auto tri = sink_free_instance(cycle_graph(3));
  EXPECT_EQ(expected_resamples(build_dependency_graph(tri), event_probabilities(tri)), 3);
  auto g1 = empty_dependency(1);
  std::vector<Rational> p1{Rational(2, 7)};
  EXPECT_EQ(expected_resamples(g1, p1), Rational(2, 5));
  auto g2 = path_dependency(2);
  std::vector<Rational> p2{Rational(1, 4), Rational(1, 4)};
  EXPECT_EQ(expected_resamples(g2, p2), 1);
  std::vector<Rational> dead{Rational(1)};
  EXPECT_THROW(expected_resamples(g1, dead), PreconditionError);
}

TEST(ExpectedResamples, SinkFreeTriangleMatchesOrientationCounts) {
  // Z1 / Z0 counted directly: orientations with exactly one sink over sink-free ones.
  const Graph g = cycle_graph(3);
  int z0 = 0, z1 = 0;
  for (int mask = 0; mask < 8; ++mask) {
    Orientation o;
    for (int e = 0; e < 3; ++e) o.direction.push_back(mask >> e & 1);
    const auto s = sinks(g, o).size();
    z0 += s == 0;
    z1 += s == 1;
  }
  EXPECT_EQ(z0, 2);
  EXPECT_EQ(z1, 6);
  auto inst = sink_free_instance(g);
  EXPECT_EQ(expected_resamples(build_dependency_graph(inst), event_probabilities(inst)), Rational(z1, z0));
}

TEST(AsymmetricLll, Examples) {
  auto g1 = empty_dependency(1);
  std::vector<Rational> p{Rational(1, 3)};
  EXPECT_TRUE(check_asymmetric_lll(g1, p, p));
  auto star = DependencyGraph::from_edges(4, std::vector<std::pair<EventId, EventId>>{{0, 1}, {0, 2}, {0, 3}});
  std::vector<Rational> ps{Rational(1, 2), Rational(0), Rational(0), Rational(0)};
  std::vector<Rational> xs(4, Rational(1, 4));
  EXPECT_FALSE(check_asymmetric_lll(star, ps, xs));
  std::vector<Rational> zeros(4, Rational(0));
  EXPECT_TRUE(check_asymmetric_lll(star, zeros, xs));
  std::vector<Rational> bad_x(4, Rational(1));
  EXPECT_THROW(check_asymmetric_lll(star, zeros, bad_x), PreconditionError);
}

TEST(SymmetricThreshold, Values) {
  EXPECT_EQ(symmetric_pc(2), Rational(1, 4));
  EXPECT_EQ(symmetric_pc(3), Rational(4, 27));
  EXPECT_EQ(symmetric_pc(4), Rational(27, 256));
  EXPECT_THROW(symmetric_pc(1), PreconditionError);
}

TEST(LinearBound, Values) {
  EXPECT_EQ(linear_bound(1, 3, Rational(1, 8)), Rational(27, 5));
  EXPECT_EQ(linear_bound(10, 3, Rational(1, 8)), 54);
  EXPECT_EQ(linear_bound(7, 4, symmetric_pc(4) / 2), 7);
  EXPECT_THROW(linear_bound(1, 3, Rational(4, 27)), PreconditionError);
}

TEST(GprsConditions, SharingCnfExamplePasses) {
  // Monotone construction on K61: k = 20, d = 60, s = 10.
  auto f = monotone_cnf_from_graph(complete_graph(61), 10);
  auto check = check_gprs_conditions(compile_cnf(f));
  EXPECT_TRUE(check.applicable);
  EXPECT_EQ(check.p, pow2(-20));
  EXPECT_EQ(check.r, pow2(-10));
  EXPECT_LE(check.delta, 120u);
  EXPECT_TRUE(check.ok);
  // Worst case allowed by the parameters, Delta = dk/s = 120.
  EXPECT_TRUE(check_gprs_values(pow2(-20), pow2(-10), 120).ok);
}

TEST(GprsConditions, FailsAndNotApplicable) {
  auto certain = check_gprs_values(Rational(1), Rational(1, 2), 3);
  EXPECT_FALSE(certain.ok);
  EXPECT_FALSE(certain.first_ok);
  Instance lone({VariableSpec::uniform(0, 2)}, {EventSpec{0, {0}, {{0}}}});
  auto none = check_gprs_conditions(lone);
  EXPECT_FALSE(none.applicable);
  EXPECT_EQ(none.r, 0);
  EXPECT_EQ(none.delta, 0u);
}

TEST(TruncatedLogSum, Examples) {
  auto g1 = empty_dependency(1);
  std::vector<Rational> half{Rational(1, 2)};
  EXPECT_EQ(truncated_log_sum(g1, half, 0), 1);
  auto sums = truncated_log_sums(g1, half, 10);
  for (std::size_t l = 0; l <= 10; ++l) EXPECT_EQ(sums[l], 2 - pow2(-static_cast<long>(l)));

  auto g2 = path_dependency(2);
  std::vector<Rational> p2{Rational(1, 4), Rational(1, 4)};
  auto s2 = truncated_log_sums(g2, p2, 40);
  EXPECT_TRUE(std::is_sorted(s2.begin(), s2.end()));
  EXPECT_LE(s2.back(), 2);
  EXPECT_LT(2 - to_double(s2.back()), 1e-6);
}

TEST(TruncatedLogSum, SmallLengthsMatchSequenceEnumeration) {
  // Sequences of length <= 3 enumerated directly from the successor rule.
  Rng rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 1 + rng.below(4);
    auto g = random_dependency(rng, m, 50);
    auto p = random_p(rng, m, 10);
    auto sets = independent_sets(g);
    sets.erase(std::remove(sets.begin(), sets.end(), EventMask{0}), sets.end());
    auto reach = [&](EventMask s) {
      EventMask out = s;
      for (EventId i : from_mask(s))
        for (EventId j : g.adjacency[i]) out |= EventMask{1} << j;
      return out;
    };
    auto weight = [&](EventMask s) {
      Rational w = 1;
      for (EventId i : from_mask(s)) w *= p[i];
      return w;
    };
    Rational expected = 1;
    for (EventMask a : sets) {
      expected += weight(a);
      for (EventMask b : sets) {
        if ((b & ~reach(a)) != 0) continue;
        expected += weight(a) * weight(b);
        for (EventMask c : sets)
          if ((c & ~reach(b)) == 0) expected += weight(a) * weight(b) * weight(c);
      }
    }
    EXPECT_EQ(truncated_log_sum(g, p, 3), expected);
  }
}

TEST(ShearerReport, SinkFreeTriangle) {
  auto rep = shearer_report(sink_free_instance(cycle_graph(3)));
  EXPECT_EQ(rep.q_empty, Rational(1, 4));
  for (const auto& q : rep.q_singletons) EXPECT_EQ(q, Rational(1, 4));
  ASSERT_TRUE(rep.expected_T);
  EXPECT_EQ(*rep.expected_T, 3);
  EXPECT_TRUE(rep.shearer_ok);
  auto j = to_json(rep);
  EXPECT_EQ(j["expected_T"], "3");
  EXPECT_EQ(j["q_empty"], "1/4");
}

TEST(ShearerReport, UndefinedExpectationOutsideShearerRegion) {
  auto g = path_dependency(3);
  std::vector<Rational> p(3, Rational(1, 2));
  auto rep = shearer_report(g, p);
  EXPECT_LE(rep.q_empty, 0);
  EXPECT_FALSE(rep.expected_T);
  EXPECT_FALSE(rep.shearer_ok);
  EXPECT_EQ(to_json(rep)["expected_T"], "undefined");
}
