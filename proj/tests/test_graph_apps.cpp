#include <gtest/gtest.h>

#include "support.hpp"

using namespace prs;

namespace {

Assignment as_assignment(const std::vector<Value>& v) { return Assignment(v); }

// Rooted spanning trees by brute force over all arrow maps.
std::size_t count_rooted_trees(const Graph& g, Vertex root) {
  ArrowMap a{root, std::vector<Vertex>(g.num_vertices(), kNoVertex)};
  std::size_t count = 0;
  auto rec = [&](auto&& self, Vertex v) -> void {
    if (v == g.num_vertices()) {
      count += is_rooted_spanning_tree(g, a);
      return;
    }
    if (v == root) return self(self, v + 1);
    for (const auto& inc : g.incident(v)) {
      a.successor[v] = inc.neighbour;
      self(self, v + 1);
    }
  };
  rec(rec, 0);
  return count;
}

// Hard-core weight sum over independent sets of a path, by enumeration.
Rational path_partition_by_enumeration(unsigned k, const Rational& lambda) {
  Rational total = 0;
  for (std::uint32_t s = 0; s < (1u << k); ++s) {
    if (s & (s >> 1)) continue;
    Rational w = 1;
    for (int i = 0; i < std::popcount(s); ++i) w *= lambda;
    total += w;
  }
  return total;
}

std::vector<Graph> small_graphs() {
  return {cycle_graph(3), cycle_graph(4), complete_graph(4), Graph(4, {{0, 1}, {1, 2}, {2, 0}, {2, 3}, {3, 1}}),
          Graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 4}, {4, 2}})};
}

}  // namespace

TEST(SinkPopping, MatchesGenericSamplerSeedForSeed) {
  for (const auto& g : small_graphs()) {
    auto inst = sink_free_instance(g);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      SamplerConfig c;
      c.seed = seed;
      c.record_log = true;
      auto fast = sink_popping(g, c);
      auto generic = extremal_prs(inst, c);
      EXPECT_EQ(as_assignment(fast.value.direction), generic.assignment);
      EXPECT_EQ(fast.stats.log, generic.stats.log);
      EXPECT_EQ(fast.stats.per_event, generic.stats.per_event);
      EXPECT_TRUE(sinks(g, fast.value).empty());
    }
  }
}

TEST(SinkPopping, UniformOnSmallCycles) {
  for (std::size_t n : {3u, 4u}) {
    const Graph g = cycle_graph(n);
    auto oracle = enumerate_valid(sink_free_instance(g));
    EXPECT_EQ(oracle.valid.size(), 2u);
    AssignmentSampler s = [&](std::uint64_t seed) {
      SamplerConfig c;
      c.seed = seed;
      return as_assignment(sink_popping(g, c).value.direction);
    };
    auto v = uniformity_test(s, oracle, 50000, 10 + n);
    EXPECT_TRUE(v.pass) << to_json(v).dump();
  }
}

TEST(SinkPopping, TreeHasNoSinkFreeOrientation) {
  SamplerConfig c;
  c.round_cap = 200;
  EXPECT_THROW(sink_popping(path_graph(3), c), CapExceeded);
}

TEST(CyclePopping, MatchesGenericSamplerSeedForSeed) {
  for (const auto& g : small_graphs()) {
    for (Vertex root : {Vertex{0}, Vertex{2}}) {
      auto enc = spanning_tree_instance(g, root);
      for (std::uint64_t seed = 0; seed < 40; ++seed) {
        SamplerConfig c;
        c.seed = seed;
        auto fast = cycle_popping(g, root, c);
        auto generic = extremal_prs(enc.instance, c);
        EXPECT_EQ(fast.value, enc.arrows(g, generic.assignment));
        EXPECT_EQ(fast.stats.rounds, generic.stats.rounds);
        EXPECT_EQ(fast.stats.total_resamples, generic.stats.total_resamples);
        EXPECT_TRUE(is_rooted_spanning_tree(g, fast.value));
      }
    }
  }
}

TEST(CyclePopping, UniformOverSpanningTrees) {
  const Graph k4 = complete_graph(4);
  const Graph p5 = Graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {0, 2}});
  EXPECT_EQ(count_rooted_trees(k4, 0), 16u);
  for (const auto& [g, expected] : {std::pair{k4, 16u}, std::pair{p5, 11u}}) {
    auto enc = spanning_tree_instance(g, 0);
    auto oracle = enumerate_valid(enc.instance);
    EXPECT_EQ(oracle.valid.size(), expected);
    EXPECT_EQ(oracle.valid.size(), count_rooted_trees(g, 0));
    AssignmentSampler s = [&](std::uint64_t seed) {
      SamplerConfig c;
      c.seed = seed;
      auto a = cycle_popping(g, 0, c).value;
      std::vector<Value> vals;
      for (Vertex v : enc.vertex_of_var) {
        const auto& inc = g.incident(v);
        for (std::size_t k = 0; k < inc.size(); ++k)
          if (inc[k].neighbour == a.successor[v]) vals.push_back(static_cast<Value>(k));
      }
      return Assignment(vals);
    };
    auto v = uniformity_test(s, oracle, 60000, 20 + expected);
    EXPECT_TRUE(v.pass) << to_json(v).dump();
  }
}

TEST(CyclePopping, RejectsDisconnectedOrBadRoot) {
  const Graph g(4, {{0, 1}, {2, 3}});
  SamplerConfig c;
  EXPECT_THROW(cycle_popping(g, 0, c), InputError);
  EXPECT_THROW(cycle_popping(cycle_graph(3), 5, c), InputError);
  EXPECT_THROW(spanning_tree_instance(g, 0), InputError);
}

TEST(CyclePopping, CycleVerticesExample) {
  // 1 -> 2 -> 1 is a cycle; 3 -> 0 reaches the root.
  ArrowMap a{0, {kNoVertex, 2, 1, 0}};
  auto [vs, count] = cycle_vertices(a);
  EXPECT_EQ(vs, (std::vector<Vertex>{1, 2}));
  EXPECT_EQ(count, 1u);
}

TEST(Hardcore, MatchesGenericSamplerSeedForSeed) {
  Rng rng(3);
  std::vector<Graph> graphs = small_graphs();
  graphs.push_back(path_graph(6));
  graphs.push_back(random_regular_graph(12, 3, rng));
  for (const auto& g : graphs)
    for (const Rational lambda : {Rational(1), Rational(1, 3), Rational(2)}) {
      auto inst = hardcore_instance(g, lambda);
      for (std::uint64_t seed = 0; seed < 30; ++seed) {
        SamplerConfig c;
        c.seed = seed;
        c.record_log = true;
        auto fast = hardcore_sample(g, lambda, c);
        auto generic = general_prs(inst, c);
        EXPECT_EQ(as_assignment(fast.value.occupied), generic.assignment);
        EXPECT_EQ(fast.stats.log, generic.stats.log);
        EXPECT_EQ(fast.stats.variable_resamples, generic.stats.variable_resamples);
        EXPECT_TRUE(is_independent_set(g, fast.value));
      }
    }
}

TEST(Hardcore, WeightedDistributionOnSmallGraphs) {
  struct Case {
    Graph g;
    Rational lambda;
    std::size_t sets;
  };
  std::vector<Case> cases{{path_graph(5), Rational(1), 13}, {path_graph(3), Rational(2), 5}, {cycle_graph(4), Rational(1, 2), 7}};
  for (const auto& cs : cases) {
    auto oracle = enumerate_valid(hardcore_instance(cs.g, cs.lambda));
    EXPECT_EQ(oracle.valid.size(), cs.sets);
    AssignmentSampler s = [&](std::uint64_t seed) {
      SamplerConfig c;
      c.seed = seed;
      return as_assignment(hardcore_sample(cs.g, cs.lambda, c).value.occupied);
    };
    auto v = uniformity_test(s, oracle, 60000, 40 + cs.sets);
    EXPECT_TRUE(v.pass) << to_json(v).dump();
  }
  // P3 with lambda = 2: {0, 2} has weight 4 out of 1 + 3*2 + 4 = 11.
  auto oracle = enumerate_valid(hardcore_instance(path_graph(3), Rational(2)));
  for (std::size_t i = 0; i < oracle.valid.size(); ++i)
    if (oracle.valid[i] == Assignment(std::vector<Value>{1, 0, 1})) EXPECT_EQ(oracle.probabilities[i], Rational(4, 11));
}

TEST(Hardcore, BadAndResVertices) {
  const Graph g = path_graph(5);
  HardcoreConfig c{{1, 1, 0, 0, 1}};
  EXPECT_EQ(bad_vertices(g, c), (std::vector<Vertex>{0, 1}));
  EXPECT_EQ(res_vertices(g, c), (std::vector<Vertex>{0, 1, 2}));
  EXPECT_FALSE(is_independent_set(g, c));
  HardcoreConfig ok{{1, 0, 1, 0, 1}};
  EXPECT_TRUE(bad_vertices(g, ok).empty());
  EXPECT_TRUE(res_vertices(g, ok).empty());
}

TEST(Hardcore, ConditionThreshold) {
  // 1 / (2 sqrt(e) 3 - 1) is about 0.1126.
  EXPECT_TRUE(hardcore_condition(Rational(1, 10), 3));
  EXPECT_TRUE(hardcore_condition(Rational(112, 1000), 3));
  EXPECT_FALSE(hardcore_condition(Rational(113, 1000), 3));
  EXPECT_FALSE(hardcore_condition(Rational(12, 100), 3));
  EXPECT_THROW(hardcore_sample(path_graph(2), Rational(0), SamplerConfig{}), PreconditionError);
}

TEST(RatioBounds, Values) {
  auto b = ratio_bounds(cycle_graph(5));
  EXPECT_TRUE(b.sink_applicable);
  EXPECT_EQ(b.sink_bound, 20u);
  EXPECT_TRUE(b.tree_applicable);
  EXPECT_EQ(b.tree_bound, 25u);
  auto tree = ratio_bounds(path_graph(4));
  EXPECT_FALSE(tree.sink_applicable);
  EXPECT_TRUE(tree.tree_applicable);
  EXPECT_FALSE(ratio_bounds(Graph(4, {{0, 1}, {2, 3}})).tree_applicable);
}

TEST(RatioBounds, HoldForExactExpectations) {
  for (const auto& g : small_graphs()) {
    auto b = ratio_bounds(g);
    auto sink = sink_free_instance(g);
    EXPECT_LE(expected_resamples(build_dependency_graph(sink), event_probabilities(sink)), b.sink_bound);
    auto tree = spanning_tree_instance(g, 0).instance;
    if (tree.num_events() <= 30)
      EXPECT_LE(expected_resamples(build_dependency_graph(tree), event_probabilities(tree)), b.tree_bound);
  }
}

TEST(PathAnalytics, PartitionMatchesEnumeration) {
  for (unsigned k = 0; k <= 12; ++k)
    for (const Rational lambda : {Rational(1), Rational(1, 10), Rational(3, 2)})
      EXPECT_EQ(path_partition(k, lambda), path_partition_by_enumeration(k, lambda));
  EXPECT_EQ(path_partition(5, Rational(1)), 13);
}

TEST(PathAnalytics, EndpointMatrixMatchesEnumeration) {
  for (unsigned k = 4; k <= 9; ++k)
    for (const Rational lambda : {Rational(1), Rational(1, 10), Rational(2)}) {
      auto m = endpoint_matrix(k, lambda);
      auto brute = endpoint_matrix_by_enumeration(k, lambda);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_EQ(m.w[i][j], brute.w[i][j]);
      EXPECT_EQ(m.w[0][0] + 2 * m.w[0][1] + m.w[1][1], 1);
      const Rational ik = path_partition(k, lambda);
      EXPECT_EQ(m.det(), lambda * lambda * det_w_prime(k, lambda) / (ik * ik));
      Rational pw = (k % 2 == 1) ? 1 : -1;
      for (unsigned t = 0; t + 2 < k; ++t) pw *= lambda;
      EXPECT_EQ(det_w_prime(k, lambda), pw);
    }
  EXPECT_THROW(endpoint_matrix(3, Rational(1)), PreconditionError);
}

TEST(PathAnalytics, Alpha) {
  EXPECT_DOUBLE_EQ(alpha(2), 0.5);
  EXPECT_NEAR(alpha(1), 2 / (3 + std::sqrt(5.0)), 1e-15);
  EXPECT_THROW(alpha(0), PreconditionError);
}

TEST(Encodings, AreExtremal) {
  for (const auto& g : small_graphs()) {
    EXPECT_TRUE(is_extremal(sink_free_instance(g)));
    EXPECT_TRUE(is_extremal(spanning_tree_instance(g, 1).instance));
    EXPECT_FALSE(is_extremal(hardcore_instance(g, Rational(1))));
  }
}

TEST(Encodings, CycleCountOfCompleteGraph) {
  // Directed cycles in K4 avoiding the root live on K3: three 2-cycles and two 3-cycles.
  auto enc = spanning_tree_instance(complete_graph(4), 0);
  EXPECT_EQ(enc.instance.num_events(), 5u);
  // K5 minus root is K4: 6 + 8 + 6 directed cycles.
  EXPECT_EQ(spanning_tree_instance(complete_graph(5), 0).instance.num_events(), 20u);
}

TEST(Encodings, ParseApp) {
  EXPECT_EQ(parse_app("sink-free"), App::sink_free);
  EXPECT_EQ(parse_app("spanning-tree"), App::spanning_tree);
  EXPECT_EQ(parse_app("hardcore"), App::hardcore);
  EXPECT_THROW(parse_app("matching"), InputError);
}

TEST(DisjointPaths, EndpointFrequenciesMatchExactLaw) {
  SamplerConfig c;
  c.seed = 99;
  auto rep = disjoint_paths_experiment(400, 5, Rational(1), 200, c, 1);
  ASSERT_TRUE(rep.exact);
  EXPECT_EQ(rep.rows.size(), 200u);
  std::uint64_t total = 0;
  for (const auto& row : rep.endpoint_counts)
    for (auto x : row) total += x;
  EXPECT_EQ(total, 200u * 80u);
  EXPECT_LT(rep.max_abs_z, 4.5);
  EXPECT_LE(rep.p50_rounds, rep.p90_rounds);
  EXPECT_LE(rep.p99_rounds, rep.max_rounds);
  EXPECT_THROW(disjoint_paths_experiment(10, 3, Rational(1), 1, c), PreconditionError);
}
