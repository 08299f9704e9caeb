#pragma once

// Small fixtures and independent brute-force oracles shared by the unit tests.
// The oracles deliberately avoid the library's enumeration and shearer code.

#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "prs/prs.hpp"

namespace prs::testing {

// Clause list over binary uniform variables 0..n-1; literal +v / -v is 1-based.
inline Instance cnf_instance(std::uint32_t n, const std::vector<std::vector<int>>& clauses) {
  CnfFormula f;
  f.num_vars = n;
  for (const auto& c : clauses) f.clauses.emplace_back(c.begin(), c.end());
  return compile_cnf(f);
}

// Two events on one shared binary variable with p = 1/4 each and disjoint violations.
inline Instance two_adjacent_events() {
  std::vector<VariableSpec> vars{VariableSpec::uniform(0, 2), VariableSpec::uniform(1, 2), VariableSpec::uniform(2, 2)};
  std::vector<EventSpec> events{{0, {0, 1}, {{0, 0}}}, {1, {0, 2}, {{1, 0}}}};
  return Instance(vars, events);
}

// One event on a uniform 4-valued variable with p = k/4.
inline Instance single_event(int k) {
  std::vector<VariableSpec> vars{VariableSpec::uniform(0, 4)};
  std::vector<std::vector<Value>> tuples;
  for (Value x = 0; x < k; ++x) tuples.push_back({x});
  return Instance(vars, {EventSpec{0, {0}, tuples}});
}

// Calls fn(sigma, weight) for every total assignment.
inline void for_each_assignment(const Instance& inst, const std::function<void(const Assignment&, const Rational&)>& fn) {
  Assignment sigma(std::vector<Value>(inst.num_variables(), 0));
  std::function<void(std::size_t, Rational)> rec = [&](std::size_t v, Rational w) {
    if (v == inst.num_variables()) {
      fn(sigma, w);
      return;
    }
    const auto& spec = inst.variable(static_cast<VarId>(v));
    for (Value x = 0; x < static_cast<Value>(spec.domain_size); ++x) {
      sigma[static_cast<VarId>(v)] = x;
      rec(v + 1, w * spec.weights[x]);
    }
  };
  rec(0, Rational(1));
}

inline Rational brute_no_bad(const Instance& inst) {
  Rational total = 0;
  for_each_assignment(inst, [&](const Assignment& s, const Rational& w) {
    for (const auto& ev : inst.events()) {
      bool hit = false;
      for (const auto& t : ev.violating) {
        bool eq = true;
        for (std::size_t k = 0; k < ev.vbl.size(); ++k) eq = eq && s[ev.vbl[k]] == t[k];
        hit = hit || eq;
      }
      if (hit) return;
    }
    total += w;
  });
  return total;
}

// Inclusion-exclusion over all independent subsets, by plain subset enumeration.
inline Rational q_by_subsets(const DependencyGraph& g, const std::vector<Rational>& p, std::uint32_t set) {
  auto independent = [&](std::uint32_t s) {
    for (std::uint32_t i = 0; i < g.m; ++i)
      if (s >> i & 1)
        for (auto j : g.adjacency[i])
          if (s >> j & 1) return false;
    return true;
  };
  if (!independent(set)) return 0;
  Rational q = 0;
  for (std::uint32_t j = 0; j < (1u << g.m); ++j) {
    if ((j & set) != set || !independent(j)) continue;
    Rational prod = 1;
    for (std::uint32_t i = 0; i < g.m; ++i)
      if (j >> i & 1) prod *= p[i];
    q += (std::popcount(j ^ set) % 2 == 0) ? prod : Rational(-prod);
  }
  return q;
}

inline DependencyGraph path_dependency(std::size_t m) {
  std::vector<std::pair<EventId, EventId>> e;
  for (EventId i = 0; i + 1 < m; ++i) e.emplace_back(i, i + 1);
  return DependencyGraph::from_edges(m, e);
}

}  // namespace prs::testing
