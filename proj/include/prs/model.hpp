#pragma once

// Variable-framework instances: independent finite variables with exact
// marginals, and bad events given as explicit sets of violating tuples.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prs/errors.hpp"
#include "prs/rational.hpp"
#include "prs/rng.hpp"

namespace prs {

using VarId = std::uint32_t;
using EventId = std::uint32_t;
using Value = std::int32_t;

inline constexpr Value kUnassigned = -1;
inline constexpr std::size_t kDefaultMaxEventArity = 24;
inline constexpr std::uint64_t kDefaultPairBudget = std::uint64_t{1} << 24;

struct VariableSpec {
  VarId id = 0;
  std::uint32_t domain_size = 1;
  std::vector<Rational> weights;  // marginal of the product distribution

  static VariableSpec uniform(VarId id, std::uint32_t domain_size) {
    VariableSpec v{id, domain_size, {}};
    v.weights.assign(domain_size, Rational(1, domain_size));
    return v;
  }
};

// A (possibly partial) assignment; kUnassigned marks variables with no value.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t n) : values_(n, kUnassigned) {}
  explicit Assignment(std::vector<Value> values) : values_(std::move(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  Value operator[](VarId v) const { return values_[v]; }
  Value& operator[](VarId v) { return values_[v]; }
  bool assigned(VarId v) const { return v < values_.size() && values_[v] != kUnassigned; }
  bool total() const {
    return std::none_of(values_.begin(), values_.end(), [](Value x) { return x == kUnassigned; });
  }
  const std::vector<Value>& values() const noexcept { return values_; }

  // Restriction to a set of variables; everything else becomes unassigned.
  Assignment restricted_to(std::span<const VarId> vars) const {
    Assignment out(values_.size());
    for (VarId v : vars) out.values_[v] = values_[v];
    return out;
  }

  friend bool operator==(const Assignment&, const Assignment&) = default;
  friend auto operator<=>(const Assignment&, const Assignment&) = default;

 private:
  std::vector<Value> values_;
};

struct EventSpec {
  EventId id = 0;
  std::vector<VarId> vbl;
  // Violating tuples over vbl, kept sorted lexicographically once validated.
  std::vector<std::vector<Value>> violating;
};

namespace detail {

// Lexicographic comparison of a stored tuple against the projection of an
// assignment onto vbl, without materialising the projection.
inline int compare_projection(const std::vector<Value>& tuple, const std::vector<VarId>& vbl,
                              const Assignment& sigma) {
  for (std::size_t k = 0; k < vbl.size(); ++k) {
    const Value s = sigma[vbl[k]];
    if (tuple[k] != s) return tuple[k] < s ? -1 : 1;
  }
  return 0;
}

}  // namespace detail

// sigma must assign every variable of event.vbl.
inline bool occurs(const EventSpec& event, const Assignment& sigma) {
  for (VarId v : event.vbl)
    if (!sigma.assigned(v))
      throw PreconditionError("occurs: variable " + std::to_string(v) + " of event " +
                              std::to_string(event.id) + " has no value");
  auto it = std::partition_point(event.violating.begin(), event.violating.end(),
                                 [&](const std::vector<Value>& t) {
                                   return detail::compare_projection(t, event.vbl, sigma) < 0;
                                 });
  return it != event.violating.end() && detail::compare_projection(*it, event.vbl, sigma) == 0;
}

// Some violating tuple agrees with every value the partial assignment fixes.
inline bool compatible(const EventSpec& event, const Assignment& partial) {
  for (const auto& tuple : event.violating) {
    bool agrees = true;
    for (std::size_t k = 0; k < event.vbl.size() && agrees; ++k) {
      const VarId v = event.vbl[k];
      if (partial.assigned(v) && partial[v] != tuple[k]) agrees = false;
    }
    if (agrees) return true;
  }
  return false;
}

class Instance {
 public:
  Instance() = default;

  Instance(std::vector<VariableSpec> variables, std::vector<EventSpec> events,
           std::size_t max_event_arity = kDefaultMaxEventArity)
      : variables_(std::move(variables)), events_(std::move(events)) {
    validate(max_event_arity);
  }

  std::size_t num_variables() const noexcept { return variables_.size(); }
  std::size_t num_events() const noexcept { return events_.size(); }
  const std::vector<VariableSpec>& variables() const noexcept { return variables_; }
  const std::vector<EventSpec>& events() const noexcept { return events_; }
  const VariableSpec& variable(VarId v) const { return variables_.at(v); }
  const EventSpec& event(EventId i) const { return events_.at(i); }

  // Events whose vbl contains v, ascending.
  const std::vector<EventId>& events_of(VarId v) const { return var_events_.at(v); }
  const std::vector<double>& cumulative(VarId v) const { return cumulative_.at(v); }

  Value draw(VarId v, Rng& rng) const { return static_cast<Value>(draw_index(cumulative_[v], rng)); }

 private:
  void validate(std::size_t max_event_arity) {
    for (std::size_t i = 0; i < variables_.size(); ++i) {
      const auto& var = variables_[i];
      const std::string where = "variable " + std::to_string(var.id);
      if (var.id != i) throw InputError("variable ids must be dense and ascending from 0; got " + std::to_string(var.id) + " at position " + std::to_string(i));
      if (var.domain_size < 1) throw InputError(where + ": domain must be nonempty");
      if (var.weights.size() != var.domain_size)
        throw InputError(where + ": expected " + std::to_string(var.domain_size) + " weights");
      Rational total = 0;
      for (const auto& w : var.weights) {
        if (w < 0) throw InputError(where + ": negative weight");
        total += w;
      }
      if (total != 1) throw InputError(where + ": weights sum to " + to_string(total) + ", not 1");
    }
    var_events_.assign(variables_.size(), {});
    for (std::size_t i = 0; i < events_.size(); ++i) {
      auto& ev = events_[i];
      const std::string where = "event " + std::to_string(ev.id);
      if (ev.id != i) throw InputError("event ids must be dense and ascending from 0; got " + std::to_string(ev.id) + " at position " + std::to_string(i));
      if (ev.vbl.size() > max_event_arity)
        throw InputError(where + ": depends on " + std::to_string(ev.vbl.size()) +
                         " variables, above the cap of " + std::to_string(max_event_arity));
      std::vector<VarId> sorted = ev.vbl;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw InputError(where + ": duplicate variable in vbl");
      for (VarId v : ev.vbl)
        if (v >= variables_.size()) throw InputError(where + ": unknown variable " + std::to_string(v));
      for (const auto& t : ev.violating) {
        if (t.size() != ev.vbl.size()) throw InputError(where + ": violating tuple has wrong length");
        for (std::size_t k = 0; k < t.size(); ++k)
          if (t[k] < 0 || static_cast<std::uint32_t>(t[k]) >= variables_[ev.vbl[k]].domain_size)
            throw InputError(where + ": value out of domain in violating tuple");
      }
      std::sort(ev.violating.begin(), ev.violating.end());
      if (std::adjacent_find(ev.violating.begin(), ev.violating.end()) != ev.violating.end())
        throw InputError(where + ": duplicate violating tuple");
      for (VarId v : ev.vbl) var_events_[v].push_back(ev.id);
    }
    cumulative_.clear();
    for (const auto& var : variables_) cumulative_.push_back(cumulative_table(var.weights));
  }

  std::vector<VariableSpec> variables_;
  std::vector<EventSpec> events_;
  std::vector<std::vector<EventId>> var_events_;
  std::vector<std::vector<double>> cumulative_;
};

struct DependencyGraph {
  std::size_t m = 0;
  std::vector<std::vector<EventId>> adjacency;  // sorted, no self loops
  std::size_t max_degree = 0;

  bool adjacent(EventId i, EventId j) const {
    return std::binary_search(adjacency[i].begin(), adjacency[i].end(), j);
  }

  static DependencyGraph from_edges(std::size_t m, std::span<const std::pair<EventId, EventId>> edges) {
    DependencyGraph g;
    g.m = m;
    g.adjacency.assign(m, {});
    for (auto [a, b] : edges) {
      if (a == b || a >= m || b >= m) throw InputError("bad dependency edge");
      g.adjacency[a].push_back(b);
      g.adjacency[b].push_back(a);
    }
    g.finish();
    return g;
  }

  void finish() {
    max_degree = 0;
    for (auto& adj : adjacency) {
      std::sort(adj.begin(), adj.end());
      adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
      max_degree = std::max(max_degree, adj.size());
    }
  }
};

inline DependencyGraph build_dependency_graph(const Instance& instance) {
  DependencyGraph g;
  g.m = instance.num_events();
  g.adjacency.assign(g.m, {});
  for (VarId v = 0; v < instance.num_variables(); ++v) {
    const auto& evs = instance.events_of(v);
    for (std::size_t a = 0; a < evs.size(); ++a)
      for (std::size_t b = a + 1; b < evs.size(); ++b) {
        g.adjacency[evs[a]].push_back(evs[b]);
        g.adjacency[evs[b]].push_back(evs[a]);
      }
  }
  g.finish();
  return g;
}

namespace detail {

// Positions of the shared variables of two events: (index in a.vbl, index in b.vbl).
inline std::vector<std::pair<std::size_t, std::size_t>> shared_positions(const EventSpec& a, const EventSpec& b) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t x = 0; x < a.vbl.size(); ++x)
    for (std::size_t y = 0; y < b.vbl.size(); ++y)
      if (a.vbl[x] == b.vbl[y]) out.emplace_back(x, y);
  return out;
}

inline bool tuples_agree(const std::vector<Value>& ta, const std::vector<Value>& tb,
                         const std::vector<std::pair<std::size_t, std::size_t>>& shared) {
  for (auto [x, y] : shared)
    if (ta[x] != tb[y]) return false;
  return true;
}

}  // namespace detail

// Two dependent events can occur together iff some pair of their violating
// tuples agrees on the shared variables. pair_budget bounds |A_i| * |A_j|.
inline bool is_extremal(const Instance& instance, std::uint64_t pair_budget = kDefaultPairBudget) {
  const auto graph = build_dependency_graph(instance);
  for (EventId i = 0; i < graph.m; ++i) {
    const auto& a = instance.event(i);
    for (EventId j : graph.adjacency[i]) {
      if (j < i) continue;
      const auto& b = instance.event(j);
      const auto work = static_cast<std::uint64_t>(a.violating.size()) * b.violating.size();
      if (work > pair_budget)
        throw EnumerationLimit("is_extremal: events " + std::to_string(i) + " and " + std::to_string(j) +
                               " are too large to certify (" + std::to_string(work) + " tuple pairs)");
      const auto shared = detail::shared_positions(a, b);
      for (const auto& ta : a.violating)
        for (const auto& tb : b.violating)
          if (detail::tuples_agree(ta, tb, shared)) return false;
    }
  }
  return true;
}

inline Rational event_probability(const Instance& instance, EventId i) {
  const auto& ev = instance.event(i);
  Rational p = 0;
  for (const auto& t : ev.violating) {
    Rational w = 1;
    for (std::size_t k = 0; k < t.size(); ++k) w *= instance.variable(ev.vbl[k]).weights[t[k]];
    p += w;
  }
  return p;
}

inline std::vector<Rational> event_probabilities(const Instance& instance) {
  std::vector<Rational> p;
  p.reserve(instance.num_events());
  for (EventId i = 0; i < instance.num_events(); ++i) p.push_back(event_probability(instance, i));
  return p;
}

// mu-probability that the shared-variable pattern of (i, j) extends to A_j.
inline Rational r_value(const Instance& instance, EventId i, EventId j) {
  const auto& a = instance.event(i);
  const auto& b = instance.event(j);
  const auto shared = detail::shared_positions(a, b);
  std::vector<std::vector<Value>> patterns;
  patterns.reserve(b.violating.size());
  for (const auto& t : b.violating) {
    std::vector<Value> pat;
    pat.reserve(shared.size());
    for (auto [x, y] : shared) pat.push_back(t[y]);
    patterns.push_back(std::move(pat));
  }
  std::sort(patterns.begin(), patterns.end());
  patterns.erase(std::unique(patterns.begin(), patterns.end()), patterns.end());
  Rational r = 0;
  for (const auto& pat : patterns) {
    Rational w = 1;
    for (std::size_t k = 0; k < shared.size(); ++k) w *= instance.variable(a.vbl[shared[k].first]).weights[pat[k]];
    r += w;
  }
  return r;
}

struct RMatrix {
  std::map<std::pair<EventId, EventId>, Rational> entries;  // ordered dependent pairs
  Rational r_max = 0;
};

inline RMatrix r_matrix(const Instance& instance) {
  RMatrix out;
  const auto graph = build_dependency_graph(instance);
  for (EventId i = 0; i < graph.m; ++i)
    for (EventId j : graph.adjacency[i]) {
      Rational r = r_value(instance, i, j);
      if (r > out.r_max) out.r_max = r;
      out.entries.emplace(std::make_pair(i, j), std::move(r));
    }
  return out;
}

inline Rational r_max(const Instance& instance) {
  const auto graph = build_dependency_graph(instance);
  Rational best = 0;
  for (EventId i = 0; i < graph.m; ++i)
    for (EventId j : graph.adjacency[i]) {
      Rational r = r_value(instance, i, j);
      if (r > best) best = std::move(r);
    }
  return best;
}

inline Assignment sample_product(const Instance& instance, Rng& rng) {
  Assignment sigma(instance.num_variables());
  for (VarId v = 0; v < instance.num_variables(); ++v) sigma[v] = instance.draw(v, rng);
  return sigma;
}

// Events occurring under a total assignment, ascending.
inline std::vector<EventId> bad_events(const Instance& instance, const Assignment& sigma) {
  std::vector<EventId> bad;
  for (const auto& ev : instance.events())
    if (occurs(ev, sigma)) bad.push_back(ev.id);
  return bad;
}

// Structured constructors compiled to violating sets.

// Clause over binary variables: literals as (variable, positive?). Its single
// violating tuple sets every literal false.
inline EventSpec clause_event(EventId id, std::span<const std::pair<VarId, bool>> literals) {
  std::vector<std::pair<VarId, bool>> lits(literals.begin(), literals.end());
  std::sort(lits.begin(), lits.end());
  EventSpec ev{id, {}, {{}}};
  for (auto [v, positive] : lits) {
    ev.vbl.push_back(v);
    ev.violating[0].push_back(positive ? 0 : 1);
  }
  return ev;
}

// Edge event over occupation variables: violated when both endpoints are occupied.
inline EventSpec occupied_edge_event(EventId id, VarId u, VarId v) {
  if (u > v) std::swap(u, v);
  return EventSpec{id, {u, v}, {{1, 1}}};
}

}  // namespace prs
