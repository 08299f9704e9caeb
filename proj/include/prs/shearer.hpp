#pragma once

// Exact analysis over the independent-set structure of a dependency graph:
// the q_I quantities, expected resampling counts, and the sufficient
// conditions for efficient sampling.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "prs/errors.hpp"
#include "prs/model.hpp"
#include "prs/rational.hpp"

namespace prs {

inline constexpr std::size_t kMaxShearerEvents = 30;
inline constexpr std::size_t kDefaultIndependentSetBudget = std::size_t{1} << 22;

using EventMask = std::uint32_t;

namespace detail {

inline void guard_event_count(const DependencyGraph& g) {
  if (g.m > kMaxShearerEvents)
    throw EnumerationLimit("exact analysis supports at most " + std::to_string(kMaxShearerEvents) +
                           " events; instance has " + std::to_string(g.m));
}

// Closed neighbourhood masks N+(i).
inline std::vector<EventMask> closed_neighbourhoods(const DependencyGraph& g) {
  guard_event_count(g);
  std::vector<EventMask> out(g.m);
  for (EventId i = 0; i < g.m; ++i) {
    out[i] = EventMask{1} << i;
    for (EventId j : g.adjacency[i]) out[i] |= EventMask{1} << j;
  }
  return out;
}

inline EventMask closed_neighbourhood(const std::vector<EventMask>& nbhd, EventMask set) {
  EventMask out = 0;
  for (EventMask s = set; s; s &= s - 1) out |= nbhd[std::countr_zero(s)];
  return out;
}

inline Rational product_over(std::span<const Rational> p, EventMask set) {
  Rational out = 1;
  for (EventMask s = set; s; s &= s - 1) out *= p[std::countr_zero(s)];
  return out;
}

inline void check_p_vector(const DependencyGraph& g, std::span<const Rational> p) {
  if (p.size() != g.m) throw InputError("probability vector length does not match event count");
}

}  // namespace detail

inline EventMask to_mask(std::span<const EventId> set) {
  EventMask mask = 0;
  for (EventId i : set) {
    if (i >= kMaxShearerEvents) throw EnumerationLimit("event id beyond exact-analysis range");
    mask |= EventMask{1} << i;
  }
  return mask;
}

inline std::vector<EventId> from_mask(EventMask mask) {
  std::vector<EventId> out;
  for (EventMask s = mask; s; s &= s - 1) out.push_back(static_cast<EventId>(std::countr_zero(s)));
  return out;
}

inline bool is_independent(const DependencyGraph& g, EventMask set) {
  for (EventMask s = set; s; s &= s - 1) {
    const auto i = static_cast<EventId>(std::countr_zero(s));
    for (EventId j : g.adjacency[i])
      if (set & (EventMask{1} << j)) return false;
  }
  return true;
}

// All independent sets (including the empty set), in DFS order.
inline std::vector<EventMask> independent_sets(const DependencyGraph& g,
                                               std::size_t budget = kDefaultIndependentSetBudget) {
  const auto nbhd = detail::closed_neighbourhoods(g);
  std::vector<EventMask> out;
  auto dfs = [&](auto&& self, EventMask current, EventMask blocked, std::size_t from) -> void {
    if (out.size() >= budget) throw EnumerationLimit("independent-set enumeration budget exceeded");
    out.push_back(current);
    for (std::size_t i = from; i < g.m; ++i)
      if (!(blocked & (EventMask{1} << i))) self(self, current | (EventMask{1} << i), blocked | nbhd[i], i + 1);
  };
  dfs(dfs, 0, 0, 0);
  return out;
}

struct QValue {
  Rational value;
  bool independent = true;  // false: I is not independent and value is 0
};

// q_I from its definition: alternating sum of p_J over independent J containing I.
inline QValue q_value(const DependencyGraph& g, std::span<const Rational> p, std::span<const EventId> set) {
  detail::check_p_vector(g, p);
  const auto nbhd = detail::closed_neighbourhoods(g);
  const EventMask base = to_mask(set);
  if (!is_independent(g, base)) return {Rational(0), false};
  const EventMask blocked0 = detail::closed_neighbourhood(nbhd, base);
  Rational sum = 0;
  auto dfs = [&](auto&& self, const Rational& weight, bool negative, EventMask blocked, std::size_t from) -> void {
    if (negative) sum -= weight; else sum += weight;
    for (std::size_t i = from; i < g.m; ++i)
      if (!(blocked & (EventMask{1} << i))) self(self, Rational(weight * p[i]), !negative, blocked | nbhd[i], i + 1);
  };
  dfs(dfs, detail::product_over(p, base), false, blocked0, 0);
  return {sum, true};
}

// q_empty of the subgraph induced by a vertex mask, through the deletion
// recurrence Q(S) = Q(S - v) - p_v Q(S - N+(v)). Memoised per mask.
class QEmptyCalculator {
 public:
  QEmptyCalculator(const DependencyGraph& g, std::span<const Rational> p)
      : nbhd_(detail::closed_neighbourhoods(g)), p_(p.begin(), p.end()) {
    detail::check_p_vector(g, p);
    full_ = g.m == 32 ? ~EventMask{0} : (EventMask{1} << g.m) - 1;
  }

  const Rational& q_empty() { return of(full_); }

  // q_I = p_I * q_empty(G - N+(I)) for independent I.
  Rational q_of(EventMask independent_set) {
    const EventMask rest = full_ & ~detail::closed_neighbourhood(nbhd_, independent_set);
    return detail::product_over(p_, independent_set) * of(rest);
  }

  const Rational& of(EventMask set) {
    if (auto it = memo_.find(set); it != memo_.end()) return it->second;
    if (memo_.size() >= kDefaultIndependentSetBudget) throw EnumerationLimit("q_empty memo budget exceeded");
    Rational value;
    if (set == 0) {
      value = 1;
    } else {
      const int v = std::countr_zero(set);
      Rational without = of(set & ~(EventMask{1} << v));
      value = without - p_[v] * of(set & ~nbhd_[v]);
    }
    return memo_.emplace(set, std::move(value)).first->second;
  }

 private:
  std::vector<EventMask> nbhd_;
  std::vector<Rational> p_;
  EventMask full_ = 0;
  std::unordered_map<EventMask, Rational> memo_;
};

inline Rational q_empty(const DependencyGraph& g, std::span<const Rational> p) {
  QEmptyCalculator calc(g, p);
  return calc.q_empty();
}

inline std::vector<Rational> q_singletons(const DependencyGraph& g, std::span<const Rational> p) {
  QEmptyCalculator calc(g, p);
  std::vector<Rational> out;
  for (EventId i = 0; i < g.m; ++i) out.push_back(calc.q_of(EventMask{1} << i));
  return out;
}

// Exact E[T_i] = q_i / q_empty for partial rejection sampling on extremal instances.
inline std::vector<Rational> expected_resamples_per_event(const DependencyGraph& g, std::span<const Rational> p) {
  QEmptyCalculator calc(g, p);
  const Rational q0 = calc.q_empty();
  if (q0 <= 0) throw PreconditionError("Shearer condition fails: q_empty = " + to_string(q0) + " <= 0");
  std::vector<Rational> out;
  for (EventId i = 0; i < g.m; ++i) out.push_back(calc.q_of(EventMask{1} << i) / q0);
  return out;
}

inline Rational expected_resamples(const DependencyGraph& g, std::span<const Rational> p) {
  Rational total = 0;
  for (const auto& t : expected_resamples_per_event(g, p)) total += t;
  return total;
}

// Asymmetric local lemma: p_i <= x_i * prod_{j ~ i} (1 - x_j) for all i.
inline bool check_asymmetric_lll(const DependencyGraph& g, std::span<const Rational> p, std::span<const Rational> x) {
  detail::check_p_vector(g, p);
  if (x.size() != g.m) throw InputError("x vector length does not match event count");
  for (const auto& xi : x)
    if (xi < 0 || xi >= 1) throw PreconditionError("x_i must lie in [0, 1)");
  for (EventId i = 0; i < g.m; ++i) {
    Rational rhs = x[i];
    for (EventId j : g.adjacency[i]) rhs *= 1 - x[j];
    if (p[i] > rhs) return false;
  }
  return true;
}

// (d-1)^(d-1) / d^d.
inline Rational symmetric_pc(unsigned d) {
  if (d < 2) throw PreconditionError("symmetric_pc requires d >= 2");
  return rational_pow(Rational(d - 1), d - 1) / rational_pow(Rational(d), d);
}

// m * p / (p_c - p), the linear bound on E[T] below the symmetric threshold.
inline Rational linear_bound(std::uint64_t m, unsigned d, const Rational& p) {
  const Rational pc = symmetric_pc(d);
  if (p >= pc) throw PreconditionError("linear_bound: no slack, p = " + to_string(p) + " >= p_c = " + to_string(pc));
  return Rational(m) * p / (pc - p);
}

struct GprsCheck {
  bool applicable = false;  // Delta >= 2
  bool ok = false;
  bool first_ok = false;    // c1 e p Delta^2 <= 1
  bool second_ok = false;   // c2 e r Delta <= 1
  Rational p = 0;
  Rational r = 0;
  std::size_t delta = 0;
  unsigned c1 = 6;
  unsigned c2 = 3;
  double first_product = 0;
  double second_product = 0;
};

inline GprsCheck check_gprs_values(const Rational& p, const Rational& r, std::size_t delta, unsigned c1 = 6,
                                   unsigned c2 = 3) {
  GprsCheck out;
  out.p = p;
  out.r = r;
  out.delta = delta;
  out.c1 = c1;
  out.c2 = c2;
  const Rational d(static_cast<unsigned long long>(delta));
  const Rational a = Rational(c1) * p * d * d;
  const Rational b = Rational(c2) * r * d;
  out.first_product = kE * to_double(a);
  out.second_product = kE * to_double(b);
  out.first_ok = certified_leq_in_e([&](const Rational& e) { return Rational(e * a); }, Rational(1));
  out.second_ok = certified_leq_in_e([&](const Rational& e) { return Rational(e * b); }, Rational(1));
  out.applicable = delta >= 2;
  out.ok = out.applicable && out.first_ok && out.second_ok;
  return out;
}

inline GprsCheck check_gprs_conditions(const Instance& instance, unsigned c1 = 6, unsigned c2 = 3) {
  Rational p = 0;
  for (EventId i = 0; i < instance.num_events(); ++i) p = std::max(p, event_probability(instance, i));
  const auto g = build_dependency_graph(instance);
  return check_gprs_values(p, r_max(instance), g.max_degree, c1, c2);
}

// Partial sums over independent set sequences of length <= L of p_S, for
// L = 0..max_length. Entry 0 is the empty sequence alone.
inline std::vector<Rational> truncated_log_sums(const DependencyGraph& g, std::span<const Rational> p,
                                                std::size_t max_length, std::uint64_t budget = 50'000'000) {
  detail::check_p_vector(g, p);
  const auto nbhd = detail::closed_neighbourhoods(g);
  std::vector<EventMask> sets = independent_sets(g);
  sets.erase(std::remove(sets.begin(), sets.end(), EventMask{0}), sets.end());
  const std::size_t n = sets.size();
  if (static_cast<std::uint64_t>(n) * n * std::max<std::size_t>(max_length, 1) > budget)
    throw EnumerationLimit("truncated_log_sum: enumeration budget exceeded");

  std::vector<Rational> weight(n);
  std::vector<std::vector<std::size_t>> successors(n);
  for (std::size_t a = 0; a < n; ++a) {
    weight[a] = detail::product_over(p, sets[a]);
    const EventMask reach = detail::closed_neighbourhood(nbhd, sets[a]);
    for (std::size_t b = 0; b < n; ++b)
      if ((sets[b] & ~reach) == 0) successors[a].push_back(b);
  }
  // g_l(S): total weight of sequences of length 1..l starting at S.
  std::vector<Rational> g_prev(n, Rational(0)), g_cur(n);
  std::vector<Rational> partial{Rational(1)};
  for (std::size_t len = 1; len <= max_length; ++len) {
    Rational total = 1;
    for (std::size_t a = 0; a < n; ++a) {
      Rational inner = 1;
      for (std::size_t b : successors[a]) inner += g_prev[b];
      g_cur[a] = weight[a] * inner;
      total += g_cur[a];
    }
    std::swap(g_prev, g_cur);
    partial.push_back(std::move(total));
  }
  return partial;
}

inline Rational truncated_log_sum(const DependencyGraph& g, std::span<const Rational> p, std::size_t max_length) {
  return truncated_log_sums(g, p, max_length).back();
}

struct ShearerReport {
  Rational q_empty = 0;
  std::vector<Rational> q_singletons;
  std::optional<Rational> expected_T;                 // unset when q_empty <= 0
  std::vector<Rational> expected_T_per_event;
  std::size_t independent_set_count = 0;
  bool shearer_ok = false;  // q_I >= 0 for all independent I and q_empty > 0
  bool lll_ok = false;      // asymmetric local lemma with x_i = 1/(Delta+1)
  Rational p_max = 0;
  std::size_t max_degree = 0;
  std::optional<Rational> p_c;  // when Delta >= 2
  std::optional<GprsCheck> gprs;
};

inline ShearerReport shearer_report(const DependencyGraph& g, std::span<const Rational> p) {
  detail::check_p_vector(g, p);
  ShearerReport rep;
  QEmptyCalculator calc(g, p);
  rep.q_empty = calc.q_empty();
  const auto sets = independent_sets(g);
  rep.independent_set_count = sets.size();
  Rational sum = 0;
  bool all_nonnegative = true;
  for (EventMask s : sets) {
    Rational q = calc.q_of(s);
    if (q < 0) all_nonnegative = false;
    sum += q;
  }
  if (sum != 1) throw std::logic_error("q_I values do not sum to 1 (got " + to_string(sum) + ")");
  for (EventId i = 0; i < g.m; ++i) rep.q_singletons.push_back(calc.q_of(EventMask{1} << i));
  rep.shearer_ok = all_nonnegative && rep.q_empty > 0;
  if (rep.q_empty > 0) {
    Rational total = 0;
    for (const auto& qi : rep.q_singletons) {
      rep.expected_T_per_event.push_back(qi / rep.q_empty);
      total += rep.expected_T_per_event.back();
    }
    rep.expected_T = total;
  }
  rep.max_degree = g.max_degree;
  for (const auto& pi : p) rep.p_max = std::max(rep.p_max, pi);
  std::vector<Rational> x(g.m);
  for (EventId i = 0; i < g.m; ++i) x[i] = g.max_degree == 0 ? p[i] : Rational(1, g.max_degree + 1);
  rep.lll_ok = std::all_of(x.begin(), x.end(), [](const Rational& xi) { return xi < 1; }) &&
               check_asymmetric_lll(g, p, x);
  if (g.max_degree >= 2) rep.p_c = symmetric_pc(static_cast<unsigned>(g.max_degree));
  return rep;
}

inline ShearerReport shearer_report(const Instance& instance, unsigned c1 = 6, unsigned c2 = 3) {
  const auto g = build_dependency_graph(instance);
  const auto p = event_probabilities(instance);
  ShearerReport rep = shearer_report(g, p);
  rep.gprs = check_gprs_conditions(instance, c1, c2);
  return rep;
}

inline nlohmann::json to_json(const GprsCheck& c) {
  return {{"applicable", c.applicable},
          {"ok", c.ok},
          {"p", to_string(c.p)},
          {"r", to_string(c.r)},
          {"delta", c.delta},
          {"first_condition", {{"constant", c.c1}, {"value", c.first_product}, {"ok", c.first_ok}}},
          {"second_condition", {{"constant", c.c2}, {"value", c.second_product}, {"ok", c.second_ok}}}};
}

inline nlohmann::json to_json(const ShearerReport& r) {
  nlohmann::json j;
  j["q_empty"] = to_string(r.q_empty);
  j["q_singletons"] = nlohmann::json::array();
  for (const auto& q : r.q_singletons) j["q_singletons"].push_back(to_string(q));
  j["expected_T"] = r.expected_T ? nlohmann::json(to_string(*r.expected_T)) : nlohmann::json("undefined");
  j["expected_T_per_event"] = nlohmann::json::array();
  for (const auto& t : r.expected_T_per_event) j["expected_T_per_event"].push_back(to_string(t));
  j["independent_sets"] = r.independent_set_count;
  j["shearer_ok"] = r.shearer_ok;
  j["lll_ok"] = r.lll_ok;
  j["symmetric"] = {{"p", to_string(r.p_max)},
                    {"delta", r.max_degree},
                    {"p_c", r.p_c ? nlohmann::json(to_string(*r.p_c)) : nlohmann::json(nullptr)}};
  if (r.gprs) j["gprs"] = to_json(*r.gprs);
  return j;
}

}  // namespace prs
