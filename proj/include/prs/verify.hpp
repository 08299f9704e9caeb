#pragma once

// Brute-force oracles and statistical checks: exhaustive enumeration of the
// conditional product distribution, sampler-vs-oracle uniformity tests,
// empirical checks of the exact expectations from the shearer layer, the
// resampling-set properties, and the round scaling experiment.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <json.hpp>

#include "prs/cnf.hpp"
#include "prs/errors.hpp"
#include "prs/graph.hpp"
#include "prs/graph_apps.hpp"
#include "prs/instance_io.hpp"
#include "prs/model.hpp"
#include "prs/parallel.hpp"
#include "prs/rational.hpp"
#include "prs/rng.hpp"
#include "prs/sampler.hpp"
#include "prs/shearer.hpp"

namespace prs {

inline constexpr std::uint64_t kDefaultStateBudget = std::uint64_t{1} << 24;

// ---------------------------------------------------------------------------
// Enumeration oracle

struct EnumerationOptions {
  std::uint64_t state_budget = kDefaultStateBudget;
  bool keep_assignments = true;
  bool occurrence_law = false;  // Pr(exactly the events in S occur), keyed by mask; needs m <= 30
};

struct OracleResult {
  std::vector<Assignment> valid;        // ascending lexicographic order
  std::vector<Rational> probabilities;  // conditional probability of each valid assignment
  Rational no_bad_probability = 0;      // Pr_mu(no event occurs)
  bool defined = false;                 // false when no valid assignment exists
  std::uint64_t states = 0;
  std::size_t valid_count = 0;
  std::map<EventMask, Rational> occurrence_law;
};

namespace detail {

inline BigInt to_bigint(unsigned __int128 x) {
  BigInt hi = static_cast<std::uint64_t>(x >> 64);
  return (hi << 64) + BigInt(static_cast<std::uint64_t>(x));
}

inline BigInt to_bigint(const BigInt& x) { return x; }

template <class Acc>
Acc from_bigint(const BigInt& x) {
  if constexpr (std::is_same_v<Acc, BigInt>) {
    return x;
  } else {
    const BigInt mask = (BigInt(1) << 64) - 1;
    const auto hi = static_cast<BigInt>(x >> 64).convert_to<std::uint64_t>();
    const auto lo = static_cast<BigInt>(x & mask).convert_to<std::uint64_t>();
    return (static_cast<Acc>(hi) << 64) | lo;
  }
}

}  // namespace detail

inline OracleResult enumerate_valid(const Instance& instance, const EnumerationOptions& options = {}) {
  const std::size_t n = instance.num_variables();
  const std::size_t m = instance.num_events();
  if (options.occurrence_law && m > kMaxShearerEvents)
    throw EnumerationLimit("occurrence law needs at most " + std::to_string(kMaxShearerEvents) + " events");
  long double states = 1;
  for (const auto& v : instance.variables()) states *= v.domain_size;
  if (states > static_cast<long double>(options.state_budget))
    throw EnumerationLimit("enumerate_valid: " + std::to_string(static_cast<double>(states)) +
                           " joint states exceed the budget of " + std::to_string(options.state_budget));

  // Scale each marginal to integers over the lcm of its denominators.
  std::vector<std::vector<BigInt>> scaled(n);
  BigInt total_den = 1;
  for (VarId v = 0; v < n; ++v) {
    BigInt l = 1;
    for (const auto& w : instance.variable(v).weights) l = boost::multiprecision::lcm(l, denominator(w));
    for (const auto& w : instance.variable(v).weights) scaled[v].push_back(BigInt(numerator(w) * (l / denominator(w))));
    total_den *= l;
  }

  OracleResult out;
  out.states = static_cast<std::uint64_t>(states);
  auto run = [&]<class Acc>(Acc zero) {
    std::vector<std::vector<Acc>> num(n);
    for (VarId v = 0; v < n; ++v)
      for (const auto& x : scaled[v]) num[v].push_back(detail::from_bigint<Acc>(x));
    std::vector<Acc> valid_weight;
    std::map<EventMask, Acc> law;
    Acc z = zero;
    Assignment sigma(std::vector<Value>(n, 0));
    while (true) {
      Acc w = 1;
      for (VarId v = 0; v < n; ++v) w *= num[v][sigma[v]];
      EventMask occurring = 0;
      bool any = false;
      for (EventId i = 0; i < m; ++i)
        if (occurs(instance.event(i), sigma)) {
          any = true;
          if (!options.occurrence_law) break;
          occurring |= EventMask{1} << i;
        }
      if (options.occurrence_law) {
        auto [it, fresh] = law.try_emplace(occurring, zero);
        it->second += w;
      }
      if (!any && w != 0) {
        z += w;
        ++out.valid_count;
        if (options.keep_assignments) {
          out.valid.push_back(sigma);
          valid_weight.push_back(w);
        }
      }
      // Odometer with the last variable fastest, so output is lexicographic.
      bool more = false;
      for (std::size_t k = n; k-- > 0;) {
        const auto v = static_cast<VarId>(k);
        if (static_cast<std::uint32_t>(++sigma[v]) < instance.variable(v).domain_size) {
          more = true;
          break;
        }
        sigma[v] = 0;
      }
      if (!more) break;
    }
    const Rational den(total_den);
    out.no_bad_probability = Rational(detail::to_bigint(z)) / den;
    out.defined = z != 0;
    if (out.defined)
      for (const auto& w : valid_weight) out.probabilities.push_back(Rational(detail::to_bigint(w), detail::to_bigint(z)));
    for (const auto& [mask, w] : law)
      if (w != 0) out.occurrence_law.emplace(mask, Rational(detail::to_bigint(w)) / den);
  };
  if (boost::multiprecision::msb(total_den) < 120)
    run(static_cast<unsigned __int128>(0));
  else
    run(BigInt(0));
  return out;
}

inline nlohmann::json to_json(const OracleResult& r) {
  nlohmann::json j{{"states", r.states},
                   {"valid_count", r.valid_count},
                   {"defined", r.defined},
                   {"no_bad_probability", to_string(r.no_bad_probability)}};
  if (!r.valid.empty()) {
    j["valid"] = nlohmann::json::array();
    for (std::size_t i = 0; i < r.valid.size(); ++i)
      j["valid"].push_back({{"assignment", r.valid[i].values()}, {"probability", to_string(r.probabilities[i])}});
  }
  return j;
}

// ---------------------------------------------------------------------------
// Uniformity

using AssignmentSampler = std::function<Assignment(std::uint64_t seed)>;

struct UniformityThresholds {
  double max_tv = 0.01;
  double min_p_value = 1e-3;
};

struct UniformityVerdict {
  std::uint64_t samples = 0;
  std::size_t outcomes = 0;
  double tv = 0;
  double chi_square = 0;
  std::size_t df = 0;
  double p_value = 1;
  std::uint64_t outside_support = 0;
  UniformityThresholds thresholds;
  bool pass = false;
};

inline nlohmann::json to_json(const UniformityVerdict& v) {
  return {{"samples", v.samples},          {"outcomes", v.outcomes},
          {"tv", v.tv},                    {"chi_square", v.chi_square},
          {"df", v.df},                    {"p_value", v.p_value},
          {"outside_support", v.outside_support},
          {"max_tv", v.thresholds.max_tv}, {"min_p_value", v.thresholds.min_p_value},
          {"pass", v.pass}};
}

// Compares outcome counts with the oracle's conditional distribution.
inline UniformityVerdict uniformity_from_samples(const OracleResult& oracle, const std::vector<Assignment>& samples,
                                                 const UniformityThresholds& thresholds = {}) {
  if (!oracle.defined) throw PreconditionError("uniformity test needs a satisfiable instance");
  if (oracle.valid.size() != oracle.valid_count) throw PreconditionError("oracle was built without assignments");
  std::map<Assignment, std::size_t> index;
  for (std::size_t i = 0; i < oracle.valid.size(); ++i) index.emplace(oracle.valid[i], i);
  std::vector<std::uint64_t> counts(oracle.valid.size(), 0);
  UniformityVerdict v;
  v.thresholds = thresholds;
  v.samples = samples.size();
  v.outcomes = oracle.valid.size();
  for (const auto& s : samples) {
    auto it = index.find(s);
    if (it == index.end()) ++v.outside_support;
    else ++counts[it->second];
  }
  const double n = static_cast<double>(samples.size());
  double tv = static_cast<double>(v.outside_support) / n;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double p = to_double(oracle.probabilities[i]);
    tv += std::abs(static_cast<double>(counts[i]) / n - p);
    if (p > 0) {
      const double expected = n * p;
      v.chi_square += (static_cast<double>(counts[i]) - expected) * (static_cast<double>(counts[i]) - expected) / expected;
      ++cells;
    }
  }
  v.tv = tv / 2;
  v.df = cells > 0 ? cells - 1 : 0;
  if (v.outside_support > 0) v.p_value = 0;
  else if (v.df == 0) v.p_value = 1;
  else v.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(static_cast<double>(v.df)), v.chi_square));
  v.pass = v.tv <= thresholds.max_tv && v.p_value >= thresholds.min_p_value;
  return v;
}

inline UniformityVerdict uniformity_test(const AssignmentSampler& sampler, const OracleResult& oracle,
                                         std::uint64_t samples, std::uint64_t base_seed,
                                         const UniformityThresholds& thresholds = {}, unsigned threads = 0) {
  auto draws = run_batch(samples, base_seed, [&](std::uint64_t seed, std::size_t) { return sampler(seed); }, threads);
  return uniformity_from_samples(oracle, draws, thresholds);
}

// Deliberately non-uniform: the first valid assignment gets twice the weight of the others.
inline AssignmentSampler biased_stub(const OracleResult& oracle) {
  return [valid = oracle.valid](std::uint64_t seed) {
    Rng rng(seed);
    const std::uint64_t pick = rng.below(valid.size() + 1);
    return valid[pick == valid.size() ? 0 : pick];
  };
}

// ---------------------------------------------------------------------------
// Expected resamples and the first-round law

using RunSampler = std::function<RunStats(std::uint64_t seed)>;

inline RunSampler extremal_run_sampler(const Instance& instance, SamplerConfig config = {}) {
  return [&instance, config](std::uint64_t seed) {
    SamplerConfig c = config;
    c.seed = seed;
    c.kind = SamplerKind::extremal_prs;
    return extremal_prs(instance, c).stats;
  };
}

struct MeanCheck {
  std::string name;
  Rational exact;
  double mean = 0;
  double se = 0;
  double z = 0;
  bool pass = false;
};

inline nlohmann::json to_json(const MeanCheck& c) {
  return {{"name", c.name}, {"exact", to_string(c.exact)}, {"mean", c.mean}, {"se", c.se}, {"z", c.z}, {"pass", c.pass}};
}

inline MeanCheck mean_check(std::string name, const Rational& exact, const std::vector<double>& xs, double sigmas) {
  MeanCheck c{std::move(name), exact};
  const double n = static_cast<double>(xs.size());
  double sum = 0, sq = 0;
  for (double x : xs) sum += x;
  c.mean = sum / n;
  for (double x : xs) sq += (x - c.mean) * (x - c.mean);
  c.se = xs.size() > 1 ? std::sqrt(sq / (n - 1) / n) : 0;
  const double diff = std::abs(c.mean - to_double(exact));
  c.z = c.se > 0 ? diff / c.se : (diff == 0 ? 0 : INFINITY);
  c.pass = diff <= sigmas * c.se || diff == 0;
  return c;
}

struct ExpectedResamplesReport {
  std::uint64_t runs = 0;
  MeanCheck total;
  std::vector<MeanCheck> per_event;
  bool pass = false;
};

inline nlohmann::json to_json(const ExpectedResamplesReport& r) {
  nlohmann::json j{{"runs", r.runs}, {"total", to_json(r.total)}, {"pass", r.pass}};
  j["per_event"] = nlohmann::json::array();
  for (const auto& c : r.per_event) j["per_event"].push_back(to_json(c));
  return j;
}

inline ExpectedResamplesReport expected_resamples_test(const Instance& instance, std::uint64_t runs,
                                                       std::uint64_t base_seed, const RunSampler& sampler = {},
                                                       double sigmas = 3, unsigned threads = 0) {
  const auto g = build_dependency_graph(instance);
  const auto p = event_probabilities(instance);
  const auto exact = expected_resamples_per_event(g, p);
  const RunSampler run = sampler ? sampler : extremal_run_sampler(instance);
  auto stats = run_batch(runs, base_seed, [&](std::uint64_t seed, std::size_t) { return run(seed); }, threads);

  ExpectedResamplesReport rep;
  rep.runs = runs;
  std::vector<double> totals;
  for (const auto& s : stats) totals.push_back(static_cast<double>(s.total_resamples));
  Rational exact_total = 0;
  for (const auto& e : exact) exact_total += e;
  rep.total = mean_check("total", exact_total, totals, sigmas);
  rep.pass = rep.total.pass;
  for (EventId i = 0; i < g.m; ++i) {
    std::vector<double> xs;
    for (const auto& s : stats) xs.push_back(static_cast<double>(s.per_event.empty() ? 0 : s.per_event[i]));
    rep.per_event.push_back(mean_check("event " + std::to_string(i), exact[i], xs, sigmas));
    rep.pass = rep.pass && rep.per_event.back().pass;
  }
  return rep;
}

struct FirstRoundEntry {
  std::vector<EventId> set;
  Rational q;
  double frequency = 0;
  double sigma = 0;
  bool pass = false;
};

struct FirstRoundReport {
  std::uint64_t runs = 0;
  std::vector<FirstRoundEntry> entries;
  std::uint64_t non_independent = 0;  // initial occurring sets that were not independent
  bool pass = false;
};

inline nlohmann::json to_json(const FirstRoundReport& r) {
  nlohmann::json j{{"runs", r.runs}, {"non_independent", r.non_independent}, {"pass", r.pass}};
  j["entries"] = nlohmann::json::array();
  for (const auto& e : r.entries)
    j["entries"].push_back({{"set", e.set}, {"q", to_string(e.q)}, {"frequency", e.frequency},
                            {"sigma", e.sigma}, {"pass", e.pass}});
  return j;
}

// The first logged resampling set of extremal PRS is the exact set of events
// occurring under the initial product sample.
inline FirstRoundReport first_round_test(const Instance& instance, std::uint64_t runs, std::uint64_t base_seed,
                                         double sigmas = 3, unsigned threads = 0) {
  const auto g = build_dependency_graph(instance);
  const auto p = event_probabilities(instance);
  QEmptyCalculator calc(g, p);
  auto first = run_batch(runs, base_seed, [&](std::uint64_t seed, std::size_t) {
    SamplerConfig c;
    c.seed = seed;
    c.kind = SamplerKind::extremal_prs;
    c.record_log = true;
    c.check_extremal = false;
    const auto r = extremal_prs(instance, c);
    return r.stats.log.empty() ? EventMask{0} : to_mask(r.stats.log.front());
  }, threads);
  std::map<EventMask, std::uint64_t> counts;
  FirstRoundReport rep;
  rep.runs = runs;
  for (EventMask s : first) {
    ++counts[s];
    if (!is_independent(g, s)) ++rep.non_independent;
  }
  rep.pass = rep.non_independent == 0;
  const double n = static_cast<double>(runs);
  for (EventMask s : independent_sets(g)) {
    FirstRoundEntry e;
    e.set = from_mask(s);
    e.q = calc.q_of(s);
    const double q = to_double(e.q);
    e.frequency = static_cast<double>(counts[s]) / n;
    e.sigma = std::sqrt(std::max(q * (1 - q), 0.0) / n);
    e.pass = std::abs(e.frequency - q) <= sigmas * e.sigma || (q == 0 && counts[s] == 0);
    rep.pass = rep.pass && e.pass;
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Random instance generators

struct RandomInstanceParams {
  std::uint32_t min_vars = 3, max_vars = 8;
  std::uint32_t max_domain = 3;
  std::uint32_t min_events = 2, max_events = 6;
  std::uint32_t max_arity = 3;
  bool random_weights = true;
};

namespace detail {

inline std::uint32_t uniform_between(Rng& rng, std::uint32_t lo, std::uint32_t hi) {
  return lo + static_cast<std::uint32_t>(rng.below(hi - lo + 1));
}

inline std::vector<Rational> random_weights(Rng& rng, std::uint32_t domain) {
  std::vector<std::uint32_t> raw(domain);
  std::uint32_t total = 0;
  for (auto& x : raw) total += (x = 1 + static_cast<std::uint32_t>(rng.below(4)));
  std::vector<Rational> w;
  for (auto x : raw) w.emplace_back(x, total);
  return w;
}

inline std::vector<VarId> random_subset(Rng& rng, std::uint32_t n, std::uint32_t size) {
  std::vector<VarId> all(n);
  std::iota(all.begin(), all.end(), VarId{0});
  for (std::uint32_t i = 0; i < size; ++i) std::swap(all[i], all[i + rng.below(n - i)]);
  all.resize(size);
  std::sort(all.begin(), all.end());
  return all;
}

inline std::vector<std::vector<Value>> all_tuples(const std::vector<VariableSpec>& vars, const std::vector<VarId>& vbl) {
  std::vector<std::vector<Value>> out{{}};
  for (VarId v : vbl) {
    std::vector<std::vector<Value>> next;
    for (const auto& t : out)
      for (Value x = 0; x < static_cast<Value>(vars[v].domain_size); ++x) {
        next.push_back(t);
        next.back().push_back(x);
      }
    out = std::move(next);
  }
  return out;
}

inline std::vector<VariableSpec> random_variables(Rng& rng, const RandomInstanceParams& params) {
  const std::uint32_t n = uniform_between(rng, params.min_vars, params.max_vars);
  std::vector<VariableSpec> vars;
  for (VarId v = 0; v < n; ++v) {
    const std::uint32_t d = uniform_between(rng, 2, std::max<std::uint32_t>(2, params.max_domain));
    vars.push_back(params.random_weights ? VariableSpec{v, d, random_weights(rng, d)} : VariableSpec::uniform(v, d));
  }
  return vars;
}

}  // namespace detail

// Events with random scopes; each violating set is a random nonempty proper
// subset of the tuples over its scope.
inline Instance random_instance(Rng& rng, const RandomInstanceParams& params = {}) {
  auto vars = detail::random_variables(rng, params);
  const auto n = static_cast<std::uint32_t>(vars.size());
  const std::uint32_t m = detail::uniform_between(rng, params.min_events, params.max_events);
  std::vector<EventSpec> events;
  for (EventId i = 0; i < m; ++i) {
    EventSpec ev{i, detail::random_subset(rng, n, detail::uniform_between(rng, 1, std::min(params.max_arity, n))), {}};
    auto tuples = detail::all_tuples(vars, ev.vbl);
    const auto count = detail::uniform_between(rng, 1, static_cast<std::uint32_t>(std::max<std::size_t>(1, tuples.size() / 2)));
    for (std::uint32_t k = 0; k < count; ++k) std::swap(tuples[k], tuples[k + rng.below(tuples.size() - k)]);
    tuples.resize(count);
    ev.violating = std::move(tuples);
    events.push_back(std::move(ev));
  }
  return Instance(std::move(vars), std::move(events));
}

// Like random_instance, but each new event only keeps tuples that conflict
// with every violating tuple of the earlier events it shares variables with.
inline Instance random_extremal_instance(Rng& rng, const RandomInstanceParams& params = {}) {
  auto vars = detail::random_variables(rng, params);
  const auto n = static_cast<std::uint32_t>(vars.size());
  const std::uint32_t m = detail::uniform_between(rng, params.min_events, params.max_events);
  std::vector<EventSpec> events;
  for (EventId i = 0; i < m; ++i) {
    EventSpec ev{i, detail::random_subset(rng, n, detail::uniform_between(rng, 1, std::min(params.max_arity, n))), {}};
    std::vector<std::vector<Value>> candidates;
    for (auto& t : detail::all_tuples(vars, ev.vbl)) {
      bool ok = true;
      for (const auto& other : events) {
        const auto shared = detail::shared_positions(ev, other);
        if (shared.empty()) continue;
        for (const auto& u : other.violating)
          if (detail::tuples_agree(t, u, shared)) ok = false;
      }
      if (ok) candidates.push_back(std::move(t));
    }
    if (!candidates.empty()) {
      const auto count = detail::uniform_between(rng, 1, static_cast<std::uint32_t>(std::max<std::size_t>(1, candidates.size() / 2)));
      for (std::uint32_t k = 0; k < count; ++k) std::swap(candidates[k], candidates[k + rng.below(candidates.size() - k)]);
      candidates.resize(count);
    }
    ev.violating = std::move(candidates);
    events.push_back(std::move(ev));
  }
  return Instance(std::move(vars), std::move(events));
}

// Random k-CNF over n variables with clause widths in [1, max_width].
inline CnfFormula random_cnf(Rng& rng, std::uint32_t num_vars, std::uint32_t num_clauses, std::uint32_t max_width) {
  CnfFormula f;
  f.num_vars = num_vars;
  for (std::uint32_t c = 0; c < num_clauses; ++c) {
    const auto width = detail::uniform_between(rng, 1, std::min(max_width, num_vars));
    std::vector<Literal> clause;
    for (VarId v : detail::random_subset(rng, num_vars, width))
      clause.push_back(rng.below(2) ? static_cast<Literal>(v + 1) : -static_cast<Literal>(v + 1));
    f.clauses.push_back(std::move(clause));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Resampling-set properties

struct ResPropertyReport {
  std::uint64_t trials = 0;
  std::uint64_t containment_violations = 0;
  std::uint64_t unblocking_violations = 0;
  std::uint64_t stability_checks = 0;
  std::uint64_t stability_skipped = 0;  // no admissible re-randomisation found
  std::uint64_t stability_violations = 0;
  std::uint64_t extremal_trials = 0;
  std::uint64_t extremal_violations = 0;  // Res != Bad on an extremal instance
  std::uint64_t order_discrepancies = 0;  // Res differs under the sequential order (reported only)
  std::vector<nlohmann::json> counterexamples;
  bool pass = false;
};

inline nlohmann::json to_json(const ResPropertyReport& r) {
  return {{"trials", r.trials},
          {"containment_violations", r.containment_violations},
          {"unblocking_violations", r.unblocking_violations},
          {"stability_checks", r.stability_checks},
          {"stability_skipped", r.stability_skipped},
          {"stability_violations", r.stability_violations},
          {"extremal_trials", r.extremal_trials},
          {"extremal_violations", r.extremal_violations},
          {"order_discrepancies", r.order_discrepancies},
          {"counterexamples", r.counterexamples},
          {"pass", r.pass}};
}

struct ResPropertyParams {
  RandomInstanceParams instance;
  std::uint32_t cnf_max_vars = 8;
  std::uint32_t cnf_max_clauses = 7;
  std::uint32_t cnf_max_width = 3;
  std::uint32_t stability_attempts = 50;
  std::size_t max_counterexamples = 5;
};

struct ResTrialOutcome {
  bool extremal = false;
  bool containment_ok = true;
  bool unblocking_ok = true;
  int stability = 0;  // 1 checked ok, -1 violated, 0 skipped
  bool extremal_ok = true;
  bool order_agrees = true;
  nlohmann::json witness;
};

inline ResTrialOutcome res_property_trial(const Instance& instance, Rng& rng, std::uint32_t stability_attempts) {
  ResTrialOutcome out;
  const auto g = build_dependency_graph(instance);
  ResSelector selector(instance, g);
  const Assignment sigma = sample_product(instance, rng);
  const auto bad = bad_events(instance, sigma);
  const auto res = selector.select(sigma, bad);
  out.extremal = is_extremal(instance);

  out.containment_ok = std::includes(res.begin(), res.end(), bad.begin(), bad.end());
  const auto vars = variables_of(instance, res);
  std::vector<char> in_vars(instance.num_variables(), 0);
  for (VarId v : vars) in_vars[v] = 1;
  std::vector<char> in_res(instance.num_events(), 0);
  for (EventId i : res) in_res[i] = 1;
  const Assignment restricted = sigma.restricted_to(vars);
  for (EventId i = 0; i < instance.num_events(); ++i) {
    if (in_res[i]) continue;
    const auto& vbl = instance.event(i).vbl;
    const bool boundary = std::any_of(vbl.begin(), vbl.end(), [&](VarId v) { return in_vars[v] != 0; });
    if (boundary && compatible(instance.event(i), restricted)) out.unblocking_ok = false;
  }
  if (out.extremal) out.extremal_ok = res == bad;
  out.order_agrees = selector.select(sigma, bad, ResOrder::sequential_ascending) == res;

  // Re-randomise outside vbl(Res) until Bad(sigma') is inside Res.
  for (std::uint32_t attempt = 0; attempt < stability_attempts; ++attempt) {
    Assignment other = sigma;
    for (VarId v = 0; v < instance.num_variables(); ++v)
      if (!in_vars[v]) other[v] = instance.draw(v, rng);
    const auto bad2 = bad_events(instance, other);
    if (!std::includes(res.begin(), res.end(), bad2.begin(), bad2.end())) continue;
    out.stability = selector.select(other, bad2) == res ? 1 : -1;
    if (out.stability < 0) out.witness["sigma_prime"] = other.values();
    break;
  }
  if (!out.containment_ok || !out.unblocking_ok || out.stability < 0 || !out.extremal_ok) {
    out.witness["instance"] = instance_to_json(instance);
    out.witness["sigma"] = sigma.values();
    out.witness["res"] = res;
    out.witness["bad"] = bad;
  }
  return out;
}

// Alternates random general instances, random extremal instances and random CNF formulas.
inline ResPropertyReport res_set_property_tests(std::uint64_t trials, std::uint64_t base_seed,
                                                const ResPropertyParams& params = {}, unsigned threads = 0) {
  auto outcomes = run_batch(trials, base_seed, [&](std::uint64_t seed, std::size_t idx) {
    Rng rng(seed);
    Instance instance;
    switch (idx % 3) {
      case 0: instance = random_instance(rng, params.instance); break;
      case 1: instance = random_extremal_instance(rng, params.instance); break;
      default: {
        const auto nv = detail::uniform_between(rng, 2, params.cnf_max_vars);
        const auto nc = detail::uniform_between(rng, 1, params.cnf_max_clauses);
        instance = compile_cnf(random_cnf(rng, nv, nc, params.cnf_max_width));
      }
    }
    return res_property_trial(instance, rng, params.stability_attempts);
  }, threads);
  ResPropertyReport rep;
  rep.trials = trials;
  for (auto& o : outcomes) {
    rep.containment_violations += !o.containment_ok;
    rep.unblocking_violations += !o.unblocking_ok;
    rep.stability_checks += o.stability != 0;
    rep.stability_skipped += o.stability == 0;
    rep.stability_violations += o.stability < 0;
    rep.extremal_trials += o.extremal;
    rep.extremal_violations += !o.extremal_ok;
    rep.order_discrepancies += !o.order_agrees;
    if (!o.witness.empty() && rep.counterexamples.size() < params.max_counterexamples)
      rep.counterexamples.push_back(std::move(o.witness));
  }
  rep.pass = rep.containment_violations == 0 && rep.unblocking_violations == 0 && rep.stability_violations == 0 &&
             rep.extremal_violations == 0;
  return rep;
}

// ---------------------------------------------------------------------------
// Truncated sums over independent set sequences

struct TruncatedSumReport {
  std::size_t max_length = 0;
  std::vector<Rational> partial;
  Rational limit;      // 1 / q_empty
  Rational gap;        // limit - partial[L]
  double tail_bound = 0;  // (1 - q_empty)^L / q_empty
  bool monotone = false;
  bool within_bound = false;
  bool pass = false;
};

inline nlohmann::json to_json(const TruncatedSumReport& r) {
  return {{"L", r.max_length},
          {"partial", to_double(r.partial.back())},
          {"limit", to_string(r.limit)},
          {"gap", to_double(r.gap)},
          {"tail_bound", r.tail_bound},
          {"monotone", r.monotone},
          {"within_bound", r.within_bound},
          {"pass", r.pass}};
}

inline TruncatedSumReport truncated_sum_convergence_test(const DependencyGraph& g, std::span<const Rational> p,
                                                         std::size_t max_length) {
  if (g.m > 6) throw EnumerationLimit("truncated sum test supports at most 6 events");
  TruncatedSumReport rep;
  rep.max_length = max_length;
  const Rational q0 = q_empty(g, p);
  if (q0 <= 0) throw PreconditionError("Shearer condition fails: q_empty = " + to_string(q0) + " <= 0");
  rep.partial = truncated_log_sums(g, p, max_length);
  rep.limit = 1 / q0;
  rep.gap = rep.limit - rep.partial.back();
  rep.monotone = std::is_sorted(rep.partial.begin(), rep.partial.end());
  const Rational bound = rational_pow(1 - q0, static_cast<unsigned>(max_length)) / q0;
  rep.tail_bound = to_double(bound);
  rep.within_bound = rep.gap >= 0 && rep.gap <= bound;
  rep.pass = rep.monotone && rep.within_bound;
  return rep;
}

// ---------------------------------------------------------------------------
// Path endpoints by enumeration

inline PathEndpointMatrix endpoint_matrix_by_enumeration(unsigned k, const Rational& lambda) {
  if (k < 2 || k > 24) throw PreconditionError("endpoint enumeration supports 2 <= k <= 24");
  std::array<std::array<Rational, 2>, 2> w{};
  std::vector<Rational> lambda_pow(k + 1, Rational(1));
  for (unsigned i = 1; i <= k; ++i) lambda_pow[i] = lambda_pow[i - 1] * lambda;
  Rational z = 0;
  for (std::uint32_t s = 0; s < (std::uint32_t{1} << k); ++s) {
    if (s & (s >> 1)) continue;
    const Rational& weight = lambda_pow[std::popcount(s)];
    z += weight;
    w[s & 1][(s >> (k - 1)) & 1] += weight;
  }
  PathEndpointMatrix m{k, lambda, {}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m.w[i][j] = w[i][j] / z;
  return m;
}

// ---------------------------------------------------------------------------
// Round scaling

struct ScalingRow {
  std::size_t n = 0;
  std::size_t m = 0;  // events (edges for hard-core, vertices for sink-free)
  std::uint64_t trials = 0;
  double mean_rounds = 0;
  double se_rounds = 0;
  double mean_resamples_per_event = 0;
  double max_resamples_per_event = 0;
  // Summed over runs and rounds t with Bad_t nonempty.
  double bad_now = 0;
  double bad_next = 0;
};

struct ScalingReport {
  App app = App::hardcore;
  Rational lambda;
  unsigned degree = 3;
  bool condition_ok = false;
  std::vector<ScalingRow> rows;
  // mean_rounds ~ a + b log m
  double a = 0, b = 0;
  std::vector<double> residuals;
  double max_relative_residual = 0;
  // mean_rounds ~ a2 + b2 log m + c (log m)^2
  double c = 0, se_c = 0;
  bool super_logarithmic = false;  // c significantly positive (more than 3 standard errors)
  double max_resamples_per_event = 0;
  double decay = 0, decay_se = 0, decay_bound = 0;
  bool pass = false;
};

namespace detail {

// Least squares with columns of the design matrix given as functions of x.
inline std::vector<double> least_squares(const std::vector<std::vector<double>>& cols, const std::vector<double>& y,
                                         std::vector<double>* se = nullptr) {
  const std::size_t k = cols.size(), n = y.size();
  std::vector<std::vector<double>> a(k, std::vector<double>(k + 1 + k, 0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t r = 0; r < n; ++r) a[i][j] += cols[i][r] * cols[j][r];
    for (std::size_t r = 0; r < n; ++r) a[i][k] += cols[i][r] * y[r];
    a[i][k + 1 + i] = 1;
  }
  // Gauss-Jordan with the inverse carried alongside.
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    const double d = a[c][c];
    if (std::abs(d) < 1e-300) throw PreconditionError("least squares: singular design");
    for (auto& x : a[c]) x /= d;
    for (std::size_t r = 0; r < k; ++r)
      if (r != c) {
        const double f = a[r][c];
        for (std::size_t j = 0; j < a[r].size(); ++j) a[r][j] -= f * a[c][j];
      }
  }
  std::vector<double> beta(k);
  for (std::size_t i = 0; i < k; ++i) beta[i] = a[i][k];
  if (se) {
    double rss = 0;
    for (std::size_t r = 0; r < n; ++r) {
      double fit = 0;
      for (std::size_t i = 0; i < k; ++i) fit += beta[i] * cols[i][r];
      rss += (y[r] - fit) * (y[r] - fit);
    }
    const double s2 = n > k ? rss / static_cast<double>(n - k) : 0;
    se->assign(k, 0);
    for (std::size_t i = 0; i < k; ++i) (*se)[i] = std::sqrt(std::max(0.0, s2 * a[i][k + 1 + i]));
  }
  return beta;
}

}  // namespace detail

struct ScalingParams {
  App app = App::hardcore;
  Rational lambda = Rational(1, 10);
  unsigned degree = 3;
  std::vector<std::size_t> sizes;  // vertex counts
  std::uint64_t trials = 200;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> round_cap = kDefaultRoundCap;
  double max_resamples_per_event = 10;
  unsigned threads = 0;
};

// Each trial draws a fresh random regular graph and runs the specialised sampler on it.
inline ScalingReport round_scaling_experiment(const ScalingParams& params) {
  if (params.app == App::spanning_tree) throw PreconditionError("round scaling supports hardcore and sink-free");
  if (params.sizes.size() < 3) throw PreconditionError("round scaling needs at least three sizes");
  ScalingReport rep;
  rep.app = params.app;
  rep.lambda = params.lambda;
  rep.degree = params.degree;
  rep.condition_ok = params.app == App::hardcore ? hardcore_condition(params.lambda, params.degree) : true;
  const Rational occ = params.lambda / (1 + params.lambda);
  const Rational p = params.app == App::hardcore ? occ * occ : pow2(-static_cast<long>(params.degree));
  rep.decay_bound = (4 * kE * params.degree * params.degree - 1) * to_double(p);

  struct Trial {
    std::uint64_t rounds = 0, resamples = 0;
    double now = 0, next = 0;
  };
  double all_now = 0, all_next = 0;
  std::vector<double> cluster_now, cluster_next;
  for (std::size_t si = 0; si < params.sizes.size(); ++si) {
    const std::size_t n = params.sizes[si];
    ScalingRow row;
    row.n = n;
    row.m = params.app == App::hardcore ? n * params.degree / 2 : n;
    row.trials = params.trials;
    auto trials = run_batch(params.trials, derive_seed(params.seed, si), [&](std::uint64_t seed, std::size_t) {
      Rng graph_rng(derive_seed(seed, 0x9a7));
      const Graph g = random_regular_graph(n, params.degree, graph_rng);
      SamplerConfig c;
      c.seed = seed;
      c.round_cap = params.round_cap;
      const RunStats s = params.app == App::hardcore ? hardcore_sample(g, params.lambda, c).stats
                                                     : sink_popping(g, c).stats;
      Trial t{s.rounds, s.total_resamples, 0, 0};
      for (std::size_t k = 0; k + 1 < s.bad_per_round.size(); ++k) {
        t.now += static_cast<double>(s.bad_per_round[k]);
        t.next += static_cast<double>(s.bad_per_round[k + 1]);
      }
      return t;
    }, params.threads);
    std::vector<double> rounds;
    double res_sum = 0;
    for (const auto& t : trials) {
      rounds.push_back(static_cast<double>(t.rounds));
      const double per = static_cast<double>(t.resamples) / static_cast<double>(row.m);
      res_sum += per;
      row.max_resamples_per_event = std::max(row.max_resamples_per_event, per);
      row.bad_now += t.now;
      row.bad_next += t.next;
      cluster_now.push_back(t.now);
      cluster_next.push_back(t.next);
    }
    const auto mc = mean_check("rounds", Rational(0), rounds, 3);
    row.mean_rounds = mc.mean;
    row.se_rounds = mc.se;
    row.mean_resamples_per_event = res_sum / static_cast<double>(trials.size());
    all_now += row.bad_now;
    all_next += row.bad_next;
    rep.max_resamples_per_event = std::max(rep.max_resamples_per_event, row.mean_resamples_per_event);
    rep.rows.push_back(std::move(row));
  }

  std::vector<double> ones, lg, lg2, y;
  for (const auto& row : rep.rows) {
    ones.push_back(1);
    lg.push_back(std::log(static_cast<double>(row.m)));
    lg2.push_back(lg.back() * lg.back());
    y.push_back(row.mean_rounds);
  }
  const auto lin = detail::least_squares({ones, lg}, y);
  rep.a = lin[0];
  rep.b = lin[1];
  for (std::size_t i = 0; i < y.size(); ++i) {
    rep.residuals.push_back(y[i] - (rep.a + rep.b * lg[i]));
    rep.max_relative_residual = std::max(rep.max_relative_residual, std::abs(rep.residuals.back()) / y[i]);
  }
  std::vector<double> se;
  const auto quad = detail::least_squares({ones, lg, lg2}, y, &se);
  rep.c = quad[2];
  rep.se_c = se[2];
  rep.super_logarithmic = rep.c > 3 * rep.se_c + 1e-12;

  rep.decay = all_now > 0 ? all_next / all_now : 0;
  // Ratio estimator standard error with runs as clusters.
  if (all_now > 0 && cluster_now.size() > 1) {
    const double k = static_cast<double>(cluster_now.size());
    const double mean_now = all_now / k;
    double ss = 0;
    for (std::size_t i = 0; i < cluster_now.size(); ++i) {
      const double r = cluster_next[i] - rep.decay * cluster_now[i];
      ss += r * r;
    }
    rep.decay_se = std::sqrt(ss / (k * (k - 1))) / mean_now;
  }
  rep.pass = rep.condition_ok && rep.b >= 0 && !rep.super_logarithmic &&
             rep.max_resamples_per_event <= params.max_resamples_per_event &&
             rep.decay <= rep.decay_bound + 3 * rep.decay_se;
  return rep;
}

inline nlohmann::json to_json(const ScalingReport& r) {
  nlohmann::json j{{"lambda", to_string(r.lambda)},
                   {"degree", r.degree},
                   {"condition_ok", r.condition_ok},
                   {"fit", {{"a", r.a}, {"b", r.b}, {"residuals", r.residuals}, {"max_relative_residual", r.max_relative_residual}}},
                   {"curvature", {{"c", r.c}, {"se", r.se_c}, {"super_logarithmic", r.super_logarithmic}}},
                   {"max_resamples_per_event", r.max_resamples_per_event},
                   {"decay", {{"factor", r.decay}, {"se", r.decay_se}, {"bound", r.decay_bound}}},
                   {"pass", r.pass}};
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows)
    j["rows"].push_back({{"n", row.n}, {"m", row.m}, {"trials", row.trials}, {"mean_rounds", row.mean_rounds},
                         {"se_rounds", row.se_rounds}, {"mean_resamples_per_event", row.mean_resamples_per_event},
                         {"max_resamples_per_event", row.max_resamples_per_event}});
  return j;
}

inline std::string scaling_csv(const ScalingReport& r) {
  std::ostringstream out;
  out << "n,m,trials,mean_rounds,se_rounds,mean_resamples_per_event\n";
  for (const auto& row : r.rows)
    out << row.n << ',' << row.m << ',' << row.trials << ',' << row.mean_rounds << ',' << row.se_rounds << ','
        << row.mean_resamples_per_event << '\n';
  return out.str();
}

inline std::string disjoint_paths_csv(const DisjointPathsReport& r) {
  std::ostringstream out;
  out << "n,L,lambda,trial,rounds,resamples\n";
  for (std::size_t t = 0; t < r.rows.size(); ++t)
    out << r.n << ',' << r.path_length << ',' << to_string(r.lambda) << ',' << t << ',' << r.rows[t].rounds << ','
        << r.rows[t].resamples << '\n';
  return out.str();
}

inline nlohmann::json to_json(const DisjointPathsReport& r) {
  nlohmann::json j{{"n", r.n}, {"L", r.path_length}, {"lambda", to_string(r.lambda)}, {"trials", r.trials},
                   {"mean_rounds", r.mean_rounds}, {"p50_rounds", r.p50_rounds}, {"p90_rounds", r.p90_rounds},
                   {"p99_rounds", r.p99_rounds}, {"max_rounds", r.max_rounds}};
  j["endpoint_counts"] = r.endpoint_counts;
  if (r.exact) {
    nlohmann::json w = nlohmann::json::array();
    for (const auto& row : r.exact->w) w.push_back({to_string(row[0]), to_string(row[1])});
    j["exact_w"] = w;
    j["max_abs_z"] = r.max_abs_z;
  }
  return j;
}

}  // namespace prs
