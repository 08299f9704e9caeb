#pragma once

// Moser-Tardos resampling, partial rejection sampling for extremal
// instances, resampling-set selection, and general partial rejection
// sampling, all with run instrumentation.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "prs/errors.hpp"
#include "prs/model.hpp"
#include "prs/rng.hpp"

namespace prs {

enum class SamplerKind { moser_tardos, extremal_prs, general_prs };

inline std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::moser_tardos: return "moser_tardos";
    case SamplerKind::extremal_prs: return "extremal_prs";
    case SamplerKind::general_prs: return "general_prs";
  }
  return "?";
}

inline SamplerKind parse_sampler_kind(std::string_view name) {
  if (name == "moser_tardos" || name == "moser-tardos" || name == "mt") return SamplerKind::moser_tardos;
  if (name == "extremal_prs" || name == "extremal" || name == "prs") return SamplerKind::extremal_prs;
  if (name == "general_prs" || name == "general" || name == "gprs") return SamplerKind::general_prs;
  throw InputError("unknown sampler '" + std::string(name) + "'");
}

inline constexpr std::uint64_t kDefaultRoundCap = 1'000'000;

struct SamplerConfig {
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> round_cap = kDefaultRoundCap;  // nullopt: unlimited
  SamplerKind kind = SamplerKind::general_prs;
  bool record_log = false;
  // extremal_prs verifies extremality first; disable only for negative tests.
  bool check_extremal = true;
};

struct RunStats {
  std::uint64_t rounds = 0;
  std::uint64_t total_resamples = 0;      // T
  std::vector<std::uint64_t> per_event;   // T_i
  std::uint64_t variable_resamples = 0;
  bool halted = false;
  std::vector<std::vector<EventId>> log;  // resampling set per round, if recorded
  std::vector<std::uint64_t> bad_per_round;  // |Bad| before each round, plus the final 0

  void record_round(const std::vector<EventId>& resampled, std::size_t bad_count, bool keep_log) {
    ++rounds;
    total_resamples += resampled.size();
    for (EventId i : resampled) ++per_event[i];
    bad_per_round.push_back(bad_count);
    if (keep_log) log.push_back(resampled);
  }
};

inline nlohmann::json to_json(const RunStats& s, bool include_log = false) {
  nlohmann::json j{{"rounds", s.rounds},
                   {"total_resamples", s.total_resamples},
                   {"per_event", s.per_event},
                   {"variable_resamples", s.variable_resamples},
                   {"halted", s.halted}};
  if (include_log) j["log"] = s.log;
  return j;
}

struct SampleResult {
  Assignment assignment;
  RunStats stats;
};

enum class ResOrder {
  bfs_rounds,            // boundary events checked against R as of the round start
  sequential_ascending,  // smallest unmarked boundary event first, R updated immediately
};

// Computes Res(sigma). Holds scratch buffers so repeated calls on one
// instance stay proportional to the size of the result.
class ResSelector {
 public:
  ResSelector(const Instance& instance, const DependencyGraph& graph)
      : instance_(instance), graph_(graph),
        mark_(graph.m, 0), var_in_r_(instance.num_variables(), 0) {}

  std::vector<EventId> select(const Assignment& sigma, const std::vector<EventId>& bad,
                              ResOrder order = ResOrder::bfs_rounds) {
    std::vector<EventId> result = order == ResOrder::bfs_rounds ? select_rounds(sigma, bad)
                                                                : select_sequential(sigma, bad);
    for (EventId i : touched_) mark_[i] = 0;
    for (VarId v : vars_) var_in_r_[v] = 0;
    touched_.clear();
    vars_.clear();
    std::sort(result.begin(), result.end());
    return result;
  }

 private:
  static constexpr char kInR = 1;
  static constexpr char kInN = 2;

  void add_to_r(EventId i, std::vector<EventId>& r) {
    mark_[i] = kInR;
    touched_.push_back(i);
    r.push_back(i);
  }
  void cover_vars(EventId i) {
    for (VarId v : instance_.event(i).vbl)
      if (!var_in_r_[v]) {
        var_in_r_[v] = 1;
        vars_.push_back(v);
      }
  }
  // A_i agrees with sigma restricted to vbl(R) for some violating tuple.
  bool compatible_with_r(EventId i, const Assignment& sigma) const {
    const auto& ev = instance_.event(i);
    for (const auto& t : ev.violating) {
      bool agrees = true;
      for (std::size_t k = 0; k < ev.vbl.size() && agrees; ++k) {
        const VarId v = ev.vbl[k];
        if (var_in_r_[v] && sigma[v] != t[k]) agrees = false;
      }
      if (agrees) return true;
    }
    return false;
  }

  std::vector<EventId> select_rounds(const Assignment& sigma, const std::vector<EventId>& bad) {
    std::vector<EventId> r;
    for (EventId i : bad) add_to_r(i, r);
    for (EventId i : bad) cover_vars(i);
    std::vector<EventId> newly = bad;
    std::vector<EventId> frontier;
    while (!newly.empty()) {
      frontier.clear();
      for (EventId i : newly)
        for (EventId j : graph_.adjacency[i])
          if (mark_[j] == 0) frontier.push_back(j);
      std::sort(frontier.begin(), frontier.end());
      frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
      newly.clear();
      for (EventId j : frontier) {
        if (compatible_with_r(j, sigma)) {
          newly.push_back(j);
        } else {
          mark_[j] = kInN;
          touched_.push_back(j);
        }
      }
      for (EventId j : newly) add_to_r(j, r);
      for (EventId j : newly) cover_vars(j);
    }
    return r;
  }

  std::vector<EventId> select_sequential(const Assignment& sigma, const std::vector<EventId>& bad) {
    std::vector<EventId> r;
    for (EventId i : bad) add_to_r(i, r);
    for (EventId i : bad) cover_vars(i);
    while (true) {
      std::optional<EventId> pick;
      for (EventId i : r)
        for (EventId j : graph_.adjacency[i])
          if (mark_[j] == 0 && (!pick || j < *pick)) pick = j;
      if (!pick) break;
      if (compatible_with_r(*pick, sigma)) {
        add_to_r(*pick, r);
        cover_vars(*pick);
      } else {
        mark_[*pick] = kInN;
        touched_.push_back(*pick);
      }
    }
    return r;
  }

  const Instance& instance_;
  const DependencyGraph& graph_;
  std::vector<char> mark_;
  std::vector<char> var_in_r_;
  std::vector<EventId> touched_;
  std::vector<VarId> vars_;
};

inline std::vector<EventId> select_resampling_set(const Instance& instance, const DependencyGraph& graph,
                                                  const Assignment& sigma, ResOrder order = ResOrder::bfs_rounds) {
  ResSelector selector(instance, graph);
  return selector.select(sigma, bad_events(instance, sigma), order);
}

// vbl(S), ascending.
inline std::vector<VarId> variables_of(const Instance& instance, const std::vector<EventId>& events) {
  std::vector<VarId> vars;
  for (EventId i : events) {
    const auto& vbl = instance.event(i).vbl;
    vars.insert(vars.end(), vbl.begin(), vbl.end());
  }
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

namespace detail {

inline void check_cap(const SamplerConfig& config, const RunStats& stats) {
  if (config.round_cap && stats.rounds >= *config.round_cap) throw CapExceeded(stats.rounds);
}

// Redraws vars (ascending) and returns the events now occurring among those
// touching them.
inline std::vector<EventId> resample_and_recheck(const Instance& instance, const std::vector<EventId>& res,
                                                 const std::vector<VarId>& vars, Assignment& sigma, Rng& rng,
                                                 RunStats& stats) {
  for (VarId v : vars) sigma[v] = instance.draw(v, rng);
  stats.variable_resamples += vars.size();
  // res itself is included for events with an empty vbl.
  std::vector<EventId> touched = res;
  for (VarId v : vars) {
    const auto& evs = instance.events_of(v);
    touched.insert(touched.end(), evs.begin(), evs.end());
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  std::vector<EventId> bad;
  for (EventId i : touched)
    if (occurs(instance.event(i), sigma)) bad.push_back(i);
  return bad;
}

// Shared driver for the two round-based samplers. Every previously bad event
// lies in the resampled set, so the new bad set is found among touched events.
template <class ChooseSet>
SampleResult run_rounds(const Instance& instance, const SamplerConfig& config, ChooseSet&& choose) {
  Rng rng(config.seed);
  SampleResult out;
  out.stats.per_event.assign(instance.num_events(), 0);
  out.assignment = sample_product(instance, rng);
  std::vector<EventId> bad = bad_events(instance, out.assignment);
  while (!bad.empty()) {
    check_cap(config, out.stats);
    std::vector<EventId> res = choose(out.assignment, bad);
    out.stats.record_round(res, bad.size(), config.record_log);
    bad = resample_and_recheck(instance, res, variables_of(instance, res), out.assignment, rng, out.stats);
  }
  out.stats.bad_per_round.push_back(0);
  out.stats.halted = true;
  return out;
}

}  // namespace detail

inline SampleResult extremal_prs(const Instance& instance, const SamplerConfig& config) {
  if (config.check_extremal && !is_extremal(instance))
    throw PreconditionError("extremal_prs: instance is not extremal (dependent events can co-occur)");
  return detail::run_rounds(instance, config,
                            [](const Assignment&, const std::vector<EventId>& bad) { return bad; });
}

inline SampleResult general_prs(const Instance& instance, const SamplerConfig& config) {
  const auto graph = build_dependency_graph(instance);
  ResSelector selector(instance, graph);
  return detail::run_rounds(instance, config, [&](const Assignment& sigma, const std::vector<EventId>& bad) {
    return selector.select(sigma, bad);
  });
}

inline SampleResult moser_tardos(const Instance& instance, const SamplerConfig& config) {
  Rng rng(config.seed);
  SampleResult out;
  out.stats.per_event.assign(instance.num_events(), 0);
  out.assignment = sample_product(instance, rng);

  // Occurring events in a swap-remove vector with position index.
  constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
  std::vector<EventId> bad;
  std::vector<std::size_t> pos(instance.num_events(), kAbsent);
  auto set_bad = [&](EventId i, bool now_bad) {
    if (now_bad && pos[i] == kAbsent) {
      pos[i] = bad.size();
      bad.push_back(i);
    } else if (!now_bad && pos[i] != kAbsent) {
      const EventId last = bad.back();
      bad[pos[i]] = last;
      pos[last] = pos[i];
      bad.pop_back();
      pos[i] = kAbsent;
    }
  };
  for (EventId i : bad_events(instance, out.assignment)) set_bad(i, true);

  while (!bad.empty()) {
    detail::check_cap(config, out.stats);
    // Uniform choice over occurring events, independent of storage order.
    std::vector<EventId> sorted = bad;
    std::sort(sorted.begin(), sorted.end());
    const EventId pick = sorted[rng.below(sorted.size())];
    out.stats.record_round({pick}, bad.size(), config.record_log);
    const auto& vbl = instance.event(pick).vbl;
    std::vector<VarId> vars(vbl.begin(), vbl.end());
    std::sort(vars.begin(), vars.end());
    for (VarId v : vars) out.assignment[v] = instance.draw(v, rng);
    out.stats.variable_resamples += vars.size();
    for (VarId v : vars)
      for (EventId i : instance.events_of(v)) set_bad(i, occurs(instance.event(i), out.assignment));
    if (vars.empty()) set_bad(pick, occurs(instance.event(pick), out.assignment));
  }
  out.stats.bad_per_round.push_back(0);
  out.stats.halted = true;
  return out;
}

inline SampleResult sample(const Instance& instance, const SamplerConfig& config) {
  switch (config.kind) {
    case SamplerKind::moser_tardos: return moser_tardos(instance, config);
    case SamplerKind::extremal_prs: return extremal_prs(instance, config);
    case SamplerKind::general_prs: return general_prs(instance, config);
  }
  throw PreconditionError("unknown sampler kind");
}

}  // namespace prs
