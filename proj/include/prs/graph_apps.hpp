#pragma once

// Specialised samplers for sink-free orientations (sink popping), rooted
// spanning trees (cycle popping) and hard-core configurations, the path
// endpoint analytics for the hard-core model, and encoders that express each
// application as a generic variable-framework instance.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "prs/errors.hpp"
#include "prs/graph.hpp"
#include "prs/model.hpp"
#include "prs/parallel.hpp"
#include "prs/rational.hpp"
#include "prs/rng.hpp"
#include "prs/sampler.hpp"

namespace prs {

inline constexpr Vertex kNoVertex = UINT32_MAX;

// Per-edge direction: 0 points the edge at its higher endpoint, 1 at its lower one.
struct Orientation {
  std::vector<Value> direction;

  Vertex head(const Graph& g, std::uint32_t e) const {
    const auto [u, v] = g.edges()[e];
    return direction[e] == 0 ? v : u;
  }
  Vertex tail(const Graph& g, std::uint32_t e) const {
    const auto [u, v] = g.edges()[e];
    return direction[e] == 0 ? u : v;
  }
  friend bool operator==(const Orientation&, const Orientation&) = default;
};

// successor[v] for v != root; successor[root] == kNoVertex.
struct ArrowMap {
  Vertex root = 0;
  std::vector<Vertex> successor;
  friend bool operator==(const ArrowMap&, const ArrowMap&) = default;
};

struct HardcoreConfig {
  std::vector<Value> occupied;  // 0/1 per vertex
  friend bool operator==(const HardcoreConfig&, const HardcoreConfig&) = default;
};

template <class T>
struct AppResult {
  T value;
  RunStats stats;
};

// ---------------------------------------------------------------------------
// Sink popping

inline bool is_sink(const Graph& g, const Orientation& o, Vertex v) {
  for (const auto& inc : g.incident(v))
    if (o.head(g, inc.edge) != v) return false;
  return true;
}

inline std::vector<Vertex> sinks(const Graph& g, const Orientation& o) {
  std::vector<Vertex> out;
  for (Vertex v = 0; v < g.num_vertices(); ++v)
    if (is_sink(g, o, v)) out.push_back(v);
  return out;
}

inline AppResult<Orientation> sink_popping(const Graph& g, const SamplerConfig& config) {
  Rng rng(config.seed);
  const Rational half(1, 2);
  const std::vector<Rational> fair{half, half};
  const auto table = cumulative_table(fair);
  AppResult<Orientation> out;
  out.stats.per_event.assign(g.num_vertices(), 0);
  out.value.direction.resize(g.num_edges());
  for (auto& d : out.value.direction) d = static_cast<Value>(draw_index(table, rng));

  std::vector<Vertex> current = sinks(g, out.value);
  std::vector<std::uint32_t> edges;
  std::vector<Vertex> check;
  while (!current.empty()) {
    detail::check_cap(config, out.stats);
    out.stats.record_round(current, current.size(), config.record_log);
    edges.clear();
    for (Vertex v : current)
      for (const auto& inc : g.incident(v)) edges.push_back(inc.edge);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (auto e : edges) out.value.direction[e] = static_cast<Value>(draw_index(table, rng));
    out.stats.variable_resamples += edges.size();
    check = current;  // isolated sinks stay sinks
    for (auto e : edges) {
      check.push_back(g.edges()[e].first);
      check.push_back(g.edges()[e].second);
    }
    std::sort(check.begin(), check.end());
    check.erase(std::unique(check.begin(), check.end()), check.end());
    current.clear();
    for (Vertex v : check)
      if (is_sink(g, out.value, v)) current.push_back(v);
  }
  out.stats.bad_per_round.push_back(0);
  out.stats.halted = true;
  return out;
}

// ---------------------------------------------------------------------------
// Cycle popping

namespace detail {

class UniformNeighbourTables {
 public:
  const std::vector<double>& for_degree(std::size_t deg) {
    auto it = tables_.find(deg);
    if (it == tables_.end()) {
      std::vector<Rational> w(deg, Rational(1, static_cast<unsigned long>(deg)));
      it = tables_.emplace(deg, cumulative_table(w)).first;
    }
    return it->second;
  }

 private:
  std::map<std::size_t, std::vector<double>> tables_;
};

}  // namespace detail

// Vertices on directed cycles of the arrow map, ascending, and the number of cycles.
inline std::pair<std::vector<Vertex>, std::size_t> cycle_vertices(const ArrowMap& arrows) {
  const std::size_t n = arrows.successor.size();
  std::vector<std::uint32_t> stamp(n, 0);
  std::vector<Vertex> on_cycle;
  std::size_t cycles = 0;
  std::uint32_t walk = 0;
  std::vector<Vertex> path;
  for (Vertex s = 0; s < n; ++s) {
    if (s == arrows.root || stamp[s] != 0) continue;
    ++walk;
    path.clear();
    Vertex v = s;
    while (v != arrows.root && stamp[v] == 0) {
      stamp[v] = walk;
      path.push_back(v);
      v = arrows.successor[v];
    }
    if (v != arrows.root && stamp[v] == walk) {
      ++cycles;
      auto start = std::find(path.begin(), path.end(), v);
      on_cycle.insert(on_cycle.end(), start, path.end());
    }
  }
  std::sort(on_cycle.begin(), on_cycle.end());
  return {on_cycle, cycles};
}

inline bool is_rooted_spanning_tree(const Graph& g, const ArrowMap& arrows) {
  if (arrows.successor.size() != g.num_vertices() || arrows.root >= g.num_vertices()) return false;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    if (v == arrows.root) {
      if (arrows.successor[v] != kNoVertex) return false;
      continue;
    }
    const auto& inc = g.incident(v);
    if (std::none_of(inc.begin(), inc.end(), [&](const auto& i) { return i.neighbour == arrows.successor[v]; }))
      return false;
  }
  return cycle_vertices(arrows).first.empty();
}

inline AppResult<ArrowMap> cycle_popping(const Graph& g, Vertex root, const SamplerConfig& config) {
  if (root >= g.num_vertices()) throw InputError("cycle_popping: root out of range");
  if (!g.connected()) throw InputError("cycle_popping: graph is disconnected");
  Rng rng(config.seed);
  detail::UniformNeighbourTables tables;
  AppResult<ArrowMap> out;
  out.value.root = root;
  out.value.successor.assign(g.num_vertices(), kNoVertex);
  auto redraw = [&](Vertex v) {
    const auto& inc = g.incident(v);
    out.value.successor[v] = inc[draw_index(tables.for_degree(inc.size()), rng)].neighbour;
  };
  for (Vertex v = 0; v < g.num_vertices(); ++v)
    if (v != root) redraw(v);

  while (true) {
    auto [on_cycle, cycles] = cycle_vertices(out.value);
    if (cycles == 0) break;
    detail::check_cap(config, out.stats);
    ++out.stats.rounds;
    out.stats.total_resamples += cycles;
    out.stats.bad_per_round.push_back(cycles);
    if (config.record_log) out.stats.log.push_back(on_cycle);
    for (Vertex v : on_cycle) redraw(v);
    out.stats.variable_resamples += on_cycle.size();
  }
  out.stats.bad_per_round.push_back(0);
  out.stats.halted = true;
  return out;
}

// ---------------------------------------------------------------------------
// Hard-core model

// Vertices in occupied components of size at least two.
inline std::vector<Vertex> bad_vertices(const Graph& g, const HardcoreConfig& c) {
  std::vector<Vertex> out;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    if (!c.occupied[v]) continue;
    const auto& inc = g.incident(v);
    if (std::any_of(inc.begin(), inc.end(), [&](const auto& i) { return c.occupied[i.neighbour] != 0; }))
      out.push_back(v);
  }
  return out;
}

// BadVtx together with its (necessarily unoccupied) boundary.
inline std::vector<Vertex> res_vertices(const Graph& g, const HardcoreConfig& c) {
  std::vector<Vertex> out = bad_vertices(g, c);
  const std::size_t nbad = out.size();
  for (std::size_t k = 0; k < nbad; ++k)
    for (const auto& inc : g.incident(out[k])) out.push_back(inc.neighbour);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline bool is_independent_set(const Graph& g, const HardcoreConfig& c) {
  for (const auto& [u, v] : g.edges())
    if (c.occupied[u] && c.occupied[v]) return false;
  return true;
}

inline std::vector<Rational> hardcore_weights(const Rational& lambda) {
  return {Rational(1) / (1 + lambda), lambda / (1 + lambda)};
}

inline AppResult<HardcoreConfig> hardcore_sample(const Graph& g, const Rational& lambda, const SamplerConfig& config) {
  if (lambda <= 0) throw PreconditionError("hardcore_sample: lambda must be positive");
  Rng rng(config.seed);
  const auto table = cumulative_table(hardcore_weights(lambda));
  AppResult<HardcoreConfig> out;
  auto& occ = out.value.occupied;
  occ.resize(g.num_vertices());
  for (auto& x : occ) x = static_cast<Value>(draw_index(table, rng));
  out.stats.per_event.assign(g.num_edges(), 0);

  std::vector<std::uint32_t> bad_edges;
  for (std::uint32_t e = 0; e < g.num_edges(); ++e)
    if (occ[g.edges()[e].first] && occ[g.edges()[e].second]) bad_edges.push_back(e);

  std::vector<char> in_bad(g.num_vertices(), 0);
  std::vector<Vertex> bad_vtx, res_vtx;
  std::vector<std::uint32_t> res_edges, candidates;
  while (!bad_edges.empty()) {
    detail::check_cap(config, out.stats);
    bad_vtx.clear();
    for (auto e : bad_edges)
      for (Vertex v : {g.edges()[e].first, g.edges()[e].second})
        if (!in_bad[v]) {
          in_bad[v] = 1;
          bad_vtx.push_back(v);
        }
    // Resampled events: every edge with an endpoint in BadVtx.
    res_edges.clear();
    res_vtx = bad_vtx;
    for (Vertex v : bad_vtx)
      for (const auto& inc : g.incident(v)) {
        res_edges.push_back(inc.edge);
        res_vtx.push_back(inc.neighbour);
      }
    std::sort(res_edges.begin(), res_edges.end());
    res_edges.erase(std::unique(res_edges.begin(), res_edges.end()), res_edges.end());
    std::sort(res_vtx.begin(), res_vtx.end());
    res_vtx.erase(std::unique(res_vtx.begin(), res_vtx.end()), res_vtx.end());
    for (Vertex v : bad_vtx) in_bad[v] = 0;

    out.stats.record_round(res_edges, bad_edges.size(), config.record_log);
    for (Vertex v : res_vtx) occ[v] = static_cast<Value>(draw_index(table, rng));
    out.stats.variable_resamples += res_vtx.size();

    candidates.clear();
    for (Vertex v : res_vtx)
      for (const auto& inc : g.incident(v)) candidates.push_back(inc.edge);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    bad_edges.clear();
    for (auto e : candidates)
      if (occ[g.edges()[e].first] && occ[g.edges()[e].second]) bad_edges.push_back(e);
  }
  out.stats.bad_per_round.push_back(0);
  out.stats.halted = true;
  return out;
}

// lambda <= 1 / (2 sqrt(e) d - 1), i.e. 4 e d^2 lambda^2 <= (1 + lambda)^2.
inline bool hardcore_condition(const Rational& lambda, unsigned d) {
  if (d < 1) throw PreconditionError("hardcore_condition requires d >= 1");
  if (lambda <= 0) return true;
  const Rational coef = Rational(4 * d * d) * lambda * lambda;
  return certified_leq_in_e([&](const Rational& e) { return Rational(coef * e); }, (1 + lambda) * (1 + lambda));
}

// ---------------------------------------------------------------------------
// Bounds on the ratio Z_1 / Z_0

struct RatioBounds {
  bool sink_applicable = false;  // connected and not a tree
  std::uint64_t sink_bound = 0;  // n (n - 1)
  bool tree_applicable = false;  // connected
  std::uint64_t tree_bound = 0;  // m n
};

inline RatioBounds ratio_bounds(const Graph& g) {
  RatioBounds b;
  const std::uint64_t n = g.num_vertices();
  const std::uint64_t m = g.num_edges();
  const bool connected = g.connected() && n > 0;
  b.sink_applicable = connected && !g.is_forest();
  b.sink_bound = n * (n == 0 ? 0 : n - 1);
  b.tree_applicable = connected;
  b.tree_bound = m * n;
  return b;
}

// ---------------------------------------------------------------------------
// Path endpoint analytics

// Hard-core partition function of the path on k vertices.
inline Rational path_partition(unsigned k, const Rational& lambda) {
  Rational prev = 1, cur = 1 + lambda;  // I_0, I_1
  if (k == 0) return prev;
  for (unsigned i = 2; i <= k; ++i) {
    Rational next = cur + lambda * prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

struct PathEndpointMatrix {
  unsigned k = 0;
  Rational lambda;
  std::array<std::array<Rational, 2>, 2> w;  // w[i][j] = Pr(sigma(u) = i, sigma(v) = j)

  Rational det() const { return w[0][0] * w[1][1] - w[0][1] * w[1][0]; }
};

inline PathEndpointMatrix endpoint_matrix(unsigned k, const Rational& lambda) {
  if (k < 4) throw PreconditionError("endpoint_matrix requires k >= 4");
  const Rational ik = path_partition(k, lambda);
  PathEndpointMatrix m{k, lambda, {}};
  m.w[0][0] = path_partition(k - 2, lambda) / ik;
  m.w[0][1] = lambda * path_partition(k - 3, lambda) / ik;
  m.w[1][0] = m.w[0][1];
  m.w[1][1] = lambda * lambda * path_partition(k - 4, lambda) / ik;
  return m;
}

// det [[I_{k-2}, I_{k-3}], [I_{k-3}, I_{k-4}]].
inline Rational det_w_prime(unsigned k, const Rational& lambda) {
  if (k < 4) throw PreconditionError("det_w_prime requires k >= 4");
  const Rational a = path_partition(k - 2, lambda), b = path_partition(k - 3, lambda),
                 c = path_partition(k - 4, lambda);
  return a * c - b * b;
}

inline double alpha(double lambda) {
  if (!(lambda > 0)) throw PreconditionError("alpha requires lambda > 0");
  return 2 * lambda / (2 * lambda + std::sqrt(4 * lambda + 1) + 1);
}

// ---------------------------------------------------------------------------
// Generic encodings

// Variables are edges (value as in Orientation); event v occurs when v is a sink.
inline Instance sink_free_instance(const Graph& g) {
  std::vector<VariableSpec> vars;
  for (std::uint32_t e = 0; e < g.num_edges(); ++e) vars.push_back(VariableSpec::uniform(e, 2));
  std::vector<EventSpec> events;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    EventSpec ev{v, {}, {{}}};
    for (const auto& inc : g.incident(v)) ev.vbl.push_back(inc.edge);
    std::sort(ev.vbl.begin(), ev.vbl.end());
    for (auto e : ev.vbl) ev.violating[0].push_back(g.edges()[e].second == v ? 0 : 1);
    events.push_back(std::move(ev));
  }
  return Instance(std::move(vars), std::move(events), std::max(kDefaultMaxEventArity, g.max_degree()));
}

inline Instance hardcore_instance(const Graph& g, const Rational& lambda) {
  std::vector<VariableSpec> vars;
  for (Vertex v = 0; v < g.num_vertices(); ++v) vars.push_back(VariableSpec{v, 2, hardcore_weights(lambda)});
  std::vector<EventSpec> events;
  for (std::uint32_t e = 0; e < g.num_edges(); ++e)
    events.push_back(occupied_edge_event(e, g.edges()[e].first, g.edges()[e].second));
  return Instance(std::move(vars), std::move(events));
}

inline constexpr std::size_t kMaxCycleSpace = 20;
inline constexpr std::size_t kMaxEncodedCycles = 200'000;

// Variables are the non-root vertices in ascending order, each ranging over
// its sorted neighbour list; one event per directed cycle avoiding the root.
struct SpanningTreeEncoding {
  Instance instance;
  Vertex root = 0;
  std::vector<Vertex> vertex_of_var;
  std::vector<std::uint32_t> var_of_vertex;  // UINT32_MAX for the root

  ArrowMap arrows(const Graph& g, const Assignment& sigma) const {
    ArrowMap a{root, std::vector<Vertex>(g.num_vertices(), kNoVertex)};
    for (std::uint32_t x = 0; x < vertex_of_var.size(); ++x) {
      const Vertex v = vertex_of_var[x];
      a.successor[v] = g.incident(v)[sigma[x]].neighbour;
    }
    return a;
  }

  // Inverse of arrows(): neighbour positions of each non-root vertex's successor.
  Assignment assignment(const Graph& g, const ArrowMap& a) const {
    std::vector<Value> vals(vertex_of_var.size(), 0);
    for (std::uint32_t x = 0; x < vertex_of_var.size(); ++x) {
      const auto& inc = g.incident(vertex_of_var[x]);
      for (std::size_t k = 0; k < inc.size(); ++k)
        if (inc[k].neighbour == a.successor[vertex_of_var[x]]) vals[x] = static_cast<Value>(k);
    }
    return Assignment(std::move(vals));
  }
};

inline SpanningTreeEncoding spanning_tree_instance(const Graph& g, Vertex root) {
  if (root >= g.num_vertices()) throw InputError("spanning tree encoding: root out of range");
  if (!g.connected()) throw InputError("spanning tree encoding: graph is disconnected");
  if (g.cyclomatic_number() > kMaxCycleSpace)
    throw EnumerationLimit("spanning tree encoding: cycle space too large (" +
                           std::to_string(g.cyclomatic_number()) + " > " + std::to_string(kMaxCycleSpace) + ")");
  SpanningTreeEncoding enc;
  enc.root = root;
  enc.var_of_vertex.assign(g.num_vertices(), UINT32_MAX);
  std::vector<VariableSpec> vars;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    if (v == root) continue;
    const auto id = static_cast<VarId>(vars.size());
    enc.var_of_vertex[v] = id;
    enc.vertex_of_var.push_back(v);
    vars.push_back(VariableSpec::uniform(id, static_cast<std::uint32_t>(g.degree(v))));
  }
  auto neighbour_index = [&](Vertex v, Vertex w) {
    const auto& inc = g.incident(v);
    for (std::size_t k = 0; k < inc.size(); ++k)
      if (inc[k].neighbour == w) return static_cast<Value>(k);
    throw std::logic_error("not adjacent");
  };

  std::vector<EventSpec> events;
  auto add_cycle = [&](const std::vector<Vertex>& cyc) {
    if (events.size() >= kMaxEncodedCycles) throw EnumerationLimit("spanning tree encoding: too many cycles");
    std::vector<std::pair<VarId, Value>> entries;
    for (std::size_t k = 0; k < cyc.size(); ++k)
      entries.emplace_back(enc.var_of_vertex[cyc[k]], neighbour_index(cyc[k], cyc[(k + 1) % cyc.size()]));
    std::sort(entries.begin(), entries.end());
    EventSpec ev{static_cast<EventId>(events.size()), {}, {{}}};
    for (auto [x, val] : entries) {
      ev.vbl.push_back(x);
      ev.violating[0].push_back(val);
    }
    events.push_back(std::move(ev));
  };
  // Directed cycles whose smallest vertex is s: 2-cycles on each edge, and
  // longer simple cycles found by DFS in both directions.
  std::vector<char> on_path(g.num_vertices(), 0);
  std::vector<Vertex> path;
  for (Vertex s = 0; s < g.num_vertices(); ++s) {
    if (s == root) continue;
    for (const auto& inc : g.incident(s))
      if (inc.neighbour > s && inc.neighbour != root) add_cycle({s, inc.neighbour});
    path = {s};
    on_path[s] = 1;
    auto dfs = [&](auto&& self, Vertex v) -> void {
      for (const auto& inc : g.incident(v)) {
        const Vertex w = inc.neighbour;
        if (w == s && path.size() >= 3) add_cycle(path);
        if (w <= s || w == root || on_path[w]) continue;
        on_path[w] = 1;
        path.push_back(w);
        self(self, w);
        path.pop_back();
        on_path[w] = 0;
      }
    };
    dfs(dfs, s);
    on_path[s] = 0;
  }
  enc.instance = Instance(std::move(vars), std::move(events), std::max(kDefaultMaxEventArity, g.num_vertices()));
  return enc;
}

enum class App { sink_free, spanning_tree, hardcore };

inline App parse_app(std::string_view name) {
  if (name == "sink-free" || name == "sink_free") return App::sink_free;
  if (name == "spanning-tree" || name == "spanning_tree") return App::spanning_tree;
  if (name == "hardcore" || name == "hard-core") return App::hardcore;
  throw InputError("unknown app '" + std::string(name) + "'");
}

struct AppParameters {
  Vertex root = 0;
  Rational lambda = 1;
};

inline Instance encode_as_instance(App app, const Graph& g, const AppParameters& params = {}) {
  switch (app) {
    case App::sink_free: return sink_free_instance(g);
    case App::spanning_tree: return spanning_tree_instance(g, params.root).instance;
    case App::hardcore: return hardcore_instance(g, params.lambda);
  }
  throw PreconditionError("unknown app");
}

// ---------------------------------------------------------------------------
// Disjoint paths experiment

struct DisjointPathsTrial {
  std::uint64_t rounds = 0;
  std::uint64_t resamples = 0;
};

struct DisjointPathsReport {
  std::size_t n = 0, path_length = 0, trials = 0;
  Rational lambda;
  std::vector<DisjointPathsTrial> rows;
  double mean_rounds = 0;
  std::uint64_t p50_rounds = 0, p90_rounds = 0, p99_rounds = 0, max_rounds = 0;
  std::array<std::array<std::uint64_t, 2>, 2> endpoint_counts{};  // over all paths and trials
  std::optional<PathEndpointMatrix> exact;                        // when path_length >= 4
  double max_abs_z = 0;  // largest |empirical - exact| / sigma over the four cells
};

inline DisjointPathsReport disjoint_paths_experiment(std::size_t n, std::size_t path_length, const Rational& lambda,
                                                     std::size_t trials, const SamplerConfig& config,
                                                     unsigned threads = 0) {
  if (path_length == 0 || n % path_length != 0) throw PreconditionError("disjoint_paths_experiment: L must divide n");
  const Graph g = disjoint_paths(n / path_length, path_length);
  struct Trial {
    DisjointPathsTrial row;
    std::array<std::array<std::uint64_t, 2>, 2> counts{};
  };
  auto results = run_batch(trials, config.seed, [&](std::uint64_t seed, std::size_t) {
    SamplerConfig c = config;
    c.seed = seed;
    c.record_log = false;
    auto r = hardcore_sample(g, lambda, c);
    Trial t;
    t.row = {r.stats.rounds, r.stats.total_resamples};
    for (std::size_t p = 0; p < n / path_length; ++p) {
      const auto u = r.value.occupied[p * path_length];
      const auto v = r.value.occupied[p * path_length + path_length - 1];
      ++t.counts[u][v];
    }
    return t;
  }, threads);

  DisjointPathsReport rep;
  rep.n = n;
  rep.path_length = path_length;
  rep.trials = trials;
  rep.lambda = lambda;
  std::vector<std::uint64_t> rounds;
  double sum = 0;
  for (const auto& t : results) {
    rep.rows.push_back(t.row);
    rounds.push_back(t.row.rounds);
    sum += static_cast<double>(t.row.rounds);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) rep.endpoint_counts[i][j] += t.counts[i][j];
  }
  if (!rounds.empty()) {
    std::sort(rounds.begin(), rounds.end());
    auto pct = [&](double q) { return rounds[std::min(rounds.size() - 1, static_cast<std::size_t>(q * rounds.size()))]; };
    rep.mean_rounds = sum / static_cast<double>(rounds.size());
    rep.p50_rounds = pct(0.5);
    rep.p90_rounds = pct(0.9);
    rep.p99_rounds = pct(0.99);
    rep.max_rounds = rounds.back();
  }
  if (path_length >= 4) {
    rep.exact = endpoint_matrix(static_cast<unsigned>(path_length), lambda);
    const double total = static_cast<double>(trials * (n / path_length));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double w = to_double(rep.exact->w[i][j]);
        const double sigma = std::sqrt(w * (1 - w) / total);
        const double emp = static_cast<double>(rep.endpoint_counts[i][j]) / total;
        if (sigma > 0) rep.max_abs_z = std::max(rep.max_abs_z, std::abs(emp - w) / sigma);
      }
  }
  return rep;
}

}  // namespace prs
