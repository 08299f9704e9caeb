#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "prs/errors.hpp"
#include "prs/rng.hpp"

namespace prs {

using Vertex = std::uint32_t;

// Simple undirected graph. Edges are stored with u < v; adjacency lists are
// sorted by neighbour and carry the incident edge index.
class Graph {
 public:
  struct Incidence {
    Vertex neighbour;
    std::uint32_t edge;
  };

  Graph() = default;
  Graph(std::size_t n, std::vector<std::pair<Vertex, Vertex>> edges) : n_(n) {
    for (auto& [u, v] : edges) {
      if (u == v) throw InputError("graph: self loop at vertex " + std::to_string(u));
      if (u >= n || v >= n) throw InputError("graph: vertex out of range");
      if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
      throw InputError("graph: repeated edge");
    edges_ = std::move(edges);
    adj_.assign(n, {});
    for (std::uint32_t e = 0; e < edges_.size(); ++e) {
      adj_[edges_[e].first].push_back({edges_[e].second, e});
      adj_[edges_[e].second].push_back({edges_[e].first, e});
    }
    for (auto& list : adj_)
      std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.neighbour < b.neighbour; });
  }

  std::size_t num_vertices() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<std::pair<Vertex, Vertex>>& edges() const noexcept { return edges_; }
  const std::vector<Incidence>& incident(Vertex v) const { return adj_.at(v); }
  std::size_t degree(Vertex v) const { return adj_.at(v).size(); }
  std::size_t max_degree() const {
    std::size_t d = 0;
    for (const auto& a : adj_) d = std::max(d, a.size());
    return d;
  }
  bool is_regular() const {
    return std::all_of(adj_.begin(), adj_.end(), [&](const auto& a) { return a.size() == adj_.front().size(); });
  }

  // Component label per vertex, labels dense from 0.
  std::vector<std::uint32_t> components() const {
    std::vector<std::uint32_t> label(n_, UINT32_MAX);
    std::uint32_t next = 0;
    std::vector<Vertex> stack;
    for (Vertex s = 0; s < n_; ++s) {
      if (label[s] != UINT32_MAX) continue;
      label[s] = next;
      stack.push_back(s);
      while (!stack.empty()) {
        Vertex u = stack.back();
        stack.pop_back();
        for (const auto& inc : adj_[u])
          if (label[inc.neighbour] == UINT32_MAX) {
            label[inc.neighbour] = next;
            stack.push_back(inc.neighbour);
          }
      }
      ++next;
    }
    return label;
  }
  std::size_t component_count() const {
    const auto label = components();
    return n_ == 0 ? 0 : *std::max_element(label.begin(), label.end()) + 1;
  }
  bool connected() const { return component_count() <= 1; }
  // Dimension of the cycle space, |E| - |V| + kappa(G).
  std::size_t cyclomatic_number() const { return num_edges() + component_count() - num_vertices(); }
  bool is_forest() const { return cyclomatic_number() == 0; }

 private:
  std::size_t n_ = 0;
  std::vector<std::pair<Vertex, Vertex>> edges_;
  std::vector<std::vector<Incidence>> adj_;
};

// Edge list: one "u v" pair per line, '#' starts a comment. Vertex labels are
// nonnegative integers, compacted to 0..n-1 in ascending label order.
struct ParsedGraph {
  Graph graph;
  std::vector<std::uint64_t> labels;  // original label of each compacted vertex
};

inline ParsedGraph parse_edge_list(std::istream& in) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string a, b, extra;
    if (!(ls >> a)) continue;
    auto parse = [&](const std::string& tok) -> std::uint64_t {
      if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw InputError("edge list line " + std::to_string(line_no) + ": '" + tok + "' is not a vertex label");
      return std::stoull(tok);
    };
    if (!(ls >> b)) throw InputError("edge list line " + std::to_string(line_no) + ": expected two vertices");
    if (ls >> extra) throw InputError("edge list line " + std::to_string(line_no) + ": trailing token '" + extra + "'");
    raw.emplace_back(parse(a), parse(b));
  }
  ParsedGraph out;
  for (auto [a, b] : raw) {
    out.labels.push_back(a);
    out.labels.push_back(b);
  }
  std::sort(out.labels.begin(), out.labels.end());
  out.labels.erase(std::unique(out.labels.begin(), out.labels.end()), out.labels.end());
  auto index = [&](std::uint64_t label) {
    return static_cast<Vertex>(std::lower_bound(out.labels.begin(), out.labels.end(), label) - out.labels.begin());
  };
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (auto [a, b] : raw) edges.emplace_back(index(a), index(b));
  out.graph = Graph(out.labels.size(), std::move(edges));
  return out;
}

inline ParsedGraph parse_edge_list(const std::string& text) {
  std::istringstream in(text);
  return parse_edge_list(in);
}

inline Graph cycle_graph(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex i = 0; i < n; ++i) e.emplace_back(i, static_cast<Vertex>((i + 1) % n));
  return Graph(n, std::move(e));
}

inline Graph path_graph(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph(n, std::move(e));
}

inline Graph complete_graph(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph(n, std::move(e));
}

// Disjoint union of count paths of length vertices each.
inline Graph disjoint_paths(std::size_t count, std::size_t length) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (std::size_t c = 0; c < count; ++c)
    for (std::size_t i = 0; i + 1 < length; ++i)
      e.emplace_back(static_cast<Vertex>(c * length + i), static_cast<Vertex>(c * length + i + 1));
  return Graph(count * length, std::move(e));
}

// Uniform random simple d-regular graph by the pairing model with restarts.
inline Graph random_regular_graph(std::size_t n, std::size_t d, Rng& rng, std::size_t max_attempts = 10'000) {
  if ((n * d) % 2 != 0 || d >= n) throw InputError("random_regular_graph: need n*d even and d < n");
  std::vector<Vertex> points(n * d);
  for (std::size_t i = 0; i < points.size(); ++i) points[i] = static_cast<Vertex>(i / d);
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    for (std::size_t i = points.size(); i > 1; --i) std::swap(points[i - 1], points[rng.below(i)]);
    std::vector<std::pair<Vertex, Vertex>> edges;
    edges.reserve(points.size() / 2);
    bool simple = true;
    for (std::size_t i = 0; i < points.size() && simple; i += 2) {
      Vertex u = points[i], v = points[i + 1];
      if (u == v) simple = false;
      edges.emplace_back(std::min(u, v), std::max(u, v));
    }
    if (!simple) continue;
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) continue;
    return Graph(n, std::move(edges));
  }
  throw EnumerationLimit("random_regular_graph: no simple pairing found");
}

}  // namespace prs
