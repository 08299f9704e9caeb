#pragma once

// CNF front end: DIMACS I/O, degree and intersection statistics, the two
// sufficient conditions for efficient sampling, solution sampling through the
// generic samplers, and fixture generators.

#include <algorithm>
#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "prs/errors.hpp"
#include "prs/graph.hpp"
#include "prs/model.hpp"
#include "prs/rational.hpp"
#include "prs/sampler.hpp"

namespace prs {

// DIMACS literal: +v or -v with variables numbered from 1.
using Literal = std::int32_t;

struct CnfFormula {
  std::uint32_t num_vars = 0;
  std::vector<std::vector<Literal>> clauses;
  friend bool operator==(const CnfFormula&, const CnfFormula&) = default;
};

inline void validate_formula(const CnfFormula& f) {
  for (std::size_t c = 0; c < f.clauses.size(); ++c) {
    const auto& clause = f.clauses[c];
    const std::string where = "clause " + std::to_string(c + 1);
    if (clause.empty()) throw InputError(where + ": empty clause");
    std::vector<std::uint32_t> vars;
    for (Literal l : clause) {
      const auto v = static_cast<std::uint32_t>(std::abs(static_cast<long>(l)));
      if (l == 0 || v > f.num_vars) throw InputError(where + ": literal " + std::to_string(l) + " out of range");
      vars.push_back(v);
    }
    std::sort(vars.begin(), vars.end());
    if (auto it = std::adjacent_find(vars.begin(), vars.end()); it != vars.end()) {
      const bool both_signs = std::find(clause.begin(), clause.end(), static_cast<Literal>(*it)) != clause.end() &&
                              std::find(clause.begin(), clause.end(), -static_cast<Literal>(*it)) != clause.end();
      throw InputError(where + (both_signs ? ": tautological clause on variable " : ": repeated variable ") +
                       std::to_string(*it));
    }
  }
}

inline CnfFormula parse_dimacs(std::istream& in) {
  CnfFormula f;
  bool have_header = false;
  std::size_t declared_clauses = 0;
  std::vector<Literal> current;
  std::size_t clause_line = 0;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) -> void {
    throw InputError("dimacs line " + std::to_string(line_no) + ": " + what);
  };
  auto finish_clause = [&] {
    const std::size_t saved = line_no;
    line_no = clause_line;
    if (current.empty()) fail("empty clause");
    std::vector<Literal> sorted = current;
    std::sort(sorted.begin(), sorted.end(), [](Literal a, Literal b) { return std::abs(a) < std::abs(b); });
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (std::abs(sorted[i]) == std::abs(sorted[i - 1]))
        fail(sorted[i] == sorted[i - 1] ? "repeated literal " + std::to_string(sorted[i])
                                        : "tautological clause on variable " + std::to_string(std::abs(sorted[i])));
    f.clauses.push_back(std::move(current));
    current.clear();
    line_no = saved;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c") continue;
    if (tok == "%") break;
    if (tok == "p") {
      if (have_header) fail("duplicate header");
      std::string fmt, n, m, extra;
      if (!(ls >> fmt >> n >> m) || fmt != "cnf") fail("malformed header, expected 'p cnf <vars> <clauses>'");
      if (ls >> extra) fail("malformed header, trailing token '" + extra + "'");
      auto number = [&](const std::string& s) {
        if (s.empty() || !std::all_of(s.begin(), s.end(), [](char ch) { return ch >= '0' && ch <= '9'; }) ||
            s.size() > 9)
          fail("malformed header count '" + s + "'");
        return static_cast<std::uint32_t>(std::stoul(s));
      };
      f.num_vars = number(n);
      declared_clauses = number(m);
      have_header = true;
      continue;
    }
    if (!have_header) fail("clause before 'p cnf' header");
    ls.clear();
    ls.str(line);
    while (ls >> tok) {
      char* end = nullptr;
      errno = 0;
      const long value = std::strtol(tok.c_str(), &end, 10);
      if (*end != '\0' || tok.empty() || errno == ERANGE) fail("'" + tok + "' is not an integer literal");
      if (value == 0) {
        if (current.empty()) clause_line = line_no;
        finish_clause();
        continue;
      }
      if (static_cast<unsigned long>(std::labs(value)) > f.num_vars)
        fail("literal " + tok + " out of range (" + std::to_string(f.num_vars) + " variables)");
      if (current.empty()) clause_line = line_no;
      current.push_back(static_cast<Literal>(value));
    }
  }
  if (!have_header) throw InputError("dimacs: missing 'p cnf' header");
  if (!current.empty()) {
    line_no = clause_line;
    fail("unterminated clause (missing trailing 0)");
  }
  if (f.clauses.size() != declared_clauses)
    throw InputError("dimacs: header declares " + std::to_string(declared_clauses) + " clauses, found " +
                     std::to_string(f.clauses.size()));
  return f;
}

inline CnfFormula parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  return parse_dimacs(in);
}

inline std::string write_dimacs(const CnfFormula& f) {
  std::ostringstream out;
  out << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
  for (const auto& clause : f.clauses) {
    for (Literal l : clause) out << l << ' ';
    out << "0\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Statistics

struct CnfStats {
  std::size_t num_vars = 0;
  std::size_t num_clauses = 0;
  std::optional<unsigned> width;          // unset when widths are mixed (or no clauses)
  std::size_t degree = 0;                 // d: max occurrences of a variable
  std::optional<std::size_t> intersection;  // s over dependent pairs; unset means infinity
  bool extremal = true;
  std::size_t dependency_degree = 0;      // Delta of the clause dependency graph
  std::size_t dependent_pairs = 0;
};

inline CnfStats cnf_stats(const CnfFormula& f) {
  validate_formula(f);
  CnfStats st;
  st.num_vars = f.num_vars;
  st.num_clauses = f.clauses.size();
  // Occurrence lists: (clause, positive?) per variable.
  std::vector<std::vector<std::pair<std::uint32_t, bool>>> occ(f.num_vars + 1);
  for (std::uint32_t c = 0; c < f.clauses.size(); ++c)
    for (Literal l : f.clauses[c]) occ[static_cast<std::size_t>(std::abs(l))].emplace_back(c, l > 0);
  for (const auto& o : occ) st.degree = std::max(st.degree, o.size());
  if (!f.clauses.empty()) {
    const auto w = f.clauses.front().size();
    if (std::all_of(f.clauses.begin(), f.clauses.end(), [&](const auto& c) { return c.size() == w; }))
      st.width = static_cast<unsigned>(w);
  }

  std::vector<std::uint32_t> shared(f.clauses.size(), 0);
  std::vector<char> opposite(f.clauses.size(), 0);
  std::vector<std::uint32_t> touched;
  for (std::uint32_t c = 0; c < f.clauses.size(); ++c) {
    touched.clear();
    for (Literal l : f.clauses[c])
      for (auto [other, positive] : occ[static_cast<std::size_t>(std::abs(l))]) {
        if (other == c) continue;
        if (shared[other]++ == 0) touched.push_back(other);
        if (positive != (l > 0)) opposite[other] = 1;
      }
    st.dependency_degree = std::max(st.dependency_degree, touched.size());
    for (auto other : touched) {
      if (other > c) {
        ++st.dependent_pairs;
        if (!opposite[other]) st.extremal = false;
        st.intersection = std::min<std::size_t>(st.intersection.value_or(SIZE_MAX), shared[other]);
      }
      shared[other] = 0;
      opposite[other] = 0;
    }
  }
  return st;
}

inline nlohmann::json to_json(const CnfStats& s) {
  return {{"variables", s.num_vars},
          {"clauses", s.num_clauses},
          {"k", s.width ? nlohmann::json(*s.width) : nlohmann::json("mixed")},
          {"d", s.degree},
          {"s", s.intersection ? nlohmann::json(*s.intersection) : nlohmann::json("infinity")},
          {"extremal", s.extremal},
          {"dependency_degree", s.dependency_degree},
          {"dependent_pairs", s.dependent_pairs}};
}

// Maximum clause dependency degree is at most d k / s.
inline bool dependency_degree_within_bound(const CnfStats& s) {
  if (!s.width || !s.intersection) return true;
  return s.dependency_degree * *s.intersection <= s.degree * *s.width;
}

// ---------------------------------------------------------------------------
// Conditions

// d <= 2^k / (e k) + 1, i.e. (d - 1) e k <= 2^k.
inline bool check_extremal_condition(unsigned k, unsigned d) {
  if (k < 1 || d < 1) throw PreconditionError("check_extremal_condition requires k, d >= 1");
  const Rational coef = Rational(d - 1) * Rational(k);
  return certified_leq_in_e([&](const Rational& e) { return Rational(coef * e); }, pow2(k));
}

// n >= 2^{3e}, decided by bracketing 3e between integers over a power-of-two
// denominator Q and comparing n^Q against 2^{3eQ}.
inline bool certified_geq_two_pow_3e(const BigInt& n) {
  if (n <= 0) return false;
  for (unsigned j = 4; j <= 24; ++j) {
    const BigInt q = BigInt(1) << j;
    const EInterval e = e_interval(40 + 4 * j);
    const Rational lo = 3 * e.lo * Rational(q), hi = 3 * e.hi * Rational(q);
    const BigInt a_lo = numerator(lo) / denominator(lo);  // floor, lo > 0
    BigInt a_hi = numerator(hi) / denominator(hi);
    if (Rational(a_hi) < hi) ++a_hi;
    const BigInt nq = boost::multiprecision::pow(n, static_cast<unsigned>(q));
    if (nq >= BigInt(1) << static_cast<unsigned>(a_hi)) return true;
    if (nq < BigInt(1) << static_cast<unsigned>(a_lo)) return false;
  }
  throw EnumerationLimit("could not separate n from 2^{3e}");
}

struct SharingVerdict {
  bool ok = false;
  bool size_ok = false;          // d k >= 2^{3e}
  bool degree_ok = false;        // 36 e^2 d^2 <= 2^k
  bool intersection_ok = false;  // s >= min(log2 dk, k/2)
};

inline nlohmann::json to_json(const SharingVerdict& v) {
  return {{"ok", v.ok}, {"size_ok", v.size_ok}, {"degree_ok", v.degree_ok}, {"intersection_ok", v.intersection_ok}};
}

inline SharingVerdict check_sharing_condition(unsigned k, unsigned d, unsigned s) {
  if (d < 3) throw PreconditionError("check_sharing_condition requires d >= 3");
  if (k < 1) throw PreconditionError("check_sharing_condition requires k >= 1");
  SharingVerdict v;
  const BigInt dk = BigInt(d) * k;
  v.size_ok = certified_geq_two_pow_3e(dk);
  const Rational coef = Rational(36) * Rational(d) * Rational(d);
  v.degree_ok = certified_leq_in_e([&](const Rational& e) { return Rational(coef * e * e); }, pow2(k));
  v.intersection_ok = 2 * s >= k || (BigInt(1) << s) >= dk;
  v.ok = v.size_ok && v.degree_ok && v.intersection_ok;
  return v;
}

// ---------------------------------------------------------------------------
// Compilation and sampling

// Variable i (1-based) becomes VarId i-1, uniform over {0 = false, 1 = true};
// clause c becomes event c with the all-false tuple as its only violation.
inline Instance compile_cnf(const CnfFormula& f) {
  validate_formula(f);
  std::vector<VariableSpec> vars;
  for (VarId v = 0; v < f.num_vars; ++v) vars.push_back(VariableSpec::uniform(v, 2));
  std::vector<EventSpec> events;
  std::size_t widest = 0;
  std::vector<std::pair<VarId, bool>> lits;
  for (std::size_t c = 0; c < f.clauses.size(); ++c) {
    lits.clear();
    for (Literal l : f.clauses[c]) lits.emplace_back(static_cast<VarId>(std::abs(l) - 1), l > 0);
    widest = std::max(widest, lits.size());
    events.push_back(clause_event(static_cast<EventId>(c), lits));
  }
  // Clause events carry one violating tuple, so wide clauses stay cheap.
  return Instance(std::move(vars), std::move(events), std::max(kDefaultMaxEventArity, widest));
}

inline std::vector<Literal> to_literals(const Assignment& sigma) {
  std::vector<Literal> out;
  for (VarId v = 0; v < sigma.size(); ++v) out.push_back(sigma[v] ? static_cast<Literal>(v + 1) : -static_cast<Literal>(v + 1));
  return out;
}

inline std::string to_bitstring(const Assignment& sigma) {
  std::string out;
  for (VarId v = 0; v < sigma.size(); ++v) out.push_back(sigma[v] ? '1' : '0');
  return out;
}

inline bool satisfies(const CnfFormula& f, const Assignment& sigma) {
  return std::all_of(f.clauses.begin(), f.clauses.end(), [&](const auto& clause) {
    return std::any_of(clause.begin(), clause.end(), [&](Literal l) {
      return (sigma[static_cast<VarId>(std::abs(l) - 1)] != 0) == (l > 0);
    });
  });
}

inline SampleResult sample_cnf(const CnfFormula& f, SamplerKind kind, SamplerConfig config) {
  config.kind = kind;
  const Instance instance = compile_cnf(f);
  if (kind == SamplerKind::extremal_prs && config.check_extremal && !cnf_stats(f).extremal)
    throw PreconditionError("extremal sampler requested but the formula is not extremal");
  return sample(instance, config);
}

// ---------------------------------------------------------------------------
// Fixtures

// The 4m-clause extremal formula with a unique solution (all true). x_i is
// variable i, y_j is variable m + j.
inline CnfFormula hard_example(unsigned m) {
  if (m < 1) throw PreconditionError("hard_example requires m >= 1");
  const auto x = [](unsigned i) { return static_cast<Literal>(i); };
  const auto y = [m](unsigned j) { return static_cast<Literal>(m + j); };
  CnfFormula f;
  f.num_vars = 3 * m;
  f.clauses.push_back({x(1)});
  f.clauses.push_back({-x(1), y(1), y(2)});
  f.clauses.push_back({-x(1), y(1), -y(2)});
  f.clauses.push_back({-x(1), -y(1), y(2)});
  for (unsigned k = 1; k + 1 <= m; ++k) {
    f.clauses.push_back({-y(2 * k - 1), -y(2 * k), x(k + 1)});
    f.clauses.push_back({-x(k + 1), y(2 * k + 1), y(2 * k + 2)});
    f.clauses.push_back({-x(k + 1), y(2 * k + 1), -y(2 * k + 2)});
    f.clauses.push_back({-x(k + 1), -y(2 * k + 1), y(2 * k + 2)});
  }
  return f;
}

// Vertex v owns variables v*s+1 .. v*s+s; each edge {u,v} gives the monotone
// clause over both blocks.
inline CnfFormula monotone_cnf_from_graph(const Graph& g, unsigned s) {
  if (s < 1) throw PreconditionError("monotone_cnf_from_graph requires s >= 1");
  CnfFormula f;
  f.num_vars = static_cast<std::uint32_t>(g.num_vertices() * s);
  for (const auto& [u, v] : g.edges()) {
    std::vector<Literal> clause;
    for (Vertex w : {u, v})
      for (unsigned t = 1; t <= s; ++t) clause.push_back(static_cast<Literal>(w * s + t));
    f.clauses.push_back(std::move(clause));
  }
  return f;
}

}  // namespace prs
