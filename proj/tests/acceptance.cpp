// Acceptance run: one [PASS]/[FAIL] line per criterion, exit status 1 if any fails.
// Oracles here are brute-force enumerations written independently of the library's.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "prs/prs.hpp"

using namespace prs;

namespace {

constexpr std::uint64_t kSamples = 100000;
constexpr double kMaxTv = 0.01;
constexpr double kMinP = 1e-3;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED(" << what << ")";
    }
  }
};

// Pr(no event occurs) by walking every total assignment.
Rational brute_no_bad(const Instance& inst) {
  const std::size_t n = inst.num_variables();
  std::vector<Value> x(n, 0);
  Rational total = 0;
  std::function<void(std::size_t, const Rational&)> rec = [&](std::size_t v, const Rational& w) {
    if (v == n) {
      for (const auto& ev : inst.events())
        for (const auto& t : ev.violating) {
          bool eq = true;
          for (std::size_t k = 0; k < ev.vbl.size() && eq; ++k) eq = x[ev.vbl[k]] == t[k];
          if (eq) return;
        }
      total += w;
      return;
    }
    const auto& spec = inst.variable(static_cast<VarId>(v));
    for (Value a = 0; a < static_cast<Value>(spec.domain_size); ++a) {
      x[v] = a;
      rec(v + 1, w * spec.weights[a]);
    }
  };
  rec(0, Rational(1));
  return total;
}

std::uint64_t state_space(const Instance& inst) {
  std::uint64_t s = 1;
  for (const auto& v : inst.variables()) s *= v.domain_size;
  return s;
}

// Rooted spanning trees counted over all arrow maps.
std::size_t count_rooted_trees(const Graph& g, Vertex root) {
  ArrowMap a{root, std::vector<Vertex>(g.num_vertices(), kNoVertex)};
  std::size_t count = 0;
  std::function<void(Vertex)> rec = [&](Vertex v) {
    if (v == g.num_vertices()) {
      count += is_rooted_spanning_tree(g, a);
      return;
    }
    if (v == root) return rec(v + 1);
    for (const auto& inc : g.incident(v)) {
      a.successor[v] = inc.neighbour;
      rec(v + 1);
    }
  };
  rec(0);
  return count;
}

// Counts CNF assignments satisfying every clause except possibly clause `skip`;
// with only_skip_violated, the skipped clause must be false.
std::uint64_t count_cnf(const CnfFormula& f, std::size_t skip, bool only_skip_violated) {
  std::uint64_t count = 0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << f.num_vars); ++bits) {
    bool ok = true, skipped_false = false;
    for (std::size_t c = 0; c < f.clauses.size() && ok; ++c) {
      bool sat = false;
      for (Literal l : f.clauses[c]) sat = sat || (((bits >> (std::abs(l) - 1)) & 1) == (l > 0 ? 1u : 0u));
      if (c == skip) skipped_false = !sat;
      else ok = sat;
    }
    count += ok && (!only_skip_violated || skipped_false);
  }
  return count;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

// ---------------------------------------------------------------------------

void criterion1(Outcome& o) {
  struct Case {
    std::string preset;
    std::size_t outcomes;
  };
  const std::vector<Case> cases{{"c3-sink-free", 2}, {"c4-sink-free", 2}, {"k4-spanning-tree", 16}, {"p5-hardcore", 13}, {"cnf-pair", 5}};
  o.require(count_rooted_trees(complete_graph(4), 0) == 16, "K4 tree count");
  std::uint64_t seed = 1000;
  for (const auto& c : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    auto p = make_preset(c.preset);
    auto oracle = enumerate_valid(p.instance);
    o.require(oracle.valid.size() == c.outcomes, c.preset + " outcome count");
    // The specialised sampler and the generic sampler on the encoding.
    const SamplerKind kind = is_extremal(p.instance) ? SamplerKind::extremal_prs : SamplerKind::general_prs;
    AssignmentSampler generic = [&p, kind](std::uint64_t s) {
      SamplerConfig cfg;
      cfg.seed = s;
      cfg.kind = kind;
      return sample(p.instance, cfg).assignment;
    };
    for (const auto& [label, sampler] : {std::pair{"specialised", p.sampler}, std::pair{"generic", generic}}) {
      auto v = uniformity_test(sampler, oracle, kSamples, ++seed, {kMaxTv, kMinP});
      o.detail << ' ' << c.preset << '/' << label << " tv=" << fmt(v.tv) << " p=" << fmt(v.p_value);
      o.require(v.pass && v.outside_support == 0, c.preset + "/" + label);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs <= 120, c.preset + " runtime");
  }
}

void criterion2(Outcome& o) {
  const Graph c3 = cycle_graph(3);
  auto inst = sink_free_instance(c3);
  // Z1 / Z0 over the 8 orientations.
  int z0 = 0, z1 = 0;
  for (int mask = 0; mask < 8; ++mask) {
    Orientation orient;
    for (int e = 0; e < 3; ++e) orient.direction.push_back(static_cast<Value>(mask >> e & 1));
    const auto s = sinks(c3, orient).size();
    z0 += s == 0;
    z1 += s == 1;
  }
  o.require(z0 == 2 && z1 == 6, "orientation counts");
  const Rational exact = expected_resamples(build_dependency_graph(inst), event_probabilities(inst));
  o.require(exact == 3 && exact == Rational(z1, z0), "exact E T on C3");
  auto rep = expected_resamples_test(inst, kSamples, 2000);
  o.detail << " C3 mean=" << fmt(rep.total.mean) << " se=" << fmt(rep.total.se);
  o.require(std::abs(rep.total.mean - 3.0) <= 0.05, "C3 mean within 0.05");

  std::vector<VariableSpec> vars{VariableSpec::uniform(0, 2), VariableSpec::uniform(1, 2), VariableSpec::uniform(2, 2)};
  Instance two(vars, {EventSpec{0, {0, 1}, {{0, 0}}}, EventSpec{1, {0, 2}, {{1, 0}}}});
  o.require(expected_resamples(build_dependency_graph(two), event_probabilities(two)) == 1, "exact E T two-adjacent");
  auto rep2 = expected_resamples_test(two, kSamples, 2001);
  o.detail << " two-adjacent mean=" << fmt(rep2.total.mean) << " se=" << fmt(rep2.total.se);
  o.require(std::abs(rep2.total.mean - 1.0) <= 0.02, "two-adjacent mean within 0.02");
}

void criterion3(Outcome& o) {
  Rng rng(3000);
  RandomInstanceParams params;
  params.max_events = 8;
  int extremal = 0, non_extremal = 0, draws = 0;
  while ((extremal < 200 || non_extremal < 200) && draws < 200000) {
    ++draws;
    const bool want_extremal = extremal < 200 && (non_extremal >= 200 || draws % 2 == 0);
    Instance inst = want_extremal ? random_extremal_instance(rng, params) : random_instance(rng, params);
    if (inst.num_events() > 8 || state_space(inst) > (std::uint64_t{1} << 20)) continue;
    const bool ext = is_extremal(inst);
    if (ext != want_extremal) continue;
    const auto g = build_dependency_graph(inst);
    QEmptyCalculator calc(g, event_probabilities(inst));
    const Rational q0 = calc.q_of(0);
    Rational sum = 0;
    bool region = q0 > 0;
    for (EventMask s : independent_sets(g)) {
      const Rational q = calc.q_of(s);
      sum += q;
      region = region && q >= 0;
    }
    const Rational brute = brute_no_bad(inst);
    if (ext) {
      o.require(brute == q0, "extremal Pr(no bad) == q_empty");
      o.require(sum == 1, "sum of q_I");
      ++extremal;
    } else {
      if (!region) continue;  // the inequality is a statement inside Shearer's region
      o.require(brute >= q0, "non-extremal Pr(no bad) >= q_empty");
      ++non_extremal;
    }
  }
  o.detail << " extremal=" << extremal << " non_extremal=" << non_extremal << " draws=" << draws;
  o.require(extremal == 200 && non_extremal == 200, "instance counts");
}

void criterion4(Outcome& o) {
  auto two = first_round_test(make_preset("two-adjacent").instance, kSamples, 4000);
  auto c3 = first_round_test(sink_free_instance(cycle_graph(3)), kSamples, 4001);
  double worst = 0;
  for (const auto* rep : {&two, &c3})
    for (const auto& e : rep->entries)
      if (e.sigma > 0) worst = std::max(worst, std::abs(e.frequency - to_double(e.q)) / e.sigma);
  o.detail << " sets=" << two.entries.size() + c3.entries.size() << " max|z|=" << fmt(worst);
  o.require(two.pass, "two-adjacent");
  o.require(c3.pass, "C3");
}

void criterion5(Outcome& o) {
  auto rep = res_set_property_tests(10000, 5000);
  o.detail << " trials=" << rep.trials << " containment=" << rep.containment_violations
           << " unblocking=" << rep.unblocking_violations << " stability=" << rep.stability_violations << "/"
           << rep.stability_checks << " extremal=" << rep.extremal_violations << "/" << rep.extremal_trials
           << " order_discrepancies=" << rep.order_discrepancies;
  o.require(rep.containment_violations == 0 && rep.unblocking_violations == 0 && rep.stability_violations == 0,
            "violations");
  o.require(rep.extremal_trials > 0 && rep.extremal_violations == 0, "Res = Bad on extremal instances");
  o.require(rep.stability_checks > 0, "stability exercised");
}

void criterion6(Outcome& o) {
  int identities = 0;
  for (const Rational lambda : {Rational(1, 2), Rational(1), Rational(2)}) {
    for (unsigned k = 4; k <= 12; ++k) {
      const auto w = endpoint_matrix(k, lambda);
      const Rational ik = path_partition(k, lambda);
      Rational expected = k % 2 == 1 ? 1 : -1;
      for (unsigned t = 0; t < k; ++t) expected *= lambda;
      expected /= ik * ik;
      o.require(w.det() == expected, "det W_k at k=" + std::to_string(k));
      const auto brute = endpoint_matrix_by_enumeration(k, lambda);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) o.require(w.w[i][j] == brute.w[i][j], "W_k enumeration at k=" + std::to_string(k));
      ++identities;
    }
    o.require(det_w_prime(4, lambda) == -lambda * lambda, "det W'_4");
  }
  o.require(alpha(2) == 0.5, "alpha(2)");
  o.detail << " identities=" << identities << " alpha(2)=" << alpha(2);
}

void criterion7(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  ScalingParams p;
  p.app = App::hardcore;
  p.lambda = Rational(1, 10);
  p.degree = 3;
  p.sizes = {128, 256, 512, 1024, 2048, 4096, 8192, 16384, 32768};
  p.trials = 1000;
  p.seed = 7000;
  auto rep = round_scaling_experiment(p);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double span = static_cast<double>(rep.rows.back().m) / static_cast<double>(rep.rows.front().m);
  o.detail << " m=" << rep.rows.front().m << ".." << rep.rows.back().m << " fit a=" << fmt(rep.a) << " b=" << fmt(rep.b)
           << " curvature=" << fmt(rep.c) << "+-" << fmt(rep.se_c) << " resamples/m<=" << fmt(rep.max_resamples_per_event)
           << " decay=" << fmt(rep.decay) << "+-" << fmt(rep.decay_se) << " bound=" << fmt(rep.decay_bound)
           << " time=" << fmt(secs) << "s";
  o.require(rep.condition_ok, "lambda inside the condition");
  o.require(span >= 100, "m spans two orders of magnitude");
  o.require(rep.max_resamples_per_event <= 10, "resamples per event");
  o.require(rep.b >= 0 && !rep.super_logarithmic, "log-m fit trend");
  o.require(rep.decay <= rep.decay_bound + 3 * rep.decay_se, "decay factor");
  o.require(secs <= 600, "runtime");
}

void criterion8(Outcome& o) {
  for (unsigned m = 1; m <= 3; ++m) {
    const auto f = hard_example(m);
    const auto z0 = count_cnf(f, SIZE_MAX, false);
    const auto z1 = count_cnf(f, 0, true);
    std::uint64_t pow3 = 1;
    for (unsigned t = 0; t < m; ++t) pow3 *= 3;
    o.detail << " m=" << m << ":Z0=" << z0 << ",Z1=" << z1;
    o.require(z0 == 1, "Z0 = 1");
    o.require(z1 >= pow3, "Z1 >= 3^m");
    o.require(cnf_stats(f).extremal, "extremal flag");
  }
  auto rep = shearer_report(compile_cnf(hard_example(2)));
  o.require(rep.expected_T.has_value() && *rep.expected_T > 9, "E T for m=2 exceeds 9");
  if (rep.expected_T) o.detail << " E[T](m=2)=" << to_string(*rep.expected_T);
}

void criterion9(Outcome& o) {
  o.require(symmetric_pc(3) == Rational(4, 27), "p_c(3)");
  o.require(linear_bound(1, 3, Rational(1, 8)) == Rational(27, 5), "coefficient 27/5");
  o.require(check_sharing_condition(20, 60, 10).ok, "(20,60,10) passes");
  o.require(!check_sharing_condition(20, 63, 10).ok, "(20,63,10) fails");
  o.require(!check_sharing_condition(20, 60, 9).ok, "(20,60,9) fails");
  o.detail << " p_c(3)=" << to_string(symmetric_pc(3)) << " coefficient=" << to_string(linear_bound(1, 3, Rational(1, 8)));
}

void criterion10(Outcome& o) {
  std::uint64_t seed = 10000;
  for (const auto& name : {"c3-sink-free", "c4-sink-free", "k4-spanning-tree", "p5-hardcore", "cnf-pair"}) {
    auto oracle = enumerate_valid(make_preset(name).instance);
    auto v = uniformity_test(biased_stub(oracle), oracle, kSamples, ++seed, {kMaxTv, kMinP});
    o.detail << ' ' << name << " tv=" << fmt(v.tv);
    o.require(!v.pass, std::string(name) + " stub rejected");
  }
}

}  // namespace

int main() {
  const std::vector<std::function<void(Outcome&)>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                            criterion6, criterion7, criterion8, criterion9, criterion10};
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i](o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    all = all && o.pass;
    std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << i + 1 << ":" << o.detail.str() << std::endl;
  }
  return all ? 0 : 1;
}
