// prs: command-line front end for the partial rejection sampling library.
//
// Exit codes: 0 success, 1 usage or input error, 2 round cap exceeded,
// 3 verification failure.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "prs/prs.hpp"

namespace {

using namespace prs;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitCap = 2;
constexpr int kExitVerify = 3;

struct InputOptions {
  std::string instance_path, cnf_path, graph_path;
  std::string app;
  std::optional<std::uint64_t> root;
  std::string lambda = "1";
};

struct CommonRun {
  std::optional<std::uint64_t> seed;
  std::string out_path;
  unsigned threads = 0;
};

std::string read_text(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t effective_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw InputError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
  auto* inst = cmd->add_option("--instance", in.instance_path, "JSON instance file ('-' for stdin)");
  auto* cnf = cmd->add_option("--cnf", in.cnf_path, "DIMACS CNF file ('-' for stdin)");
  auto* graph = cmd->add_option("--graph", in.graph_path, "edge list file, one 'u v' per line ('-' for stdin)");
  inst->excludes(cnf, graph);
  cnf->excludes(graph);
  cmd->add_option("--app", in.app, "graph application: sink-free, spanning-tree or hardcore")->needs(graph);
  cmd->add_option("--root", in.root, "root vertex label for spanning-tree (default: smallest label)");
  cmd->add_option("--lambda", in.lambda, "hard-core fugacity, rational or decimal (default 1)");
}

enum class Source { instance, cnf, graph };

struct LoadedInput {
  Source source = Source::instance;
  Instance instance;
  CnfFormula formula;
  ParsedGraph graph;
  App app = App::sink_free;
  Vertex root = 0;
  Rational lambda = 1;
};

LoadedInput load_input(const InputOptions& in, bool build_instance = true) {
  LoadedInput out;
  if (!in.instance_path.empty()) {
    out.source = Source::instance;
    out.instance = parse_instance_json(read_text(in.instance_path));
  } else if (!in.cnf_path.empty()) {
    out.source = Source::cnf;
    out.formula = parse_dimacs(read_text(in.cnf_path));
    if (build_instance) out.instance = compile_cnf(out.formula);
  } else if (!in.graph_path.empty()) {
    out.source = Source::graph;
    if (in.app.empty()) throw InputError("--graph requires --app");
    out.app = parse_app(in.app);
    out.graph = parse_edge_list(read_text(in.graph_path));
    if (out.graph.graph.num_vertices() == 0) throw InputError("graph has no edges");
    out.lambda = parse_rational(in.lambda, true);
    if (out.lambda <= 0) throw InputError("--lambda must be positive");
    if (in.root) {
      const auto& labels = out.graph.labels;
      auto it = std::lower_bound(labels.begin(), labels.end(), *in.root);
      if (it == labels.end() || *it != *in.root) throw InputError("--root " + std::to_string(*in.root) + " is not a vertex");
      out.root = static_cast<Vertex>(it - labels.begin());
    }
    if (build_instance) out.instance = encode_as_instance(out.app, out.graph.graph, {out.root, out.lambda});
  } else {
    throw InputError("one of --instance, --cnf or --graph is required");
  }
  return out;
}

// ---------------------------------------------------------------------------
// sample

struct SampleOptions {
  InputOptions input;
  CommonRun run;
  std::string sampler = "auto";
  std::uint64_t count = 1;
  std::uint64_t round_cap = kDefaultRoundCap;
  std::string format = "auto";
};

std::string join_values(const Assignment& a) {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(a[static_cast<VarId>(i)]);
  }
  return s;
}

int cmd_sample(const SampleOptions& o) {
  LoadedInput in = load_input(o.input, false);
  const std::uint64_t seed = effective_seed(o.run.seed);
  if (o.count < 1) throw InputError("--count must be at least 1");
  const bool specialised = o.sampler == "auto" && in.source == Source::graph;
  SamplerKind kind = SamplerKind::general_prs;
  if (o.sampler != "auto") kind = parse_sampler_kind(o.sampler);
  if (in.source == Source::cnf) in.instance = compile_cnf(in.formula);
  if (in.source == Source::graph && !specialised)
    in.instance = encode_as_instance(in.app, in.graph.graph, {in.root, in.lambda});
  if (in.source == Source::graph && in.app == App::spanning_tree && !in.graph.graph.connected())
    throw InputError("spanning-tree requires a connected graph");

  std::string format = o.format;
  if (format == "auto") format = in.source == Source::graph && in.app != App::hardcore ? "edges" : "bits";
  if (format == "literals" && in.source != Source::cnf) throw InputError("--format literals applies to --cnf only");
  if (format == "edges" && (in.source != Source::graph || in.app == App::hardcore))
    throw InputError("--format edges applies to sink-free and spanning-tree only");
  if (format != "bits" && format != "literals" && format != "edges") throw InputError("unknown --format '" + format + "'");

  Output out(o.run.out_path);
  auto& os = out.stream();
  os << "# seed " << seed << '\n';
  const Graph& g = in.graph.graph;
  const auto& labels = in.graph.labels;
  std::optional<SpanningTreeEncoding> tree_enc;
  if (in.source == Source::graph && in.app == App::spanning_tree && !specialised)
    tree_enc = spanning_tree_instance(g, in.root);

  json rounds = json::array(), resamples = json::array();
  for (std::uint64_t i = 0; i < o.count; ++i) {
    SamplerConfig c;
    c.seed = derive_seed(seed, i);
    c.kind = kind;
    if (o.round_cap > 0) c.round_cap = o.round_cap;
    else c.round_cap.reset();
    RunStats stats;
    std::string line;
    if (in.source == Source::graph) {
      std::vector<Value> bits;
      ArrowMap arrows;
      if (specialised) {
        switch (in.app) {
          case App::sink_free: {
            auto r = sink_popping(g, c);
            bits = r.value.direction;
            stats = std::move(r.stats);
            break;
          }
          case App::spanning_tree: {
            auto r = cycle_popping(g, in.root, c);
            arrows = r.value;
            stats = std::move(r.stats);
            break;
          }
          case App::hardcore: {
            auto r = hardcore_sample(g, in.lambda, c);
            bits = r.value.occupied;
            stats = std::move(r.stats);
            break;
          }
        }
      } else {
        auto r = sample(in.instance, c);
        stats = std::move(r.stats);
        if (in.app == App::spanning_tree) arrows = tree_enc->arrows(g, r.assignment);
        else bits = r.assignment.values();
      }
      if (in.app == App::spanning_tree) {
        // Parent of each vertex in label order, '-' for the root.
        for (Vertex v = 0; v < g.num_vertices(); ++v) {
          if (v) line += ' ';
          line += v == in.root ? std::string("-") : std::to_string(labels[arrows.successor[v]]);
        }
      } else if (format == "edges") {
        Orientation orient{bits};
        for (std::uint32_t e = 0; e < g.num_edges(); ++e) {
          if (e) line += ' ';
          line += std::to_string(labels[orient.tail(g, e)]) + ">" + std::to_string(labels[orient.head(g, e)]);
        }
      } else {
        for (auto b : bits) line += static_cast<char>('0' + b);
      }
    } else {
      auto r = sample(in.instance, c);
      stats = std::move(r.stats);
      if (in.source == Source::cnf) {
        if (format == "literals") {
          for (auto l : to_literals(r.assignment)) line += (line.empty() ? "" : " ") + std::to_string(l);
        } else {
          line = to_bitstring(r.assignment);
        }
      } else {
        line = join_values(r.assignment);
      }
    }
    os << line << '\n';
    rounds.push_back(stats.rounds);
    resamples.push_back(stats.total_resamples);
  }
  json trailer{{"seed", seed},
               {"count", o.count},
               {"sampler", specialised ? std::string("specialised") : std::string(to_string(kind))},
               {"rounds", rounds},
               {"total_resamples", resamples}};
  os << "# stats " << trailer.dump() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
  InputOptions input;
  std::optional<unsigned> k, d, s;
  bool no_exact = false;
  std::string out_path;
};

json conditions_json(unsigned k, unsigned d, std::optional<unsigned> s) {
  json j{{"k", k}, {"d", d}, {"extremal_condition", check_extremal_condition(k, d)}};
  if (s) j["s"] = *s;
  else j["s"] = "infinity";
  if (d >= 3) j["sharing_condition"] = to_json(check_sharing_condition(k, d, s.value_or(k)));
  else j["sharing_condition"] = "not applicable (requires d >= 3)";
  return j;
}

json exact_json(const Instance& instance, bool no_exact) {
  if (no_exact) return "skipped";
  if (instance.num_events() > 30)
    throw EnumerationLimit("exact analysis needs at most 30 events, got " + std::to_string(instance.num_events()) +
                           "; rerun with --no-exact for the structural report only");
  return to_json(shearer_report(instance));
}

int cmd_analyze(const AnalyzeOptions& o) {
  Output out(o.out_path);
  json j;
  if (o.k || o.d || o.s) {
    if (!o.k || !o.d) throw InputError("--k and --d are both required for condition checks");
    if (!o.input.instance_path.empty() || !o.input.cnf_path.empty() || !o.input.graph_path.empty())
      throw InputError("--k/--d/--s cannot be combined with an input file");
    if (*o.k < 1 || *o.d < 1) throw InputError("--k and --d must be positive");
    j = conditions_json(*o.k, *o.d, o.s);
    out.stream() << j.dump(2) << '\n';
    return kExitOk;
  }
  LoadedInput in = load_input(o.input);
  const auto g = build_dependency_graph(in.instance);
  j["variables"] = in.instance.num_variables();
  j["events"] = in.instance.num_events();
  j["dependency_degree"] = g.max_degree;
  j["extremal"] = is_extremal(in.instance);
  if (in.source == Source::cnf) {
    const auto stats = cnf_stats(in.formula);
    j["cnf"] = to_json(stats);
    if (stats.width && stats.num_clauses > 0)
      j["conditions"] = conditions_json(*stats.width, static_cast<unsigned>(stats.degree),
                                        stats.intersection ? std::optional<unsigned>(static_cast<unsigned>(*stats.intersection))
                                                           : std::nullopt);
    j["dependency_bound_ok"] = dependency_degree_within_bound(stats);
  }
  if (in.source == Source::graph) {
    const Graph& gr = in.graph.graph;
    const auto b = ratio_bounds(gr);
    j["graph"] = {{"vertices", gr.num_vertices()}, {"edges", gr.num_edges()}, {"max_degree", gr.max_degree()},
                  {"connected", gr.connected()}};
    j["ratio_bounds"] = {{"sink_free", b.sink_applicable ? json(b.sink_bound) : json("not applicable")},
                         {"spanning_tree", b.tree_applicable ? json(b.tree_bound) : json("not applicable")}};
    if (in.app == App::hardcore) {
      j["lambda"] = to_string(in.lambda);
      j["hardcore_condition"] = hardcore_condition(in.lambda, static_cast<unsigned>(std::max<std::size_t>(1, gr.max_degree())));
    }
  }
  j["gprs"] = to_json(check_gprs_conditions(in.instance));
  j["shearer"] = exact_json(in.instance, o.no_exact);
  out.stream() << j.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOptions {
  std::string preset = "p5-hardcore";
  InputOptions input;
  std::string sampler = "general";
  std::uint64_t samples = 100000;
  std::uint64_t runs = 100000;
  std::uint64_t trials = 10000;
  double max_tv = 0.01;
  double min_p = 1e-3;
  CommonRun run;
};

struct Target {
  std::string name;
  Instance instance;
  AssignmentSampler sampler;
};

Target verify_target(const VerifyOptions& o) {
  const bool has_file = !o.input.instance_path.empty() || !o.input.cnf_path.empty() || !o.input.graph_path.empty();
  if (!has_file) {
    auto p = make_preset(o.preset);
    return {p.name, p.instance, p.sampler};
  }
  auto in = std::make_shared<LoadedInput>(load_input(o.input));
  const SamplerKind kind = parse_sampler_kind(o.sampler);
  AssignmentSampler s = [in, kind](std::uint64_t seed) {
    SamplerConfig c;
    c.seed = seed;
    c.kind = kind;
    return sample(in->instance, c).assignment;
  };
  return {"input", in->instance, s};
}

int finish(const json& j, bool pass, const std::string& out_path) {
  Output out(out_path);
  out.stream() << j.dump(2) << '\n';
  return pass ? kExitOk : kExitVerify;
}

int cmd_verify_uniformity(const VerifyOptions& o) {
  const auto t = verify_target(o);
  const auto seed = effective_seed(o.run.seed);
  auto oracle = enumerate_valid(t.instance);
  if (!oracle.defined) throw InputError("instance has no valid assignment");
  auto v = uniformity_test(t.sampler, oracle, o.samples, seed, {o.max_tv, o.min_p}, o.run.threads);
  json j{{"check", "uniformity"}, {"target", t.name}, {"seed", seed}, {"verdict", to_json(v)}};
  return finish(j, v.pass, o.run.out_path);
}

int cmd_verify_negative(const VerifyOptions& o) {
  const auto t = verify_target(o);
  const auto seed = effective_seed(o.run.seed);
  auto oracle = enumerate_valid(t.instance);
  if (oracle.valid.size() < 2) throw InputError("negative control needs at least two valid assignments");
  auto v = uniformity_test(biased_stub(oracle), oracle, o.samples, seed, {o.max_tv, o.min_p}, o.run.threads);
  // Expected-failure semantics: the suite passes when the biased stub is rejected.
  json j{{"check", "negative-control"}, {"target", t.name}, {"seed", seed}, {"stub_verdict", to_json(v)},
         {"stub_rejected", !v.pass}, {"pass", !v.pass}};
  return finish(j, !v.pass, o.run.out_path);
}

int cmd_verify_expected(const VerifyOptions& o) {
  const auto t = verify_target(o);
  const auto seed = effective_seed(o.run.seed);
  auto rep = expected_resamples_test(t.instance, o.runs, seed, {}, 3, o.run.threads);
  json j{{"check", "expected-resamples"}, {"target", t.name}, {"seed", seed}, {"report", to_json(rep)}};
  return finish(j, rep.pass, o.run.out_path);
}

int cmd_verify_first_round(const VerifyOptions& o) {
  const auto t = verify_target(o);
  const auto seed = effective_seed(o.run.seed);
  auto rep = first_round_test(t.instance, o.runs, seed, 3, o.run.threads);
  json j{{"check", "first-round"}, {"target", t.name}, {"seed", seed}, {"report", to_json(rep)}};
  return finish(j, rep.pass, o.run.out_path);
}

int cmd_verify_res(const VerifyOptions& o) {
  const auto seed = effective_seed(o.run.seed);
  auto rep = res_set_property_tests(o.trials, seed, {}, o.run.threads);
  json j{{"check", "res-properties"}, {"seed", seed}, {"report", to_json(rep)}};
  return finish(j, rep.pass, o.run.out_path);
}

// ---------------------------------------------------------------------------
// experiment

struct ExperimentOptions {
  std::string app = "hardcore";
  std::string lambda = "1/10";
  unsigned degree = 3;
  std::vector<std::size_t> sizes{128, 256, 512, 1024, 2048, 4096, 8192};
  std::uint64_t trials = 200;
  std::size_t n = 1000;
  std::size_t path_length = 10;
  std::string format = "csv";
  std::uint64_t round_cap = kDefaultRoundCap;
  CommonRun run;
};

int cmd_round_scaling(const ExperimentOptions& o) {
  ScalingParams p;
  p.app = parse_app(o.app);
  if (p.app == App::spanning_tree) throw InputError("round-scaling supports hardcore and sink-free");
  p.lambda = parse_rational(o.lambda, true);
  p.degree = o.degree;
  p.sizes = o.sizes;
  p.trials = o.trials;
  p.seed = effective_seed(o.run.seed);
  if (o.round_cap > 0) p.round_cap = o.round_cap;
  else p.round_cap.reset();
  p.threads = o.run.threads;
  for (auto n : p.sizes)
    if (n * p.degree % 2 != 0 || n <= p.degree) throw InputError("no " + std::to_string(p.degree) + "-regular graph on " + std::to_string(n) + " vertices");
  auto rep = round_scaling_experiment(p);
  Output out(o.run.out_path);
  if (o.format == "json") {
    json j = to_json(rep);
    j["seed"] = p.seed;
    out.stream() << j.dump(2) << '\n';
  } else {
    out.stream() << "# seed " << p.seed << '\n' << scaling_csv(rep);
  }
  std::cerr << "fit: mean_rounds = " << rep.a << " + " << rep.b << " log m; decay " << rep.decay << " (bound "
            << rep.decay_bound << ")" << (rep.pass ? "" : "; FAILED") << '\n';
  return rep.pass ? kExitOk : kExitVerify;
}

int cmd_disjoint_paths(const ExperimentOptions& o) {
  SamplerConfig c;
  c.seed = effective_seed(o.run.seed);
  if (o.round_cap > 0) c.round_cap = o.round_cap;
  else c.round_cap.reset();
  const Rational lambda = parse_rational(o.lambda, true);
  if (lambda <= 0) throw InputError("--lambda must be positive");
  if (o.path_length == 0 || o.n % o.path_length != 0) throw InputError("--L must divide --n");
  auto rep = disjoint_paths_experiment(o.n, o.path_length, lambda, o.trials, c, o.run.threads);
  Output out(o.run.out_path);
  if (o.format == "json") {
    json j = to_json(rep);
    j["seed"] = c.seed;
    out.stream() << j.dump(2) << '\n';
  } else {
    out.stream() << "# seed " << c.seed << '\n' << disjoint_paths_csv(rep);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prs: uniform sampling by partial rejection sampling"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "prs 1.0.0");
  std::function<int()> action;

  SampleOptions so;
  auto* sample = app.add_subcommand("sample", "draw samples from an instance, CNF formula or graph application");
  add_input_options(sample, so.input);
  sample->add_option("--sampler", so.sampler, "auto, mt, extremal or general (auto: specialised sampler for graphs, general otherwise)");
  sample->add_option("--count", so.count, "number of samples")->check(CLI::PositiveNumber);
  sample->add_option("--seed", so.run.seed, "base seed (default: random, printed in the output)");
  sample->add_option("--round-cap", so.round_cap, "maximum rounds per sample, 0 for unlimited");
  sample->add_option("--format", so.format, "auto, bits, literals (CNF) or edges (sink-free)");
  sample->add_option("--out", so.run.out_path, "output file (default stdout)");
  sample->callback([&] {
    if (so.sampler == "auto" && so.input.graph_path.empty()) so.sampler = "general";
    action = [&] { return cmd_sample(so); };
  });

  AnalyzeOptions ao;
  auto* analyze = app.add_subcommand("analyze", "exact Shearer quantities, CNF statistics and condition checks");
  add_input_options(analyze, ao.input);
  analyze->add_option("--k", ao.k, "clause width for condition checks");
  analyze->add_option("--d", ao.d, "variable degree for condition checks");
  analyze->add_option("--s", ao.s, "intersection for the sharing condition (default: infinity)");
  analyze->add_flag("--no-exact", ao.no_exact, "skip the exact Shearer report");
  analyze->add_option("--out", ao.out_path, "output file (default stdout)");
  analyze->callback([&] { action = [&] { return cmd_analyze(ao); }; });

  VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "statistical checks against exact oracles");
  verify->require_subcommand(1);
  auto add_verify = [&](const char* name, const char* help, std::function<int(const VerifyOptions&)> fn, bool target,
                        bool samples, bool runs) {
    auto* cmd = verify->add_subcommand(name, help);
    if (target) {
      cmd->add_option("--preset", vo.preset, "named case (default p5-hardcore)")
          ->check(CLI::IsMember(preset_names()));
      add_input_options(cmd, vo.input);
      cmd->add_option("--sampler", vo.sampler, "sampler for file input: mt, extremal or general");
    }
    if (samples) {
      cmd->add_option("--samples", vo.samples, "number of samples");
      cmd->add_option("--max-tv", vo.max_tv, "total variation threshold");
      cmd->add_option("--min-p", vo.min_p, "chi-square p-value threshold");
    }
    if (runs) cmd->add_option("--runs", vo.runs, "number of runs");
    if (!target && !samples && !runs) cmd->add_option("--trials", vo.trials, "number of random trials");
    cmd->add_option("--seed", vo.run.seed, "base seed (default: random, printed in the output)");
    cmd->add_option("--threads", vo.run.threads, "worker threads (default: hardware concurrency)");
    cmd->add_option("--out", vo.run.out_path, "output file (default stdout)");
    cmd->callback([&, fn] { action = [&, fn] { return fn(vo); }; });
  };
  add_verify("uniformity", "compare sampled outcomes with the exact distribution", cmd_verify_uniformity, true, true, false);
  add_verify("negative-control", "check that a biased stub is rejected", cmd_verify_negative, true, true, false);
  add_verify("expected-resamples", "compare mean resamples with the exact expectation", cmd_verify_expected, true, false, true);
  add_verify("first-round", "compare first-round occurring sets with exact q values", cmd_verify_first_round, true, false, true);
  add_verify("res-properties", "randomised checks of the resampling-set properties", cmd_verify_res, false, false, false);

  ExperimentOptions eo;
  auto* experiment = app.add_subcommand("experiment", "simulation experiments with CSV or JSON output");
  experiment->require_subcommand(1);
  auto add_common_experiment = [&](CLI::App* cmd) {
    cmd->add_option("--lambda", eo.lambda, "hard-core fugacity, rational or decimal");
    cmd->add_option("--trials", eo.trials, "trials per configuration");
    cmd->add_option("--format", eo.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--round-cap", eo.round_cap, "maximum rounds per run, 0 for unlimited");
    cmd->add_option("--seed", eo.run.seed, "base seed (default: random, printed in the output)");
    cmd->add_option("--threads", eo.run.threads, "worker threads (default: hardware concurrency)");
    cmd->add_option("--out", eo.run.out_path, "output file (default stdout)");
  };
  auto* scaling = experiment->add_subcommand("round-scaling", "mean rounds against size on random regular graphs");
  scaling->add_option("--app", eo.app, "hardcore or sink-free");
  scaling->add_option("--degree", eo.degree, "graph degree")->check(CLI::PositiveNumber);
  scaling->add_option("--sizes", eo.sizes, "vertex counts")->delimiter(',');
  add_common_experiment(scaling);
  scaling->callback([&] { action = [&] { return cmd_round_scaling(eo); }; });
  auto* paths = experiment->add_subcommand("disjoint-paths", "hard-core runs and endpoint law on disjoint paths");
  paths->add_option("--n", eo.n, "number of vertices");
  paths->add_option("--L", eo.path_length, "path length (must divide n)");
  add_common_experiment(paths);
  paths->callback([&] {
    if (eo.lambda == "1/10") eo.lambda = "1";
    action = [&] { return cmd_disjoint_paths(eo); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }
  try {
    return action ? action() : kExitInput;
  } catch (const CapExceeded& e) {
    std::cerr << "prs: " << e.what() << '\n';
    return kExitCap;
  } catch (const EnumerationLimit& e) {
    std::cerr << "prs: " << e.what() << '\n';
    return kExitInput;
  } catch (const InputError& e) {
    std::cerr << "prs: " << e.what() << '\n';
    return kExitInput;
  } catch (const PreconditionError& e) {
    std::cerr << "prs: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "prs: internal error: " << e.what() << '\n';
    return kExitInput;
  }
}
