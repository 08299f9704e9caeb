#pragma once

// Small named instances with exact oracles, shared by the CLI and the acceptance run.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "prs/cnf.hpp"
#include "prs/errors.hpp"
#include "prs/graph.hpp"
#include "prs/graph_apps.hpp"
#include "prs/model.hpp"
#include "prs/sampler.hpp"
#include "prs/verify.hpp"

namespace prs {

struct Preset {
  std::string name;
  std::string description;
  Instance instance;          // encoding the oracle is computed from
  AssignmentSampler sampler;  // specialised sampler mapped into the encoding's assignments
};

inline std::vector<std::string> preset_names() {
  return {"c3-sink-free", "c4-sink-free", "k4-spanning-tree", "p5-hardcore", "cnf-pair", "two-adjacent"};
}

inline Preset make_preset(std::string_view name) {
  Preset p;
  p.name = std::string(name);
  if (name == "c3-sink-free" || name == "c4-sink-free") {
    auto g = std::make_shared<Graph>(cycle_graph(name[1] == '3' ? 3 : 4));
    p.description = "sink-free orientations of the " + std::string(1, name[1]) + "-cycle (sink popping)";
    p.instance = sink_free_instance(*g);
    p.sampler = [g](std::uint64_t seed) {
      SamplerConfig c;
      c.seed = seed;
      return Assignment(sink_popping(*g, c).value.direction);
    };
  } else if (name == "k4-spanning-tree") {
    auto g = std::make_shared<Graph>(complete_graph(4));
    auto enc = std::make_shared<SpanningTreeEncoding>(spanning_tree_instance(*g, 0));
    p.description = "spanning trees of K4 rooted at 0 (cycle popping)";
    p.instance = enc->instance;
    p.sampler = [g, enc](std::uint64_t seed) {
      SamplerConfig c;
      c.seed = seed;
      return enc->assignment(*g, cycle_popping(*g, 0, c).value);
    };
  } else if (name == "p5-hardcore") {
    auto g = std::make_shared<Graph>(path_graph(5));
    p.description = "hard-core model on the 5-vertex path, lambda = 1";
    p.instance = hardcore_instance(*g, Rational(1));
    p.sampler = [g](std::uint64_t seed) {
      SamplerConfig c;
      c.seed = seed;
      return Assignment(hardcore_sample(*g, Rational(1), c).value.occupied);
    };
  } else if (name == "cnf-pair") {
    auto f = std::make_shared<CnfFormula>(CnfFormula{3, {{1, 2}, {2, 3}}});
    p.description = "(x1 or x2) and (x2 or x3) (general PRS)";
    p.instance = compile_cnf(*f);
    p.sampler = [f](std::uint64_t seed) {
      SamplerConfig c;
      c.seed = seed;
      return sample_cnf(*f, SamplerKind::general_prs, c).assignment;
    };
  } else if (name == "two-adjacent") {
    std::vector<VariableSpec> vars{VariableSpec::uniform(0, 2), VariableSpec::uniform(1, 2), VariableSpec::uniform(2, 2)};
    std::vector<EventSpec> events{{0, {0, 1}, {{0, 0}}}, {1, {0, 2}, {{1, 0}}}};
    p.description = "two events sharing one variable, p = 1/4 each, disjoint violations";
    p.instance = Instance(vars, events);
  } else {
    throw InputError("unknown preset '" + std::string(name) + "'");
  }
  if (!p.sampler) {
    auto inst = std::make_shared<Instance>(p.instance);
    p.sampler = [inst](std::uint64_t seed) {
      SamplerConfig c;
      c.seed = seed;
      c.kind = SamplerKind::extremal_prs;
      return extremal_prs(*inst, c).assignment;
    };
  }
  return p;
}

}  // namespace prs
