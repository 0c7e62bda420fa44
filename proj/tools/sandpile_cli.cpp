// sandpile: command-line front end for the sandpile library.
//
// Every subcommand reads a graph file (except gen-tree), calls one library
// operation and prints the result as text or JSON (--format json).
// Exit status: 0 success, 1 failed check, 2 error.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sandpile/sandpile.hpp"

namespace {

using sandpile::AmbientSpace;
using sandpile::Configuration;
using sandpile::io::Json;

constexpr const char* kVersion = "0.1.0";

int log_level() {
  static const int level = [] {
    const char* env = std::getenv("SANDPILE_LOG");
    if (!env || !*env) return 0;
    try {
      return std::stoi(env);
    } catch (...) {
      return 1;
    }
  }();
  return level;
}

void warn(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "sandpile: warning: " << msg << "\n";
}

struct Options {
  std::string graph;
  std::string format = "text";
  std::uint64_t seed = 0;
  std::size_t trials = 100;
  std::uint64_t cap = 1'000'000;
  std::string method;
  std::string config;
  std::string other;
  std::string element;
  bool corrupt_oracle = false;
  // generator
  std::size_t n = 0;
  std::uint64_t max_mult = 1;
  double loop_prob = 0.0;
  std::uint64_t max_loop = 2;
};

bool json_out(const Options& o) { return o.format == "json"; }

// Inline JSON, or @path to read it from a file.
Json read_json_arg(const std::string& arg) {
  if (!arg.empty() && arg.front() == '@') return sandpile::io::read_file(arg.substr(1));
  return sandpile::io::parse_text(arg);
}

Json number_or_string(const sandpile::BigInt& v) {
  if (v <= std::numeric_limits<std::uint64_t>::max()) return static_cast<std::uint64_t>(v);
  return v.str();
}

std::optional<sandpile::TreeStructure> try_tree(const AmbientSpace& space) {
  try {
    return sandpile::validate_thick_tree(space);
  } catch (const sandpile::Error& e) {
    if (e.code() != sandpile::Errc::NotATree) throw;
    return std::nullopt;
  }
}

sandpile::TreeStructure require_tree(const AmbientSpace& space) { return sandpile::validate_thick_tree(space); }

std::string text_config(const AmbientSpace& space, const Configuration& u) {
  std::ostringstream os;
  for (std::size_t i = 0; i < u.size(); ++i) os << (i ? " " : "") << space.name(i) << ":" << u[i];
  return os.str();
}

std::string text_group(const std::vector<std::uint64_t>& moduli) {
  std::ostringstream os;
  bool first = true;
  for (auto m : moduli) {
    if (m == 1) continue;
    os << (first ? "" : " x ") << "Z/" << m;
    first = false;
  }
  return first ? "trivial" : os.str();
}

void emit(const Options& o, const std::string& command, Json result, const std::string& text) {
  if (json_out(o)) {
    Json j;
    j["command"] = command;
    j["version"] = kVersion;
    j["result"] = std::move(result);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
  }
}

// Resolves --method: closed forms on thick trees unless the oracle is requested.
bool use_closed_form(const Options& o, const std::optional<sandpile::TreeStructure>& tree) {
  if (o.method == "oracle") return false;
  if (o.method == "closed" && !tree) {
    throw sandpile::Error(sandpile::Errc::NotATree, "--method closed needs a thick tree with loops");
  }
  return tree.has_value();
}

int cmd_info(const Options& o) {
  const AmbientSpace space = sandpile::io::load_space(sandpile::io::read_file(o.graph));
  const auto tree = try_tree(space);
  const sandpile::BigInt order = tree ? sandpile::tree_group_order(*tree) : sandpile::group_order(space);
  const std::size_t n = space.size();
  constexpr std::size_t kDenseLimit = 64;

  Json r;
  r["vertices"] = space.graph().vertex_count();
  r["sink"] = space.sink_name();
  Json deg = Json::object(), beta = Json::object();
  for (std::size_t i = 0; i < n; ++i) {
    deg[space.name(i)] = space.degree(i);
    beta[space.name(i)] = space.beta()[i];
  }
  r["degree"] = deg;
  r["delta"] = n <= kDenseLimit ? Json(space.delta_matrix()) : Json(nullptr);
  r["beta"] = beta;
  r["group_order"] = number_or_string(order);
  r["thick_tree"] = tree.has_value();
  if (tree) {
    Json pm = Json::object();
    for (std::size_t i = 0; i < n; ++i) pm[space.name(i)] = tree->parent_mult[i];
    r["parent_multiplicity"] = pm;
    r["abstract_group"] = tree->parent_mult;
    r["elementary_divisors"] = sandpile::abstract_invariants(*tree);
  }

  std::ostringstream os;
  os << "vertices: " << space.graph().vertex_count() << " (sink " << space.sink_name() << ")\n";
  os << "degrees: ";
  for (std::size_t i = 0; i < n; ++i) os << (i ? " " : "") << space.name(i) << ":" << space.degree(i);
  os << "\n";
  if (n <= kDenseLimit) {
    os << "delta:\n";
    for (const auto& row : space.delta_matrix()) {
      os << " ";
      for (auto x : row) os << " " << x;
      os << "\n";
    }
  }
  os << "beta: ";
  for (std::size_t i = 0; i < n; ++i) os << (i ? " " : "") << space.name(i) << ":" << space.beta()[i];
  os << "\n#G = " << order.str() << "\n";
  if (tree) {
    os << "thick tree with loops\nparent multiplicities: ";
    for (std::size_t i = 0; i < n; ++i) os << (i ? " " : "") << space.name(i) << ":" << tree->parent_mult[i];
    os << "\nabstract group: " << text_group(tree->parent_mult) << "\n";
  } else {
    os << "not a thick tree\n";
  }
  emit(o, "info", r, os.str());
  return 0;
}

int cmd_stabilize(const Options& o) {
  const AmbientSpace space = sandpile::io::load_space(sandpile::io::read_file(o.graph));
  const Configuration u = sandpile::io::parse_configuration(space, read_json_arg(o.config));
  const auto s = sandpile::stabilize(space, u);
  Json odo = Json::object();
  for (std::size_t i = 0; i < space.size(); ++i) odo[space.name(i)] = s.odometer.counts[i];
  Json r{{"config", sandpile::io::configuration_to_json(space, s.config)}, {"odometer", odo}};
  std::ostringstream os;
  os << text_config(space, s.config) << "\nodometer: " << text_config(space, Configuration{s.odometer.counts});
  emit(o, "stabilize", r, os.str());
  return 0;
}

int cmd_recurrent(const Options& o) {
  const AmbientSpace space = sandpile::io::load_space(sandpile::io::read_file(o.graph));
  const Configuration u = sandpile::io::parse_configuration(space, read_json_arg(o.config));
  const auto rep = sandpile::burning_test(space, u);
  Json order = Json::array(), unburned = Json::array();
  for (auto i : rep.burn_order) order.push_back(space.name(i));
  for (auto i : rep.unburned) unburned.push_back(space.name(i));
  Json r{{"recurrent", rep.recurrent}, {"burn_order", order}, {"unburned", unburned}};
  std::ostringstream os;
  os << (rep.recurrent ? "recurrent" : "not recurrent") << "\nburn order:";
  for (auto i : rep.burn_order) os << " " << space.name(i);
  if (!rep.recurrent) {
    os << "\nunburned:";
    for (auto i : rep.unburned) os << " " << space.name(i);
  }
  emit(o, "recurrent", r, os.str());
  return 0;
}

int cmd_identity(const Options& o) {
  const AmbientSpace space = sandpile::io::load_space(sandpile::io::read_file(o.graph));
  const auto tree = try_tree(space);
  const bool closed = use_closed_form(o, tree);
  const Configuration id = closed ? sandpile::identity_tree(space, *tree) : sandpile::identity(space);
  Json r{{"method", closed ? "closed" : "oracle"}, {"config", sandpile::io::configuration_to_json(space, id)}};
  emit(o, "identity", r, text_config(space, id));
  return 0;
}

int cmd_rep(const Options& o) {
  const AmbientSpace space = sandpile::io::load_space(sandpile::io::read_file(o.graph));
  const Configuration u = sandpile::io::parse_configuration(space, read_json_arg(o.config));
  const auto tree = try_tree(space);
  const bool closed = use_closed_form(o, tree);
  const Configuration rep =
      closed ? sandpile::recurrent_rep_tree(space, *tree, u) : sandpile::recurrent_representative(space, u);
  Json r{{"method", closed ? "closed" : "oracle"}, {"config", sandpile::io::configuration_to_json(space, rep)}};
  emit(o, "rep", r, text_config(space, rep));
  return 0;
}

int cmd_phi(const Options& o) {
  const AmbientSpace space = sandpile::io::load_space(sandpile::io::read_file(o.graph));
  const auto tree = require_tree(space);
  const Configuration u = sandpile::io::parse_configuration(space, read_json_arg(o.config));
  const auto v = sandpile::phi_full(space, tree, u);
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    os << (i ? " " : "") << space.name(i) << ":" << v.residues[i] << " mod " << v.moduli[i];
  }
  emit(o, "phi", sandpile::io::element_to_json(space, v), os.str());
  return 0;
}

int cmd_phi_inv(const Options& o) {
  const AmbientSpace space = sandpile::io::load_space(sandpile::io::read_file(o.graph));
  const auto tree = require_tree(space);
  const auto v = sandpile::io::parse_element(space, tree, read_json_arg(o.element));
  const Configuration u = sandpile::phi_inv(space, tree, v);
  emit(o, "phi-inv", sandpile::io::configuration_to_json(space, u), text_config(space, u));
  return 0;
}

int cmd_add(const Options& o) {
  const AmbientSpace space = sandpile::io::load_space(sandpile::io::read_file(o.graph));
  const Configuration u = sandpile::io::parse_configuration(space, read_json_arg(o.config));
  const Configuration v = sandpile::io::parse_configuration(space, read_json_arg(o.other));
  sandpile::Diagnostics diag;
  const Configuration sum = sandpile::monoid_add(space, u, v, &diag);
  for (const auto& m : diag.messages) warn(m);
  emit(o, "add", sandpile::io::configuration_to_json(space, sum), text_config(space, sum));
  return 0;
}

int cmd_inverse(const Options& o) {
  const AmbientSpace space = sandpile::io::load_space(sandpile::io::read_file(o.graph));
  const Configuration u = sandpile::io::parse_configuration(space, read_json_arg(o.config));
  const Configuration inv = sandpile::group_inverse(space, u);
  emit(o, "inverse", sandpile::io::configuration_to_json(space, inv), text_config(space, inv));
  return 0;
}

int cmd_enumerate(const Options& o) {
  const AmbientSpace space = sandpile::io::load_space(sandpile::io::read_file(o.graph));
  const auto all = sandpile::enumerate_group(space, o.cap);
  Json r = Json::array();
  std::ostringstream os;
  for (const auto& u : all) {
    r.push_back(sandpile::io::configuration_to_json(space, u));
    os << text_config(space, u) << "\n";
  }
  os << all.size() << " recurrent configurations\n";
  emit(o, "enumerate", r, os.str());
  return 0;
}

sandpile::TreeGenParams gen_params(const Options& o) {
  return {o.n, o.max_mult, o.loop_prob, o.max_loop};
}

int cmd_check(const Options& o) {
  std::optional<AmbientSpace> space;
  if (!o.graph.empty()) {
    space = sandpile::io::load_space(sandpile::io::read_file(o.graph));
  } else if (o.n > 0) {
    auto g = sandpile::random_thick_tree(gen_params(o), o.seed);
    space = sandpile::build_ambient(std::move(g.graph), g.sink);
  } else {
    throw sandpile::Error(sandpile::Errc::BadParameters, "check needs a graph file or --n");
  }
  sandpile::CheckOptions opt;
  opt.seed = o.seed;
  opt.trials = o.trials;
  opt.corrupt_oracle = o.corrupt_oracle;
  const auto report = sandpile::run_checks(*space, opt);
  if (!report.thick_tree) warn("graph is not a thick tree; closed-form suites skipped");

  Json r{{"seed", o.seed},
         {"thick_tree", report.thick_tree},
         {"trials", report.trials},
         {"passed", report.passed},
         {"ok", report.ok()}};
  if (report.first_failure) {
    const auto& f = *report.first_failure;
    Json fj{{"suite", f.suite}, {"detail", f.detail}, {"graph", sandpile::io::graph_to_json(*space)}};
    fj["trial"] = f.trial ? Json(*f.trial) : Json(nullptr);
    fj["config"] = f.config ? sandpile::io::configuration_to_json(*space, *f.config) : Json(nullptr);
    r["failure"] = fj;
  }
  emit(o, "check", r, sandpile::format_report(*space, report, opt));
  return report.ok() ? 0 : 1;
}

int cmd_gen_tree(const Options& o) {
  const auto g = sandpile::random_thick_tree(gen_params(o), o.seed);
  Json j = sandpile::io::graph_to_json(g.graph, g.sink);
  j["generator"] = Json{{"command", "gen-tree"},
                        {"version", kVersion},
                        {"seed", o.seed},
                        {"n", o.n},
                        {"max_mult", o.max_mult},
                        {"loop_prob", o.loop_prob},
                        {"max_loop", o.max_loop}};
  std::cout << j.dump(json_out(o) ? 2 : -1) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Abelian sandpile groups of multigraphs, with closed forms for thick trees"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options o;

  auto add_common = [&](CLI::App* sub, bool needs_graph) {
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    if (needs_graph) sub->add_option("graph", o.graph, "Graph JSON file")->required()->check(CLI::ExistingFile);
  };
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("-c,--config", o.config, "Configuration as inline JSON or @file")->required();
  };
  auto add_method = [&](CLI::App* sub) {
    sub->add_option("--method", o.method, "closed (thick trees) or oracle (general engine)")
        ->check(CLI::IsMember({"closed", "oracle"}));
  };
  auto add_gen = [&](CLI::App* sub, bool required) {
    auto* n = sub->add_option("--n", o.n, "Vertex count including the sink");
    if (required) n->required();
    sub->add_option("--max-mult", o.max_mult, "Largest edge multiplicity");
    sub->add_option("--loop-prob", o.loop_prob, "Probability that a vertex carries loops");
    sub->add_option("--max-loop", o.max_loop, "Largest loop count");
    sub->add_option("--seed", o.seed, "Random seed");
  };

  std::vector<std::pair<CLI::App*, int (*)(const Options&)>> table;
  auto sub = [&](const char* name, const char* desc, int (*fn)(const Options&)) {
    auto* s = app.add_subcommand(name, desc);
    table.emplace_back(s, fn);
    return s;
  };

  add_common(sub("info", "Degrees, toppling matrix, beta, #G and tree structure", cmd_info), true);
  {
    auto* s = sub("stabilize", "Stabilize a configuration and report its odometer", cmd_stabilize);
    add_common(s, true);
    add_config(s);
  }
  {
    auto* s = sub("recurrent", "Burning-algorithm recurrence test", cmd_recurrent);
    add_common(s, true);
    add_config(s);
  }
  {
    auto* s = sub("identity", "Identity element of the sandpile group", cmd_identity);
    add_common(s, true);
    add_method(s);
  }
  {
    auto* s = sub("rep", "Recurrent representative of a configuration's class", cmd_rep);
    add_common(s, true);
    add_config(s);
    add_method(s);
  }
  {
    auto* s = sub("phi", "Image of a configuration in prod Z/e_{j,p(j)} (thick trees)", cmd_phi);
    add_common(s, true);
    add_config(s);
  }
  {
    auto* s = sub("phi-inv", "Recurrent configuration for an abstract element (thick trees)", cmd_phi_inv);
    add_common(s, true);
    s->add_option("-e,--element", o.element, "Abstract element as inline JSON or @file")->required();
  }
  {
    auto* s = sub("add", "Sum of two configurations, stabilized", cmd_add);
    add_common(s, true);
    add_config(s);
    s->add_option("--other", o.other, "Second configuration as inline JSON or @file")->required();
  }
  {
    auto* s = sub("inverse", "Group inverse of a recurrent configuration", cmd_inverse);
    add_common(s, true);
    add_config(s);
  }
  {
    auto* s = sub("enumerate", "List every recurrent configuration", cmd_enumerate);
    add_common(s, true);
    s->add_option("--cap", o.cap, "Refuse when #G exceeds this bound");
  }
  {
    auto* s = sub("check", "Randomized cross-validation of engine and closed forms", cmd_check);
    add_common(s, false);
    s->add_option("graph", o.graph, "Graph JSON file (or use --n to generate one)")->check(CLI::ExistingFile);
    s->add_option("--trials", o.trials, "Number of trials");
    add_gen(s, false);
    s->add_flag("--corrupt-oracle", o.corrupt_oracle, "Test mode: perturb the engine oracle")->group("");
  }
  {
    auto* s = sub("gen-tree", "Emit a random thick tree with loops as graph JSON", cmd_gen_tree);
    s->add_option("--format", o.format, "json pretty-prints")->check(CLI::IsMember({"text", "json"}));
    add_gen(s, true);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (auto& [s, fn] : table) {
      if (s->parsed()) return fn(o);
    }
  } catch (const sandpile::Error& e) {
    std::cerr << "sandpile: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
