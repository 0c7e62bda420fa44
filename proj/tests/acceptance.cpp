// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sandpile/sandpile.hpp"

using namespace sandpile;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Collects the outcome of one criterion; keeps only the first failure.
struct Criterion {
  std::string name;
  std::uint64_t checks = 0;
  std::string failure;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok && failure.empty()) failure = what;
  }
  bool ok() const { return failure.empty(); }
};

std::string show(const Configuration& u) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < u.size(); ++i) os << (i ? "," : "") << u[i];
  os << ')';
  return os.str();
}

struct TreeCase {
  RootedGraph graph;
  std::uint64_t seed;
};

std::string where(const TreeCase& c) { return "tree seed " + std::to_string(c.seed) + ": "; }

/// Stable box order for mixed-radix walks.
bool next_in_box(const AmbientSpace& space, Configuration& u) {
  for (std::size_t k = 0; k < space.size(); ++k) {
    if (++u[k] < space.degree(k)) return true;
    u[k] = 0;
  }
  return false;
}

Configuration random_heights(const AmbientSpace& space, std::mt19937_64& rng, std::uint64_t factor) {
  Configuration u = Configuration::zero(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    u[i] = std::uniform_int_distribution<Height>(0, factor * space.degree(i))(rng);
  }
  return u;
}

AbstractElement random_element(const TreeStructure& tree, std::mt19937_64& rng) {
  AbstractElement v = AbstractElement::zero(tree);
  for (std::size_t j = 0; j < v.size(); ++j) v.residues[j] = std::uniform_int_distribution<std::uint64_t>(0, v.moduli[j] - 1)(rng);
  return v;
}

/// 200 small thick trees with loops and #G <= 2000, drawn by rejection.
std::vector<TreeCase> small_trees() {
  std::vector<TreeCase> out;
  std::mt19937_64 pick(20240601);
  for (std::uint64_t seed = 1; out.size() < 200; ++seed) {
    TreeGenParams p;
    p.vertices = std::uniform_int_distribution<std::size_t>(2, 7)(pick);
    p.max_mult = 4;
    p.loop_prob = 0.5;
    p.max_loop = 2;
    auto rg = random_thick_tree(p, seed);
    if (group_order(build_ambient(rg.graph, rg.sink)) > 2000) continue;
    out.push_back({std::move(rg), seed});
  }
  return out;
}

void window_equals_burning(const std::vector<TreeCase>& trees, Criterion& c) {
  const auto t0 = Clock::now();
  for (const auto& tc : trees) {
    const auto space = build_ambient(tc.graph.graph, tc.graph.sink);
    const auto tree = validate_thick_tree(space);
    Configuration u = Configuration::zero(space.size());
    do {
      const bool window = is_recurrent_tree(space, tree, u);
      const bool burn = burning_test(space, u).recurrent;
      c.expect(window == burn, where(tc) + "window and burning disagree on " + show(u));
    } while (next_in_box(space, u));
  }
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 30.0, "exhaustive comparison took " + std::to_string(elapsed) + " s");
}

void phi_isomorphism(const std::vector<TreeCase>& trees, std::mt19937_64& rng, Criterion& c) {
  for (const auto& tc : trees) {
    const auto space = build_ambient(tc.graph.graph, tc.graph.sink);
    const auto tree = validate_thick_tree(space);
    const auto group = enumerate_group(space, 1'000'000);
    std::set<AbstractElement> images;
    for (const auto& u : group) {
      const auto v = phi_full(space, tree, u);
      bool in_range = v.moduli == tree.parent_mult;
      for (std::size_t j = 0; in_range && j < v.size(); ++j) in_range = v.residues[j] < v.moduli[j];
      c.expect(in_range, where(tc) + "phi image out of range for " + show(u));
      c.expect(v.residues == oracle::brute_phi(space, u), where(tc) + "phi differs from path sums on " + show(u));
      images.insert(v);
    }
    // Injective with |G| = prod e, hence onto.
    c.expect(images.size() == group.size(), where(tc) + "phi is not injective");
    c.expect(BigInt(images.size()) == tree_group_order(tree), where(tc) + "phi is not onto");

    std::uniform_int_distribution<std::size_t> idx(0, group.size() - 1);
    for (int k = 0; k < 50; ++k) {
      const auto& a = group[idx(rng)];
      const auto& b = group[idx(rng)];
      const auto lhs = phi_full(space, tree, monoid_add(space, a, b));
      const auto rhs = group_add_abstract(phi_full(space, tree, a), phi_full(space, tree, b));
      c.expect(lhs == rhs, where(tc) + "phi is not additive on " + show(a) + " + " + show(b));
    }
  }
}

void round_trips(const std::vector<TreeCase>& trees, std::mt19937_64& rng, Criterion& c) {
  for (const auto& tc : trees) {
    const auto space = build_ambient(tc.graph.graph, tc.graph.sink);
    const auto tree = validate_thick_tree(space);
    for (const auto& u : enumerate_group(space, 1'000'000)) {
      c.expect(phi_inv(space, tree, phi_full(space, tree, u)) == u, where(tc) + "phi_inv(phi(u)) != u for " + show(u));
    }
    for (int k = 0; k < 100; ++k) {
      const auto v = random_element(tree, rng);
      const auto u = phi_inv(space, tree, v);
      c.expect(burning_test(space, u).recurrent, where(tc) + "phi_inv produced a non-recurrent " + show(u));
      c.expect(phi_full(space, tree, u) == v, where(tc) + "phi(phi_inv(v)) != v");
    }
  }
}

void closed_forms(const std::vector<TreeCase>& trees, std::mt19937_64& rng, Criterion& c) {
  std::uint64_t negative = 0;
  std::int64_t min_lambda = 0;
  for (const auto& tc : trees) {
    const auto space = build_ambient(tc.graph.graph, tc.graph.sink);
    const auto tree = validate_thick_tree(space);
    const auto id = identity(space);
    c.expect(identity_tree(space, tree) == id, where(tc) + "identity_tree " + show(identity_tree(space, tree)) +
                                                   " != beta fixpoint " + show(id));
    for (int k = 0; k < 100; ++k) {
      const auto u = random_heights(space, rng, 3);
      RepTrace trace;
      const auto closed = recurrent_rep_tree(space, tree, u, &trace);
      const auto engine = recurrent_representative(space, u);
      c.expect(closed == engine, where(tc) + "representative of " + show(u) + ": closed form " + show(closed) +
                                     " vs engine " + show(engine));
      negative += trace.negative_lambda;
      min_lambda = std::min(min_lambda, trace.min_lambda);
    }
  }
  c.expect(negative > 0, "no trial produced a negative lambda");
  c.name += " (negative lambda hits " + std::to_string(negative) + ", min " + std::to_string(min_lambda) + ")";
}

void order_identity(const std::vector<TreeCase>& trees, std::mt19937_64& rng, Criterion& c) {
  for (const auto& tc : trees) {
    const auto space = build_ambient(tc.graph.graph, tc.graph.sink);
    const auto tree = validate_thick_tree(space);
    const BigInt det = group_order(space);
    c.expect(det == tree_group_order(tree), where(tc) + "det " + det.str() + " != prod e");
    c.expect(BigInt(enumerate_group(space, 1'000'000).size()) == det, where(tc) + "|G| != det");
  }
  std::size_t general = 0;
  for (int t = 0; general < 100; ++t) {
    const std::size_t nv = std::uniform_int_distribution<std::size_t>(3, 5)(rng);
    const auto rg = oracle::random_connected(rng, nv, 4, 3, 2);
    if (rg.graph.edges().size() + 1 == rg.graph.vertex_count()) continue;
    ++general;
    const auto space = build_ambient(rg.graph, rg.sink);
    const BigInt det = group_order(space);
    c.expect(det == oracle::leibniz_det(space.delta_matrix()), "general graph " + std::to_string(t) + ": Bareiss != Leibniz");
    c.expect(BigInt(enumerate_group(space, 1'000'000).size()) == det,
             "general graph " + std::to_string(t) + ": |G| != det " + det.str());
  }
  c.name += " (" + std::to_string(trees.size()) + " trees, " + std::to_string(general) + " general graphs)";
}

void lattice(const std::vector<TreeCase>& trees, std::mt19937_64& rng, Criterion& c) {
  std::uniform_int_distribution<std::int64_t> entry(-20, 20);
  std::uint64_t members = 0;
  for (const auto& tc : trees) {
    const auto space = build_ambient(tc.graph.graph, tc.graph.sink);
    const auto tree = validate_thick_tree(space);
    const std::size_t n = space.size();
    const auto delta = space.delta_matrix();
    auto agree = [&](const std::vector<std::int64_t>& v) {
      const bool closed = lattice_contains_tree(space, tree, v);
      c.expect(closed == lattice_contains(space, v), where(tc) + "membership disagrees");
      members += closed;
    };
    for (int k = 0; k < 50; ++k) {
      std::vector<std::int64_t> v(n);
      for (auto& x : v) x = entry(rng);
      agree(v);
    }
    // Integer combinations of rows, so both answers are exercised.
    for (int k = 0; k < 50; ++k) {
      std::vector<std::int64_t> v(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t coeff = std::uniform_int_distribution<std::int64_t>(-3, 3)(rng);
        for (std::size_t j = 0; j < n; ++j) v[j] += coeff * delta[i][j];
      }
      if (k % 2) v[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)] += 1;
      agree(v);
    }

    // Subtree row sums: sum_{i in subtree(j)} Delta_i = e (delta_j - delta_{p(j)}).
    const auto paths = oracle::sink_paths(space);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<std::int64_t> sum(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        if (std::find(paths[i].begin(), paths[i].end(), j) == paths[i].end()) continue;
        for (std::size_t k = 0; k < n; ++k) sum[k] += delta[i][k];
      }
      std::vector<std::int64_t> expected(n, 0);
      const auto e = static_cast<std::int64_t>(tree.parent_mult[j]);
      expected[j] += e;
      if (paths[j].size() > 1) expected[paths[j][1]] -= e;
      c.expect(sum == expected, where(tc) + "subtree row sum mismatch at " + space.name(j));
    }
  }
  c.name += " (" + std::to_string(members) + " members)";
}

void sink_independence(Criterion& c) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    TreeGenParams p;
    p.vertices = 2 + seed % 14;
    p.max_mult = 36;
    p.loop_prob = 0.3;
    p.max_loop = 3;
    const auto rg = random_thick_tree(p, 9000 + seed);
    std::vector<std::uint64_t> reference;
    for (std::size_t v = 0; v < rg.graph.vertex_count(); ++v) {
      const auto space = build_ambient(rg.graph, rg.graph.name(v));
      const auto inv = abstract_invariants(space, validate_thick_tree(space));
      if (v == 0) reference = inv;
      c.expect(inv == reference, "tree seed " + std::to_string(9000 + seed) + ": invariants change with sink " +
                                     rg.graph.name(v));
    }
  }
}

void order_independence(const std::vector<TreeCase>& trees, std::mt19937_64& rng, Criterion& c) {
  for (const auto& tc : trees) {
    const auto space = build_ambient(tc.graph.graph, tc.graph.sink);
    for (int k = 0; k < 100; ++k) {
      const auto u = random_heights(space, rng, 4);
      const auto base = stabilize(space, u);
      for (int s = 0; s < 10; ++s) {
        const auto alt = stabilize(space, u, Schedule::shuffled(rng()));
        c.expect(alt.config == base.config && alt.odometer == base.odometer,
                 where(tc) + "schedule changes the stabilization of " + show(u));
      }
    }
  }
}

void performance(Criterion& c) {
  TreeGenParams p;
  p.vertices = 100'000;
  p.max_mult = 1'000'000;
  p.loop_prob = 0.1;
  p.max_loop = 5;
  const auto rg = random_thick_tree(p, 777);
  const auto space = build_ambient(rg.graph, rg.sink);
  const auto tree = validate_thick_tree(space);

  auto t0 = Clock::now();
  const auto id = identity_tree(space, tree);
  const double t_identity = seconds_since(t0);

  std::mt19937_64 rng(778);
  const auto v = random_element(tree, rng);
  t0 = Clock::now();
  const auto u = phi_inv(space, tree, v);
  const double t_inv = seconds_since(t0);

  c.expect(t_identity < 1.0, "identity_tree took " + std::to_string(t_identity) + " s");
  c.expect(t_inv < 1.0, "phi_inv took " + std::to_string(t_inv) + " s");
  c.expect(phi_full(space, tree, id) == AbstractElement::zero(tree), "phi(identity) is not zero");
  c.expect(phi_full(space, tree, u) == v, "phi(phi_inv(v)) != v at scale");
  c.expect(is_recurrent_tree(space, tree, u) && is_recurrent_tree(space, tree, id), "result outside the window");

  char buf[96];
  std::snprintf(buf, sizeof buf, " (identity_tree %.3f s, phi_inv %.3f s)", t_identity, t_inv);
  c.name += buf;
}

}  // namespace

int main() {
  const auto trees = small_trees();
  std::mt19937_64 rng(31337);

  std::vector<Criterion> results;
  auto run = [&](std::string name, auto&& body) {
    Criterion c;
    c.name = std::move(name);
    try {
      body(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::printf("%s %s [%llu checks]%s%s\n", c.ok() ? "PASS" : "FAIL", c.name.c_str(),
                static_cast<unsigned long long>(c.checks), c.ok() ? "" : ": ", c.failure.c_str());
    std::fflush(stdout);
    results.push_back(std::move(c));
  };

  run("window equals burning", [&](Criterion& c) { window_equals_burning(trees, c); });
  run("phi isomorphism", [&](Criterion& c) { phi_isomorphism(trees, rng, c); });
  run("round trips", [&](Criterion& c) { round_trips(trees, rng, c); });
  run("closed-form identity and representative", [&](Criterion& c) { closed_forms(trees, rng, c); });
  run("order identity", [&](Criterion& c) { order_identity(trees, rng, c); });
  run("lattice membership", [&](Criterion& c) { lattice(trees, rng, c); });
  run("sink independence", [&](Criterion& c) { sink_independence(c); });
  run("order independence", [&](Criterion& c) { order_independence(trees, rng, c); });
  run("performance", [&](Criterion& c) { performance(c); });

  std::size_t failed = 0;
  for (const auto& c : results) failed += !c.ok();
  std::printf("%zu/%zu criteria passed\n", results.size() - failed, results.size());
  return failed == 0 ? 0 : 1;
}
