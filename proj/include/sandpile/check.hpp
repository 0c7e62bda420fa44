#pragma once

#include <cstdint>
#include <exception>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sandpile/engine.hpp"
#include "sandpile/graph.hpp"
#include "sandpile/io.hpp"
#include "sandpile/thick_tree.hpp"

namespace sandpile {

struct CheckOptions {
  std::uint64_t seed = 0;
  std::size_t trials = 100;
  std::size_t shuffled_schedules = 3;
  // Exact rational lattice solves are skipped above this many ordinary vertices.
  std::size_t lattice_limit = 12;
  // Test mode: perturbs the engine's recurrent representative so that the
  // failure path and reproducer output can be exercised.
  bool corrupt_oracle = false;
};

struct CheckFailure {
  std::optional<std::size_t> trial;  // empty for whole-graph checks
  std::string suite;
  std::string detail;
  std::optional<Configuration> config;
};

struct CheckReport {
  bool thick_tree = false;
  std::size_t trials = 0;
  std::size_t passed = 0;
  bool setup_ok = true;
  std::optional<CheckFailure> first_failure;

  bool ok() const noexcept { return setup_ok && passed == trials; }
};

namespace detail {

struct SuiteFailure {
  std::string suite;
  std::string detail;
};

inline void expect(bool cond, const char* suite, const std::string& detail = {}) {
  if (!cond) throw SuiteFailure{suite, detail};
}

inline Configuration random_heights(const AmbientSpace& space, std::mt19937_64& rng, std::uint64_t factor,
                                    bool exclusive) {
  Configuration c = Configuration::zero(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    const std::uint64_t hi = exclusive ? space.degree(i) - 1 : space.degree(i) * factor;
    c[i] = std::uniform_int_distribution<std::uint64_t>(0, hi)(rng);
  }
  return c;
}

inline std::vector<std::int64_t> difference(const Configuration& a, const Configuration& b) {
  std::vector<std::int64_t> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = sub(to_signed(a[i]), to_signed(b[i]));
  return d;
}

class TrialRunner {
 public:
  TrialRunner(const AmbientSpace& space, const std::optional<TreeStructure>& tree, const CheckOptions& opt,
              const Configuration& id)
      : space_(space), tree_(tree), opt_(opt), id_(id) {}

  Configuration engine_rep(const Configuration& c) const {
    Configuration r = recurrent_representative(space_, c);
    if (opt_.corrupt_oracle && r.size() > 0) r[0] += 1;
    return r;
  }

  // Runs every suite for one trial; throws SuiteFailure on the first mismatch.
  void run(std::mt19937_64& rng, Configuration& current) const {
    const std::size_t n = space_.size();
    const Configuration c = random_heights(space_, rng, 3, false);
    current = c;

    const Stabilized base = stabilize(space_, c);
    for (std::size_t k = 0; k < opt_.shuffled_schedules; ++k) {
      const Stabilized alt = stabilize(space_, c, Schedule::shuffled(rng()));
      expect(alt.config == base.config && alt.odometer == base.odometer, "order-independence");
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::int64_t expected = to_signed(c[i]);
      expected = sub(expected, mul(space_.delta(i, i), to_signed(base.odometer.counts[i])));
      for (const auto& nb : space_.neighbors(i)) {
        expected = add(expected, mul(to_signed(nb.mult), to_signed(base.odometer.counts[nb.pos])));
      }
      expect(expected == to_signed(base.config[i]), "conservation");
    }

    const Configuration rep = engine_rep(c);
    expect(is_recurrent(space_, rep), "representative-recurrent");
    if (n <= opt_.lattice_limit) {
      const auto d = difference(c, rep);
      expect(lattice_contains(space_, d), "representative-class");
    }

    const Configuration other = engine_rep(random_heights(space_, rng, 3, false));
    const Configuration sum = monoid_add(space_, rep, other);
    expect(sum == monoid_add(space_, other, rep), "commutativity");
    expect(monoid_add(space_, id_, rep) == rep, "identity-neutral");
    expect(monoid_add(space_, rep, group_inverse(space_, rep)) == id_, "inverse");

    if (!tree_) return;
    const TreeStructure& tree = *tree_;

    expect(recurrent_rep_tree(space_, tree, c) == rep, "closed-form-representative");
    const AbstractElement image = phi_full(space_, tree, rep);
    expect(phi_inv(space_, tree, image) == rep, "phi-inverse-round-trip");
    expect(phi_full(space_, tree, c) == image, "phi-class-compatibility");
    expect(phi_full(space_, tree, sum) == group_add_abstract(image, phi_full(space_, tree, other)),
           "phi-homomorphism");

    AbstractElement v = AbstractElement::zero(tree);
    for (std::size_t j = 0; j < n; ++j) {
      v.residues[j] = std::uniform_int_distribution<std::uint64_t>(0, tree.parent_mult[j] - 1)(rng);
    }
    expect(phi_full(space_, tree, phi_inv(space_, tree, v)) == v, "phi-round-trip");

    const Configuration stable = random_heights(space_, rng, 1, true);
    current = stable;
    expect(is_recurrent_tree(space_, tree, stable) == burning_test(space_, stable).recurrent, "window-burning");
    current = c;

    if (n <= opt_.lattice_limit) {
      std::vector<std::int64_t> w(n);
      for (auto& x : w) x = std::uniform_int_distribution<std::int64_t>(-20, 20)(rng);
      expect(lattice_contains_tree(space_, tree, w) == lattice_contains(space_, w), "lattice-membership");
    }
  }

 private:
  const AmbientSpace& space_;
  const std::optional<TreeStructure>& tree_;
  const CheckOptions& opt_;
  const Configuration& id_;
};

}  // namespace detail

/// Randomized cross-validation of the general engine against its own
/// invariants and, on thick trees, against the closed forms. Deterministic
/// in (space, options).
inline CheckReport run_checks(const AmbientSpace& space, const CheckOptions& opt) {
  CheckReport report;
  report.trials = opt.trials;

  std::optional<TreeStructure> tree;
  try {
    tree = validate_thick_tree(space);
  } catch (const Error& e) {
    if (e.code() != Errc::NotATree) throw;
  }
  report.thick_tree = tree.has_value();

  const Configuration id = identity(space);
  auto fail_setup = [&](const char* suite, std::string detail) {
    report.setup_ok = false;
    if (!report.first_failure) report.first_failure = CheckFailure{std::nullopt, suite, std::move(detail), std::nullopt};
  };
  if (tree) {
    if (identity_tree(space, *tree) != id) fail_setup("closed-form-identity", "identity_tree differs from engine identity");
    if (tree_group_order(*tree) != group_order(space)) fail_setup("group-order", "prod e_{j,p(j)} != det(Delta)");
  }

  const detail::TrialRunner runner(space, tree, opt, id);
  for (std::size_t t = 0; t < opt.trials; ++t) {
    std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                      static_cast<std::uint32_t>(t)};
    std::mt19937_64 rng(seq);
    Configuration current;
    try {
      runner.run(rng, current);
      ++report.passed;
    } catch (const detail::SuiteFailure& f) {
      if (!report.first_failure) report.first_failure = CheckFailure{t, f.suite, f.detail, current};
    } catch (const std::exception& e) {
      if (!report.first_failure) report.first_failure = CheckFailure{t, "exception", e.what(), current};
    }
  }
  return report;
}

/// Human-readable summary; includes a reproducer when something failed.
inline std::string format_report(const AmbientSpace& space, const CheckReport& r, const CheckOptions& opt) {
  std::ostringstream os;
  if (!r.thick_tree) os << "graph is not a thick tree with loops: running engine-level suites only\n";
  os << (r.ok() ? "PASS " : "FAIL ") << r.passed << "/" << r.trials << "\n";
  if (r.first_failure) {
    const auto& f = *r.first_failure;
    os << "first failure: suite=" << f.suite;
    if (f.trial) os << " trial=" << *f.trial;
    os << " seed=" << opt.seed << "\n";
    if (!f.detail.empty()) os << "detail: " << f.detail << "\n";
    os << "graph: " << io::graph_to_json(space).dump() << "\n";
    if (f.config) os << "config: " << io::configuration_to_json(space, *f.config).dump() << "\n";
  }
  return os.str();
}

}  // namespace sandpile
