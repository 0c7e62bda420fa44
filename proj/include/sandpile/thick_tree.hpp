#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "sandpile/checked.hpp"
#include "sandpile/error.hpp"
#include "sandpile/graph.hpp"

namespace sandpile {

/// Rooted structure of a thick tree with loops, rooted at the sink.
///
/// All indices are V0 positions; a parent equal to npos is the sink.
/// `bottom_up` lists every ordinary vertex after all of its descendants.
struct TreeStructure {
  std::vector<std::size_t> parent;
  std::vector<std::vector<std::size_t>> children;
  std::vector<Multiplicity> parent_mult;  // e_{j,p(j)}
  std::vector<std::size_t> bottom_up;
  std::vector<bool> leaf;

  std::size_t size() const noexcept { return parent.size(); }
};

/// Element of prod_j Z/e_{j,p(j)}, stored as preferred representatives.
struct AbstractElement {
  std::vector<std::uint64_t> residues;
  std::vector<std::uint64_t> moduli;

  static AbstractElement zero(const TreeStructure& tree) {
    return {std::vector<std::uint64_t>(tree.size(), 0), tree.parent_mult};
  }

  std::size_t size() const noexcept { return residues.size(); }

  friend bool operator==(const AbstractElement&, const AbstractElement&) = default;
  friend auto operator<=>(const AbstractElement&, const AbstractElement&) = default;
};

/// Internal quantities observed while evaluating recurrent_rep_tree.
struct RepTrace {
  std::size_t negative_lambda = 0;
  std::int64_t min_lambda = 0;
};

/// Checks that the loop-free simple graph underlying `space` is a tree and
/// roots it at the sink. Throws NotATree otherwise.
inline TreeStructure validate_thick_tree(const AmbientSpace& space) {
  const std::size_t nv = space.graph().vertex_count();
  const auto edges = space.graph().edges();
  // Connectivity is guaranteed by build_ambient; a tree also has |V| - 1 edges.
  if (edges.size() + 1 != nv) {
    throw Error(Errc::NotATree, "underlying simple graph has " + std::to_string(edges.size()) + " edges on " +
                                    std::to_string(nv) + " vertices, so it contains a cycle");
  }
  std::vector<std::vector<std::pair<std::size_t, Multiplicity>>> adj(nv);
  for (const auto& e : edges) {
    adj[e.a].emplace_back(e.b, e.mult);
    adj[e.b].emplace_back(e.a, e.mult);
  }

  const std::size_t n = space.size();
  TreeStructure tree;
  tree.parent.assign(n, npos);
  tree.children.assign(n, {});
  tree.parent_mult.assign(n, 0);
  tree.leaf.assign(n, false);
  tree.bottom_up.reserve(n);

  std::vector<bool> seen(nv, false);
  std::vector<std::size_t> bfs_order;
  bfs_order.reserve(n);
  std::queue<std::size_t> frontier;
  frontier.push(space.sink());
  seen[space.sink()] = true;
  while (!frontier.empty()) {
    const std::size_t v = frontier.front();
    frontier.pop();
    const std::size_t vpos = space.position_of_vertex(v);
    for (auto [w, m] : adj[v]) {
      if (seen[w]) continue;
      seen[w] = true;
      const std::size_t wpos = space.position_of_vertex(w);
      tree.parent[wpos] = vpos;
      tree.parent_mult[wpos] = m;
      if (vpos != npos) tree.children[vpos].push_back(wpos);
      bfs_order.push_back(wpos);
      frontier.push(w);
    }
  }
  tree.bottom_up.assign(bfs_order.rbegin(), bfs_order.rend());
  for (std::size_t j = 0; j < n; ++j) tree.leaf[j] = tree.children[j].empty();
  return tree;
}

namespace detail {

inline void require_tree_size(const TreeStructure& tree, std::size_t n) {
  if (tree.size() != n) throw Error(Errc::SizeMismatch, "tree structure does not match the configuration");
}

/// Lower end of the recurrence window at j: deg(j) - e_{j,p(j)}.
inline std::int64_t window_low(const AmbientSpace& space, const TreeStructure& tree, std::size_t j) {
  return static_cast<std::int64_t>(space.degree(j) - tree.parent_mult[j]);
}

}  // namespace detail

/// Recurrence on a thick tree: deg(j) - e_{j,p(j)} <= u_j < deg(j) for all j.
inline bool is_recurrent_tree(const AmbientSpace& space, const TreeStructure& tree, const Configuration& u) {
  space.require_size(u);
  detail::require_tree_size(tree, u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (u[j] >= space.degree(j) || u[j] < space.degree(j) - tree.parent_mult[j]) return false;
  }
  return true;
}

/// The value in [deg(j) - e_{j,p(j)}, deg(j)) congruent to m mod e_{j,p(j)}.
inline std::int64_t window_representative(const AmbientSpace& space, const TreeStructure& tree, std::size_t j,
                                          std::int64_t m) {
  const std::int64_t e = detail::to_signed(tree.parent_mult.at(j));
  const std::int64_t low = detail::window_low(space, tree, j);
  return low + detail::floor_mod(detail::floor_mod(m, e) - detail::floor_mod(low, e), e);
}

/// phi(u)_j = (sum of u over the subtree at j) mod e_{j,p(j)}. Defined on
/// every configuration; on recurrent ones it is the group isomorphism.
inline AbstractElement phi_full(const AmbientSpace& space, const TreeStructure& tree, const Configuration& u) {
  space.require_size(u);
  detail::require_tree_size(tree, u.size());
  std::vector<std::uint64_t> subtree = u.heights;
  AbstractElement out{std::vector<std::uint64_t>(u.size(), 0), tree.parent_mult};
  for (std::size_t j : tree.bottom_up) {
    out.residues[j] = subtree[j] % tree.parent_mult[j];
    if (tree.parent[j] != npos) subtree[tree.parent[j]] = detail::add(subtree[tree.parent[j]], subtree[j]);
  }
  return out;
}

inline void require_element(const TreeStructure& tree, const AbstractElement& v) {
  if (v.size() != tree.size() || v.moduli.size() != tree.size()) {
    throw Error(Errc::SizeMismatch, "abstract element has the wrong length");
  }
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (v.moduli[j] != tree.parent_mult[j]) throw Error(Errc::ModulusMismatch, "modulus differs from e_{j,p(j)}");
    if (v.residues[j] >= v.moduli[j]) throw Error(Errc::ModulusMismatch, "residue is not a preferred representative");
  }
}

/// Inverse of phi on the sandpile group, evaluated bottom-up:
/// u_j = f_j(v_j - sum of u over the strict descendants of j), where f_j
/// picks the representative inside the recurrence window. f_j is applied
/// at leaves too; without loops it is the identity on {0..e-1} there.
inline Configuration phi_inv(const AmbientSpace& space, const TreeStructure& tree, const AbstractElement& v) {
  require_element(tree, v);
  const std::size_t n = tree.size();
  Configuration u = Configuration::zero(n);
  std::vector<std::uint64_t> below(n, 0);  // sum of u over strict descendants
  for (std::size_t j : tree.bottom_up) {
    const std::uint64_t e = tree.parent_mult[j];
    const std::int64_t m = static_cast<std::int64_t>(v.residues[j]) - static_cast<std::int64_t>(below[j] % e);
    u[j] = static_cast<Height>(window_representative(space, tree, j, m));
    if (tree.parent[j] != npos) {
      auto& acc = below[tree.parent[j]];
      acc = detail::add(acc, detail::add(below[j], u[j]));
    }
  }
  return u;
}

/// Closed-form identity element: e_j = lambda_j e_{j,p(j)} - S_j with
/// S_j the sum of e over strict descendants and
/// lambda_j = floor((deg(j) + S_j - 1) / e_{j,p(j)}).
inline Configuration identity_tree(const AmbientSpace& space, const TreeStructure& tree) {
  detail::require_tree_size(tree, space.size());
  const std::size_t n = tree.size();
  Configuration id = Configuration::zero(n);
  std::vector<std::int64_t> below(n, 0);
  for (std::size_t j : tree.bottom_up) {
    const std::int64_t e = detail::to_signed(tree.parent_mult[j]);
    const std::int64_t deg = detail::to_signed(space.degree(j));
    const std::int64_t lambda = detail::floor_div(detail::sub(detail::add(deg, below[j]), 1), e);
    const std::int64_t value = detail::sub(detail::mul(lambda, e), below[j]);
    id[j] = detail::to_unsigned(value);
    if (tree.parent[j] != npos) {
      auto& acc = below[tree.parent[j]];
      acc = detail::add(acc, detail::add(below[j], value));
    }
  }
  return id;
}

/// Closed-form recurrent representative sigma(u + e) of the class of u:
/// r_j = u_j + lambda_j e_{j,p(j)} + D_j with D_j = sum over strict
/// descendants i of (u_i - r_i) and
/// lambda_j = floor((deg(j) - u_j - D_j - 1) / e_{j,p(j)}).
inline Configuration recurrent_rep_tree(const AmbientSpace& space, const TreeStructure& tree, const Configuration& u,
                                        RepTrace* trace = nullptr) {
  space.require_size(u);
  detail::require_tree_size(tree, u.size());
  const std::size_t n = tree.size();
  Configuration rep = Configuration::zero(n);
  std::vector<std::int64_t> drift(n, 0);  // D_j
  for (std::size_t j : tree.bottom_up) {
    const std::int64_t e = detail::to_signed(tree.parent_mult[j]);
    const std::int64_t deg = detail::to_signed(space.degree(j));
    const std::int64_t uj = detail::to_signed(u[j]);
    const std::int64_t lambda =
        detail::floor_div(detail::sub(detail::sub(detail::sub(deg, uj), drift[j]), 1), e);
    if (trace) {
      if (lambda < 0) ++trace->negative_lambda;
      trace->min_lambda = std::min(trace->min_lambda, lambda);
    }
    const std::int64_t value = detail::add(detail::add(uj, detail::mul(lambda, e)), drift[j]);
    rep[j] = detail::to_unsigned(value);
    if (tree.parent[j] != npos) {
      auto& acc = drift[tree.parent[j]];
      acc = detail::add(acc, detail::add(drift[j], detail::sub(uj, value)));
    }
  }
  return rep;
}

/// Componentwise sum in prod_j Z/e_j.
inline AbstractElement group_add_abstract(const AbstractElement& v, const AbstractElement& w) {
  if (v.moduli != w.moduli || v.residues.size() != v.moduli.size() || w.residues.size() != w.moduli.size()) {
    throw Error(Errc::ModulusMismatch, "abstract elements live in different groups");
  }
  AbstractElement out = v;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const std::uint64_t e = v.moduli[j];
    const std::uint64_t a = v.residues[j] % e;
    const std::uint64_t b = w.residues[j] % e;
    out.residues[j] = a >= e - b ? a - (e - b) : a + b;
  }
  return out;
}

/// Lambda membership via subtree sums: e_{j,p(j)} | sum_{i in subtree(j)} v_i.
inline bool lattice_contains_tree(const AmbientSpace& space, const TreeStructure& tree,
                                  std::span<const std::int64_t> v) {
  if (v.size() != space.size()) throw Error(Errc::SizeMismatch, "lattice vector has the wrong length");
  detail::require_tree_size(tree, v.size());
  std::vector<std::int64_t> subtree(v.begin(), v.end());
  for (std::size_t j : tree.bottom_up) {
    if (detail::floor_mod(subtree[j], detail::to_signed(tree.parent_mult[j])) != 0) return false;
    if (tree.parent[j] != npos) subtree[tree.parent[j]] = detail::add(subtree[tree.parent[j]], subtree[j]);
  }
  return true;
}

/// Prime-power factorization of n > 0 by trial division, ascending.
inline std::vector<std::uint64_t> prime_power_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  auto take = [&](std::uint64_t p) {
    std::uint64_t pk = 1;
    while (n % p == 0) {
      n /= p;
      pk *= p;
    }
    if (pk > 1) out.push_back(pk);
  };
  take(2);
  for (std::uint64_t p = 3; p <= n / p; p += 2) take(p);
  if (n > 1) out.push_back(n);
  return out;
}

/// Elementary divisors (prime powers, sorted) of prod_j Z/e_{j,p(j)}.
inline std::vector<std::uint64_t> abstract_invariants(const TreeStructure& tree) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t e : tree.parent_mult) {
    auto f = prime_power_factors(e);
    out.insert(out.end(), f.begin(), f.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::uint64_t> abstract_invariants(const AmbientSpace& space, const TreeStructure& tree) {
  detail::require_tree_size(tree, space.size());
  return abstract_invariants(tree);
}

/// prod_j e_{j,p(j)}, the order of the group.
inline BigInt tree_group_order(const TreeStructure& tree) {
  BigInt order = 1;
  for (std::uint64_t e : tree.parent_mult) order *= e;
  return order;
}

}  // namespace sandpile
