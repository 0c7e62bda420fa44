#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "sandpile/checked.hpp"
#include "sandpile/error.hpp"

namespace sandpile {

using Multiplicity = std::uint64_t;
using Height = std::uint64_t;
using BigInt = boost::multiprecision::cpp_int;

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

/// Undirected multigraph with loops. Vertices are opaque string labels
/// interned to dense indices in insertion order; parallel edges are
/// collapsed into a multiplicity per unordered pair.
class MultiGraph {
 public:
  struct Edge {
    std::size_t a;
    std::size_t b;
    Multiplicity mult;
  };

  /// Returns the index of `name`, interning it if new.
  std::size_t add_vertex(std::string_view name) {
    auto it = index_.find(std::string(name));
    if (it != index_.end()) return it->second;
    std::size_t id = names_.size();
    names_.emplace_back(name);
    loops_.push_back(0);
    index_.emplace(names_.back(), id);
    return id;
  }

  void add_edge(std::string_view a, std::string_view b, Multiplicity mult) {
    if (a == b) {
      throw Error(Errc::InvalidMultiplicity,
                  "edge joins '" + std::string(a) + "' to itself; use a loop instead");
    }
    if (mult == 0) {
      throw Error(Errc::InvalidMultiplicity,
                  "edge " + std::string(a) + "-" + std::string(b) + " has multiplicity 0");
    }
    std::size_t ia = add_vertex(a);
    std::size_t ib = add_vertex(b);
    auto key = std::minmax(ia, ib);
    if (!pairs_.emplace(key, edges_.size()).second) {
      throw Error(Errc::DuplicateEdge,
                  "pair " + std::string(a) + "-" + std::string(b) + " listed twice");
    }
    edges_.push_back({ia, ib, mult});
  }

  /// Sets e_{i,i}. Zero means no loop.
  void set_loop(std::string_view v, Multiplicity mult) { loops_[add_vertex(v)] = mult; }

  std::size_t vertex_count() const noexcept { return names_.size(); }
  const std::string& name(std::size_t v) const { return names_.at(v); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  Multiplicity loop(std::size_t v) const { return loops_.at(v); }

  std::optional<std::size_t> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// e_{a,b}; for a == b this is the loop count.
  Multiplicity multiplicity(std::size_t a, std::size_t b) const {
    if (a == b) return loop(a);
    auto it = pairs_.find(std::minmax(a, b));
    return it == pairs_.end() ? 0 : edges_[it->second].mult;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Edge> edges_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> pairs_;
  std::vector<Multiplicity> loops_;
};

/// A multigraph paired with the name of its intended sink.
struct RootedGraph {
  MultiGraph graph;
  std::string sink;
};

/// Heights on the ordinary vertices, indexed by position in V0.
struct Configuration {
  std::vector<Height> heights;

  static Configuration zero(std::size_t n) { return {std::vector<Height>(n, 0)}; }

  /// Elementary vector: one grain at position i.
  static Configuration unit(std::size_t n, std::size_t i) {
    Configuration c = zero(n);
    c.heights.at(i) = 1;
    return c;
  }

  std::size_t size() const noexcept { return heights.size(); }
  Height& operator[](std::size_t i) { return heights[i]; }
  Height operator[](std::size_t i) const { return heights[i]; }

  friend bool operator==(const Configuration&, const Configuration&) = default;
  friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

class AmbientSpace;
AmbientSpace build_ambient(MultiGraph graph, std::string_view sink);

/// A connected multigraph with a distinguished sink. Immutable once built.
///
/// Degrees count each loop once: deg(i) = sum_{j != i} e_{i,j} + e_{i,i}.
/// With this convention the diagonal of the toppling matrix,
/// deg(i) - e_{i,i}, is the loop-free degree and the rows of the toppling
/// matrix sum to beta (the multiplicities into the sink).
///
/// The toppling matrix is kept sparse (diagonal plus adjacency) so that
/// very large trees can be handled; delta_matrix() materializes it densely.
class AmbientSpace {
 public:
  struct Neighbor {
    std::size_t pos;  // position in V0
    Multiplicity mult;
  };

  const MultiGraph& graph() const noexcept { return graph_; }
  std::size_t size() const noexcept { return ordinary_.size(); }
  std::size_t sink() const noexcept { return sink_; }
  const std::string& sink_name() const { return graph_.name(sink_); }

  /// Graph vertex index of each V0 position.
  std::span<const std::size_t> ordinary() const noexcept { return ordinary_; }
  std::size_t vertex_of(std::size_t pos) const { return ordinary_.at(pos); }
  const std::string& name(std::size_t pos) const { return graph_.name(ordinary_.at(pos)); }

  /// V0 position of a graph vertex, npos for the sink.
  std::size_t position_of_vertex(std::size_t v) const { return position_.at(v); }

  std::optional<std::size_t> position(std::string_view name) const {
    auto v = graph_.find(name);
    if (!v || *v == sink_) return std::nullopt;
    return position_[*v];
  }

  Multiplicity degree(std::size_t pos) const { return degree_.at(pos); }
  Multiplicity loop(std::size_t pos) const { return graph_.loop(ordinary_.at(pos)); }
  std::span<const Multiplicity> degrees() const noexcept { return degree_; }

  /// Ordinary neighbors of `pos` with their multiplicities (no loops, no sink).
  std::span<const Neighbor> neighbors(std::size_t pos) const {
    const auto begin = adj_offset_.at(pos);
    return std::span<const Neighbor>(adj_).subspan(begin, adj_offset_[pos + 1] - begin);
  }

  /// beta_i = e_{i,s}.
  std::span<const Multiplicity> beta() const noexcept { return beta_; }

  /// Toppling matrix entry for V0 positions i, j.
  std::int64_t delta(std::size_t i, std::size_t j) const {
    if (i == j) return static_cast<std::int64_t>(degree_.at(i) - loop(i));
    return -static_cast<std::int64_t>(graph_.multiplicity(ordinary_.at(i), ordinary_.at(j)));
  }

  /// Amount a single topple removes from its own vertex: deg(i) - e_{i,i}.
  Multiplicity self_loss(std::size_t pos) const { return degree_.at(pos) - loop(pos); }

  std::vector<std::vector<std::int64_t>> delta_matrix() const {
    const std::size_t n = size();
    std::vector<std::vector<std::int64_t>> m(n, std::vector<std::int64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      m[i][i] = delta(i, i);
      for (const auto& nb : neighbors(i)) m[i][nb.pos] = -static_cast<std::int64_t>(nb.mult);
    }
    return m;
  }

  /// Configuration sized for this space, or SizeMismatch.
  void require_size(const Configuration& u) const {
    if (u.size() != size()) {
      throw Error(Errc::SizeMismatch, "configuration has " + std::to_string(u.size()) +
                                          " entries, space has " + std::to_string(size()) +
                                          " ordinary vertices");
    }
  }

  bool is_stable(const Configuration& u) const {
    require_size(u);
    for (std::size_t i = 0; i < size(); ++i) {
      if (u[i] >= degree_[i]) return false;
    }
    return true;
  }

 private:
  friend AmbientSpace build_ambient(MultiGraph graph, std::string_view sink);
  AmbientSpace() = default;

  MultiGraph graph_;
  std::size_t sink_ = 0;
  std::vector<std::size_t> ordinary_;
  std::vector<std::size_t> position_;
  std::vector<Multiplicity> degree_;
  std::vector<Multiplicity> beta_;
  std::vector<std::size_t> adj_offset_;
  std::vector<Neighbor> adj_;
};

/// Validates `graph` against `sink` and caches degrees, beta and adjacency.
/// Throws UnknownVertex, Disconnected, InvalidMultiplicity or Overflow.
inline AmbientSpace build_ambient(MultiGraph graph, std::string_view sink) {
  auto sink_id = graph.find(sink);
  if (!sink_id) throw Error(Errc::UnknownVertex, "sink '" + std::string(sink) + "' is not a vertex");

  const std::size_t nv = graph.vertex_count();
  std::vector<std::vector<std::pair<std::size_t, Multiplicity>>> adj(nv);
  for (const auto& e : graph.edges()) {
    if (e.mult == 0) throw Error(Errc::InvalidMultiplicity, "stored multiplicity 0");
    adj[e.a].emplace_back(e.b, e.mult);
    adj[e.b].emplace_back(e.a, e.mult);
  }

  std::vector<bool> seen(nv, false);
  std::queue<std::size_t> frontier;
  frontier.push(*sink_id);
  seen[*sink_id] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    std::size_t v = frontier.front();
    frontier.pop();
    for (auto [w, m] : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        frontier.push(w);
      }
    }
  }
  if (reached != nv) {
    std::size_t lost = static_cast<std::size_t>(std::find(seen.begin(), seen.end(), false) - seen.begin());
    throw Error(Errc::Disconnected, "vertex '" + graph.name(lost) + "' has no path to the sink");
  }

  AmbientSpace space;
  space.sink_ = *sink_id;
  space.position_.assign(nv, npos);
  for (std::size_t v = 0; v < nv; ++v) {
    if (v == *sink_id) continue;
    space.position_[v] = space.ordinary_.size();
    space.ordinary_.push_back(v);
  }

  const std::size_t n = space.ordinary_.size();
  space.degree_.assign(n, 0);
  space.beta_.assign(n, 0);
  space.adj_offset_.assign(n + 1, 0);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t v = space.ordinary_[pos];
    Multiplicity deg = graph.loop(v);
    for (auto [w, m] : adj[v]) {
      deg = detail::add(deg, m);
      if (w == *sink_id) {
        space.beta_[pos] = m;
      } else {
        space.adj_.push_back({space.position_[w], m});
      }
    }
    // Toppling-matrix entries are handled as signed 64-bit values.
    detail::to_signed(deg);
    space.degree_[pos] = deg;
    space.adj_offset_[pos + 1] = space.adj_.size();
  }
  space.graph_ = std::move(graph);
  return space;
}

/// Componentwise-maximal stable configuration, deg(i) - 1 everywhere.
inline Configuration stable_bound(const AmbientSpace& space) {
  Configuration c = Configuration::zero(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) c[i] = space.degree(i) - 1;
  return c;
}

/// Exact determinant by fraction-free (Bareiss) elimination.
inline BigInt bareiss_determinant(std::vector<std::vector<BigInt>> m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  BigInt sign = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t swap = k + 1;
      while (swap < n && m[swap][k] == 0) ++swap;
      if (swap == n) return 0;
      std::swap(m[k], m[swap]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
      }
      m[i][k] = 0;
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

/// #G = det(Delta), exact. Cubic in |V0|; intended for small and medium graphs.
inline BigInt group_order(const AmbientSpace& space) {
  const auto dense = space.delta_matrix();
  std::vector<std::vector<BigInt>> m(dense.size());
  for (std::size_t i = 0; i < dense.size(); ++i) m[i].assign(dense[i].begin(), dense[i].end());
  BigInt det = bareiss_determinant(std::move(m));
  if (det <= 0) {
    throw std::logic_error("toppling matrix determinant is not positive; connectivity invariant broken");
  }
  return det;
}

/// General membership test for the lattice spanned by the rows of Delta:
/// solves Delta x = v exactly over the rationals (Delta is symmetric and
/// nonsingular) and checks that x is integral.
inline bool lattice_contains(const AmbientSpace& space, std::span<const std::int64_t> v) {
  using boost::multiprecision::cpp_rational;
  const std::size_t n = space.size();
  if (v.size() != n) throw Error(Errc::SizeMismatch, "lattice vector has the wrong length");
  const auto dense = space.delta_matrix();
  std::vector<std::vector<cpp_rational>> a(n, std::vector<cpp_rational>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = dense[i][j];
    a[i][n] = v[i];
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (a[piv][col] == 0) ++piv;  // nonsingular, so a pivot exists
    std::swap(a[piv], a[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const cpp_rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const cpp_rational x = a[i][n] / a[i][i];
    if (boost::multiprecision::denominator(x) != 1) return false;
  }
  return true;
}

}  // namespace sandpile
