#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "sandpile/error.hpp"
#include "sandpile/graph.hpp"

namespace sandpile {

struct TreeGenParams {
  std::size_t vertices = 2;  // including the sink
  Multiplicity max_mult = 1;
  double loop_prob = 0.0;
  Multiplicity max_loop = 2;
};

/// Random thick tree with loops. The sink is "s" and the other vertices are
/// "v1".."v{n-1}"; vertex k attaches to a uniformly chosen earlier vertex.
/// The output is a pure function of (params, seed).
inline RootedGraph random_thick_tree(const TreeGenParams& p, std::uint64_t seed) {
  if (p.vertices < 2) throw Error(Errc::BadParameters, "a tree needs at least 2 vertices");
  if (p.max_mult < 1) throw Error(Errc::BadParameters, "max_mult must be at least 1");
  if (!(p.loop_prob >= 0.0 && p.loop_prob <= 1.0)) throw Error(Errc::BadParameters, "loop_prob must lie in [0, 1]");
  if (p.loop_prob > 0.0 && p.max_loop < 1) throw Error(Errc::BadParameters, "max_loop must be at least 1");

  std::mt19937_64 rng(seed);
  auto name = [](std::size_t k) { return k == 0 ? std::string("s") : "v" + std::to_string(k); };
  RootedGraph out;
  out.sink = "s";
  out.graph.add_vertex("s");
  std::uniform_int_distribution<Multiplicity> mult(1, p.max_mult);
  for (std::size_t k = 1; k < p.vertices; ++k) {
    std::uniform_int_distribution<std::size_t> parent(0, k - 1);
    const std::size_t par = parent(rng);
    out.graph.add_edge(name(k), name(par), mult(rng));
  }
  if (p.loop_prob > 0.0) {
    std::bernoulli_distribution has_loop(p.loop_prob);
    std::uniform_int_distribution<Multiplicity> loop(1, p.max_loop);
    for (std::size_t k = 1; k < p.vertices; ++k) {
      if (has_loop(rng)) out.graph.set_loop(name(k), loop(rng));
    }
  }
  return out;
}

}  // namespace sandpile
