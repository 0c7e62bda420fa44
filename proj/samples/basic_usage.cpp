// Builds a small thick tree, computes its identity two ways and maps a
// configuration through the isomorphism to prod Z/e_{j,p(j)} and back.

#include <iostream>

#include "sandpile/sandpile.hpp"

int main() {
  sandpile::MultiGraph g;
  g.add_edge("a", "s", 2);
  g.add_edge("a", "b", 3);
  g.add_edge("b", "c", 2);
  g.set_loop("b", 1);
  const auto space = sandpile::build_ambient(std::move(g), "s");
  const auto tree = sandpile::validate_thick_tree(space);

  const auto closed = sandpile::identity_tree(space, tree);
  const auto oracle = sandpile::identity(space);
  std::cout << "identity (closed form):";
  for (std::size_t i = 0; i < space.size(); ++i) std::cout << " " << space.name(i) << "=" << closed[i];
  std::cout << "\n#G = " << sandpile::group_order(space) << "\n";

  sandpile::Configuration u{{7, 0, 5}};
  const auto image = sandpile::phi_full(space, tree, u);
  const auto back = sandpile::phi_inv(space, tree, image);
  const bool ok = closed == oracle && back == sandpile::recurrent_representative(space, u);
  std::cout << (ok ? "closed forms agree with the engine\n" : "MISMATCH\n");
  return ok ? 0 : 1;
}
