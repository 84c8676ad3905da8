#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "osense/rng.hpp"

namespace osense {

struct InteractionGraph {
  int n_vertices = 0;
  std::vector<std::pair<int, int>> edges;  // i < j, sorted lexicographically
  std::vector<double> couplings;           // J per edge, same order

  bool has_edge(int a, int b) const;
};

bool is_connected(const InteractionGraph& g);

// Uniform over connected graphs with exactly n_edges edges (rejection
// sampling on the unconditioned uniform edge-set distribution).
InteractionGraph sample_connected_er(int n_vertices, int n_edges, Rng& rng);

enum class CouplingMode { AFM, RandomSign };

InteractionGraph assign_couplings(InteractionGraph g, CouplingMode mode, Rng& rng);

enum class LatticeKind { Chain, Ring, SquareLadder, TriangularLadder, Square2D, Honeycomb };

// Nearest-neighbor edge list of the named geometry with open boundaries
// (except Ring), all J = +1.
InteractionGraph regular_lattice(LatticeKind kind, int n_vertices);

// All vertex pairs (m, n) whose transposition maps the edge set to itself.
// Couplings are ignored; see find_coupling_swap_automorphisms.
std::vector<std::pair<int, int>> find_swap_automorphisms(const InteractionGraph& g);

// Swap automorphisms that also preserve the coupling assignment; these are
// the pairs whose bond exchange operator commutes with the Hamiltonian.
std::vector<std::pair<int, int>> find_coupling_swap_automorphisms(const InteractionGraph& g);

std::string graph_to_json(const InteractionGraph& g);
InteractionGraph graph_from_json(const std::string& text);

LatticeKind lattice_kind_from_string(const std::string& s);
CouplingMode coupling_mode_from_string(const std::string& s);
std::string to_string(CouplingMode m);

}  // namespace osense
