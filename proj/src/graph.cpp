#include "osense/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace osense {

bool InteractionGraph::has_edge(int a, int b) const {
  if (a > b) std::swap(a, b);
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(a, b));
}

bool is_connected(const InteractionGraph& g) {
  if (g.n_vertices == 0) return false;
  std::vector<std::vector<int>> adj(g.n_vertices);
  for (auto [a, b] : g.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> seen(g.n_vertices, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  return count == g.n_vertices;
}

InteractionGraph sample_connected_er(int n_vertices, int n_edges, Rng& rng) {
  const std::int64_t total = std::int64_t(n_vertices) * (n_vertices - 1) / 2;
  if (n_vertices < 2 || n_edges < n_vertices - 1 || n_edges > total)
    throw std::invalid_argument("sample_connected_er: infeasible edge count");
  std::vector<std::pair<int, int>> all_pairs;
  all_pairs.reserve(total);
  for (int i = 0; i < n_vertices; ++i)
    for (int j = i + 1; j < n_vertices; ++j) all_pairs.emplace_back(i, j);

  InteractionGraph g;
  g.n_vertices = n_vertices;
  while (true) {
    // Floyd's algorithm: n_edges distinct pair indices, uniform.
    std::set<std::int64_t> chosen;
    for (std::int64_t t = total - n_edges; t < total; ++t) {
      std::int64_t r = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(t) + 1));
      if (!chosen.insert(r).second) chosen.insert(t);
    }
    g.edges.clear();
    for (std::int64_t idx : chosen) g.edges.push_back(all_pairs[idx]);
    std::sort(g.edges.begin(), g.edges.end());
    if (is_connected(g)) break;
  }
  g.couplings.assign(g.edges.size(), 1.0);
  return g;
}

InteractionGraph assign_couplings(InteractionGraph g, CouplingMode mode, Rng& rng) {
  g.couplings.resize(g.edges.size());
  for (auto& j : g.couplings)
    j = (mode == CouplingMode::AFM) ? 1.0 : (rng.next_u64() & 1 ? 1.0 : -1.0);
  return g;
}

namespace {

void add_edge(InteractionGraph& g, int a, int b) {
  if (a > b) std::swap(a, b);
  g.edges.emplace_back(a, b);
}

void finish(InteractionGraph& g) {
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  g.couplings.assign(g.edges.size(), 1.0);
}

// Largest divisor of n that is <= sqrt(n) and at least 2.
int near_square_rows(int n) {
  for (int a = static_cast<int>(std::sqrt(double(n))); a >= 2; --a)
    if (n % a == 0) return a;
  return 0;
}

}  // namespace

InteractionGraph regular_lattice(LatticeKind kind, int n) {
  InteractionGraph g;
  g.n_vertices = n;
  switch (kind) {
    case LatticeKind::Chain:
      if (n < 2) throw std::invalid_argument("chain needs >= 2 vertices");
      for (int i = 0; i + 1 < n; ++i) add_edge(g, i, i + 1);
      break;
    case LatticeKind::Ring:
      if (n < 3) throw std::invalid_argument("ring needs >= 3 vertices");
      for (int i = 0; i + 1 < n; ++i) add_edge(g, i, i + 1);
      add_edge(g, 0, n - 1);
      break;
    case LatticeKind::SquareLadder: {
      if (n < 4 || n % 2 != 0) throw std::invalid_argument("square ladder needs even n >= 4");
      const int L = n / 2;  // legs 0..L-1 and L..2L-1
      for (int i = 0; i + 1 < L; ++i) {
        add_edge(g, i, i + 1);
        add_edge(g, L + i, L + i + 1);
      }
      for (int i = 0; i < L; ++i) add_edge(g, i, L + i);
      break;
    }
    case LatticeKind::TriangularLadder:
      // Zigzag strip: rail plus next-nearest bonds.
      if (n < 4 || n % 2 != 0) throw std::invalid_argument("triangular ladder needs even n >= 4");
      for (int i = 0; i + 1 < n; ++i) add_edge(g, i, i + 1);
      for (int i = 0; i + 2 < n; ++i) add_edge(g, i, i + 2);
      break;
    case LatticeKind::Square2D: {
      const int a = near_square_rows(n);
      if (a == 0) throw std::invalid_argument("square lattice needs a rectangular factorization");
      const int b = n / a;
      for (int r = 0; r < a; ++r)
        for (int c = 0; c < b; ++c) {
          if (c + 1 < b) add_edge(g, r * b + c, r * b + c + 1);
          if (r + 1 < a) add_edge(g, r * b + c, (r + 1) * b + c);
        }
      break;
    }
    case LatticeKind::Honeycomb: {
      // Brick-wall cluster: full rows, vertical bonds on alternating columns.
      if (n % 4 != 0) throw std::invalid_argument("honeycomb cluster needs n divisible by 4");
      const int a = near_square_rows(n);
      if (a == 0) throw std::invalid_argument("honeycomb cluster needs a rectangular factorization");
      const int b = n / a;
      for (int r = 0; r < a; ++r)
        for (int c = 0; c < b; ++c) {
          if (c + 1 < b) add_edge(g, r * b + c, r * b + c + 1);
          if (r + 1 < a && (r + c) % 2 == 0) add_edge(g, r * b + c, (r + 1) * b + c);
        }
      break;
    }
  }
  finish(g);
  if (!is_connected(g)) throw std::invalid_argument("lattice construction produced a disconnected graph");
  return g;
}

namespace {

std::vector<std::pair<int, int>> swap_automorphisms_impl(const InteractionGraph& g,
                                                         bool respect_couplings) {
  std::set<std::pair<int, int>> edge_set(g.edges.begin(), g.edges.end());
  auto coupling_of = [&](int a, int b) {
    auto it = std::lower_bound(g.edges.begin(), g.edges.end(), std::make_pair(a, b));
    return g.couplings[static_cast<std::size_t>(it - g.edges.begin())];
  };
  std::vector<std::pair<int, int>> out;
  for (int m = 0; m < g.n_vertices; ++m)
    for (int n = m + 1; n < g.n_vertices; ++n) {
      bool ok = true;
      for (std::size_t e = 0; e < g.edges.size() && ok; ++e) {
        auto [a, b] = g.edges[e];
        int a2 = a == m ? n : a == n ? m : a;
        int b2 = b == m ? n : b == n ? m : b;
        if (a2 > b2) std::swap(a2, b2);
        if (!edge_set.count({a2, b2}))
          ok = false;
        else if (respect_couplings && coupling_of(a2, b2) != g.couplings[e])
          ok = false;
      }
      if (ok) out.emplace_back(m, n);
    }
  return out;
}

}  // namespace

std::vector<std::pair<int, int>> find_swap_automorphisms(const InteractionGraph& g) {
  return swap_automorphisms_impl(g, false);
}

std::vector<std::pair<int, int>> find_coupling_swap_automorphisms(const InteractionGraph& g) {
  return swap_automorphisms_impl(g, true);
}

std::string graph_to_json(const InteractionGraph& g) {
  nlohmann::json j;
  j["n_vertices"] = g.n_vertices;
  j["edges"] = nlohmann::json::array();
  for (auto [a, b] : g.edges) j["edges"].push_back({a, b});
  j["couplings"] = g.couplings;
  return j.dump(2);
}

InteractionGraph graph_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  InteractionGraph g;
  g.n_vertices = j.at("n_vertices").get<int>();
  for (const auto& e : j.at("edges")) g.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  g.couplings = j.at("couplings").get<std::vector<double>>();
  if (g.couplings.size() != g.edges.size())
    throw std::invalid_argument("graph json: couplings/edges length mismatch");
  if (!std::is_sorted(g.edges.begin(), g.edges.end()))
    throw std::invalid_argument("graph json: edges must be sorted");
  return g;
}

LatticeKind lattice_kind_from_string(const std::string& s) {
  if (s == "chain") return LatticeKind::Chain;
  if (s == "ring") return LatticeKind::Ring;
  if (s == "square_ladder") return LatticeKind::SquareLadder;
  if (s == "triangular_ladder") return LatticeKind::TriangularLadder;
  if (s == "square2d") return LatticeKind::Square2D;
  if (s == "honeycomb") return LatticeKind::Honeycomb;
  throw std::invalid_argument("unknown lattice kind: " + s);
}

CouplingMode coupling_mode_from_string(const std::string& s) {
  if (s == "AFM" || s == "afm") return CouplingMode::AFM;
  if (s == "RandomSign" || s == "random_sign") return CouplingMode::RandomSign;
  throw std::invalid_argument("unknown coupling mode: " + s);
}

std::string to_string(CouplingMode m) {
  return m == CouplingMode::AFM ? "AFM" : "RandomSign";
}

}  // namespace osense
