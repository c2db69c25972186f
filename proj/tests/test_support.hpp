#ifndef GDCSMA_TEST_SUPPORT_HPP
#define GDCSMA_TEST_SUPPORT_HPP

// Independent reference implementations shared by the unit and acceptance tests.

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gdcsma/graph.hpp"

namespace gdcsma::test {

/// Every generated family at size n: star, cycle, every valid circulant,
/// complete and the path as an explicit edge list.
inline std::vector<GraphSpec> families(int n) {
  std::vector<GraphSpec> out;
  if (n >= 2) out.push_back({GraphFamily::kStar, n, 0, {}});
  if (n >= 3) out.push_back({GraphFamily::kCycle, n, 0, {}});
  for (int k = 2; k <= n - 2; k += 2) out.push_back({GraphFamily::kCirculant, n, k, {}});
  out.push_back({GraphFamily::kComplete, n, 0, {}});
  std::vector<Edge> path;
  for (int i = 0; i + 1 < n; ++i) path.emplace_back(i, i + 1);
  out.push_back({GraphFamily::kExplicit, n, 0, path});
  return out;
}

inline std::string describe(const GraphSpec& s) {
  return s.family == GraphFamily::kExplicit ? "path-n" + std::to_string(s.n) : s.label();
}

/// Adjacency as plain edge pairs, read back through the public API.
inline bool edge_between(const InterferenceGraph& g, int a, int b) {
  for (const auto& [u, v] : g.edges()) {
    if ((u == a && v == b) || (u == b && v == a)) return true;
  }
  return false;
}

/// Independent sets by filtering all 2^n subsets, ascending.
inline std::vector<std::uint32_t> brute_independent_sets(const InterferenceGraph& g) {
  const auto edges = g.edges();
  std::vector<std::uint32_t> out;
  const std::uint64_t limit = std::uint64_t{1} << g.size();
  for (std::uint64_t s = 0; s < limit; ++s) {
    bool ok = true;
    for (const auto& [a, b] : edges) {
      if (((s >> a) & 1U) && ((s >> b) & 1U)) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(static_cast<std::uint32_t>(s));
  }
  return out;
}

/// Minimum vertex cover by edge branching with iterative deepening.
inline bool cover_within(std::vector<Edge> edges, int budget) {
  if (edges.empty()) return true;
  if (budget == 0) return false;
  const auto [u, v] = edges.front();
  for (const int pick : {u, v}) {
    std::vector<Edge> rest;
    for (const Edge& e : edges) {
      if (e.first != pick && e.second != pick) rest.push_back(e);
    }
    if (cover_within(rest, budget - 1)) return true;
  }
  return false;
}

inline int brute_min_vertex_cover(const InterferenceGraph& g) {
  const auto edges = g.edges();
  for (int k = 0;; ++k) {
    if (cover_within(edges, k)) return k;
  }
}

/// Random graph with edge probability p.
inline InterferenceGraph random_graph(int n, double p, std::mt19937_64& gen) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (coin(gen)) edges.emplace_back(a, b);
    }
  }
  return InterferenceGraph(n, edges);
}

/// Unnormalized product-form weight of a schedule.
inline double product_weight(std::uint32_t bits, const std::vector<double>& lambda) {
  double w = 1.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if ((bits >> i) & 1U) w *= lambda[i];
  }
  return w;
}

}  // namespace gdcsma::test

#endif  // GDCSMA_TEST_SUPPORT_HPP
