#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "tripipe/graph_io.hpp"

namespace tripipe::testing {

/// Seeded gnp graph with its edges shuffled and randomly oriented, so tests
/// do not lean on the generator's lexicographic order.
inline std::vector<Edge> shuffled_gnp(std::uint32_t n, double p, std::uint64_t seed) {
  auto edges = generate({GeneratorModel::gnp, n, p, seed});
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::shuffle(edges.begin(), edges.end(), rng);
  for (auto& e : edges) {
    if (rng() & 1) std::swap(e.u, e.v);
  }
  return edges;
}

/// Every edge of `base` gets multiplicity 1, or with probability `dup`
/// multiplicity 2..max_mult; copies are scattered through the stream.
inline std::vector<Edge> duplicate_edges(const std::vector<Edge>& base, double dup,
                                         std::uint32_t max_mult, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::uint32_t> extra(2, max_mult);
  std::vector<Edge> out;
  for (const auto& e : base) {
    std::uint32_t m = coin(rng) < dup ? extra(rng) : 1;
    for (std::uint32_t i = 0; i < m; ++i) out.push_back((rng() & 1) ? e : Edge{e.v, e.u});
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

inline std::uint64_t choose3(std::uint64_t n) { return n < 3 ? 0 : n * (n - 1) * (n - 2) / 6; }
inline std::uint64_t choose2(std::uint64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

}  // namespace tripipe::testing
