#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tripipe/error.hpp"
#include "tripipe/graph_io.hpp"

// Brute-force triangle counters. They are written to be obviously correct,
// not fast, and share no code with the pipeline.

namespace tripipe::oracle {

inline constexpr std::size_t kMaxNodes = 2000;
inline constexpr std::size_t kMaxEdges = 50000;

/// Symmetric adjacency matrix with a zero diagonal. Entries are edge
/// multiplicities; a simple graph stores 0/1.
class DenseGraph {
 public:
  explicit DenseGraph(std::size_t n) : n_(n), cells_(n * n, 0) {
    if (n > kMaxNodes) throw Error(ErrorKind::invalid_spec, "oracle graphs are capped at 2000 nodes");
  }

  /// Builds the simple graph underlying `edges`: repeats collapse to 1.
  static DenseGraph simple(std::size_t n, std::span<const Edge> edges) {
    DenseGraph g(n);
    for (const auto& e : edges) g.set(e.u, e.v, 1);
    return g;
  }

  /// Keeps multiplicities.
  static DenseGraph multi(std::size_t n, std::span<const Edge> edges) {
    DenseGraph g(n);
    for (const auto& e : edges) g.set(e.u, e.v, g.at(e.u, e.v) + 1);
    return g;
  }

  std::size_t size() const noexcept { return n_; }
  std::uint32_t at(std::size_t a, std::size_t b) const { return cells_[a * n_ + b]; }
  bool adjacent(std::size_t a, std::size_t b) const { return at(a, b) != 0; }

  void set(std::size_t a, std::size_t b, std::uint32_t value) {
    if (a == b) throw Error(ErrorKind::self_loop, "dense graphs have a zero diagonal");
    cells_[a * n_ + b] = value;
    cells_[b * n_ + a] = value;
  }

  std::vector<std::size_t> neighbours(std::size_t v) const {
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u < n_; ++u) {
      if (adjacent(v, u)) out.push_back(u);
    }
    return out;
  }

 private:
  std::size_t n_;
  std::vector<std::uint32_t> cells_;
};

struct NaiveCount {
  std::uint64_t doubled = 0;  // 2T of the matrix loop: one unit per ordered closed pair
  std::uint64_t triangles = 0;
};

/// The matrix triple loop: for every v and every ordered pair (u, w) of its
/// neighbours, an edge (u, w) adds one half. Half-units are accumulated as
/// integers, so the triangle count is `doubled / 6`.
inline NaiveCount naive_count_detail(const DenseGraph& g) {
  NaiveCount out;
  for (std::size_t v = 0; v < g.size(); ++v) {
    for (std::size_t u = 0; u < g.size(); ++u) {
      if (!g.adjacent(v, u)) continue;
      for (std::size_t w = 0; w < g.size(); ++w) {
        if (g.adjacent(v, w) && g.adjacent(u, w)) ++out.doubled;
      }
    }
  }
  if (out.doubled % 6 != 0) {
    throw Error(ErrorKind::protocol_violation, "triangle accumulator not divisible by six");
  }
  out.triangles = out.doubled / 6;
  return out;
}

inline std::uint64_t naive_count(const DenseGraph& g) { return naive_count_detail(g).triangles; }

/// Sum over v of the number of edges among v's neighbours, divided by 3.
inline std::uint64_t node_iterator_count(const DenseGraph& g) {
  std::uint64_t sum = 0;
  for (std::size_t v = 0; v < g.size(); ++v) {
    auto nv = g.neighbours(v);
    for (std::size_t i = 0; i < nv.size(); ++i) {
      for (std::size_t j = i + 1; j < nv.size(); ++j) {
        if (g.adjacent(nv[i], nv[j])) ++sum;
      }
    }
  }
  return sum / 3;
}

/// Unordered triples of distinct edge occurrences whose endpoints form a
/// triangle on three distinct nodes. Self-loops never qualify.
inline std::uint64_t multigraph_count(std::span<const Edge> edges) {
  if (edges.size() > kMaxEdges) throw Error(ErrorKind::invalid_spec, "oracle edge cap exceeded");
  std::uint64_t count = 0;
  const std::size_t m = edges.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Edge& a = edges[i];
    if (a.u == a.v) continue;
    for (std::size_t j = i + 1; j < m; ++j) {
      const Edge& b = edges[j];
      if (b.u == b.v || a.same_pair(b)) continue;
      // a and b must share exactly one endpoint; the other two close it.
      NodeId x, y;
      if (a.u == b.u) { x = a.v; y = b.v; }
      else if (a.u == b.v) { x = a.v; y = b.u; }
      else if (a.v == b.u) { x = a.u; y = b.v; }
      else if (a.v == b.v) { x = a.u; y = b.u; }
      else continue;
      for (std::size_t k = j + 1; k < m; ++k) {
        const Edge& c = edges[k];
        if ((c.u == x && c.v == y) || (c.u == y && c.v == x)) ++count;
      }
    }
  }
  return count;
}

}  // namespace tripipe::oracle
