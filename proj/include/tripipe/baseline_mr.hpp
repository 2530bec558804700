#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tripipe/engine.hpp"
#include "tripipe/graph_io.hpp"

// In-memory simulation of the two-round MapReduce node iterator: round 1
// materializes every 2-path, round 2 joins them against the edges. It exists
// to measure how much intermediate data that approach produces.

namespace tripipe::mr {

/// A path end_a - middle - end_b, with end_a < end_b.
struct TwoPath {
  NodeId middle = 0;
  NodeId end_a = 0;
  NodeId end_b = 0;
  friend bool operator==(const TwoPath&, const TwoPath&) = default;
};

struct MrStats {
  std::uint64_t two_paths_emitted = 0;
  std::uint64_t clustered_keys = 0;
  std::uint64_t closures = 0;  // every triangle is closed once per middle node
  std::uint64_t triangles = 0;
};

namespace detail {

inline std::map<NodeId, std::set<NodeId>> neighbourhoods(std::span<const Edge> edges) {
  std::map<NodeId, std::set<NodeId>> nbrs;
  for (const auto& e : edges) {
    if (e.u == e.v) continue;
    nbrs[e.u].insert(e.v);
    nbrs[e.v].insert(e.u);
  }
  return nbrs;
}

}  // namespace detail

/// Every unordered pair of distinct neighbours, for every node.
inline std::vector<TwoPath> mr_round1(std::span<const Edge> edges) {
  std::vector<TwoPath> out;
  for (const auto& [middle, nbrs] : detail::neighbourhoods(edges)) {
    for (auto i = nbrs.begin(); i != nbrs.end(); ++i) {
      for (auto j = std::next(i); j != nbrs.end(); ++j) out.push_back({middle, *i, *j});
    }
  }
  return out;
}

/// Clusters 2-paths and edges by their end pair. A cluster holding an edge
/// closes (size - 1) 2-paths.
inline MrStats mr_round2(std::span<const TwoPath> two_paths, std::span<const Edge> edges) {
  struct Cluster {
    std::uint64_t size = 0;
    bool has_edge = false;
  };
  std::unordered_map<std::uint64_t, Cluster> clusters;
  for (const auto& tp : two_paths) ++clusters[Edge{tp.end_a, tp.end_b}.key()].size;
  for (const auto& e : edges) {
    if (e.u == e.v) continue;
    auto& c = clusters[e.key()];
    if (c.has_edge) continue;  // the edge relation is a set
    c.has_edge = true;
    ++c.size;
  }

  MrStats stats;
  stats.two_paths_emitted = two_paths.size();
  stats.clustered_keys = clusters.size();
  for (const auto& [key, c] : clusters) {
    if (c.has_edge) stats.closures += c.size - 1;
  }
  stats.triangles = stats.closures / 3;
  return stats;
}

struct VolumeReport {
  std::string graph_id;
  std::size_t nodes = 0;
  std::size_t edges = 0;  // distinct
  std::uint64_t mr_two_paths = 0;
  std::uint64_t pipeline_storage = 0;  // adjacency entries held across all stages
  std::uint64_t triangles = 0;         // from the MR simulation
  std::uint64_t pipeline_triangles = 0;
};

/// Runs both the MR simulation and the pipeline (set mode) over `source`.
inline VolumeReport compare_volumes(EdgeSource& source, std::string graph_id) {
  auto edges = collect_edges(source);
  auto two_paths = mr_round1(edges);
  auto stats = mr_round2(two_paths, edges);

  RunConfig cfg;
  cfg.capture_adjacency = true;
  auto report = run_with_report(source, cfg);

  VolumeReport out;
  out.graph_id = std::move(graph_id);
  out.nodes = source.node_count().value_or(source.labels().size());
  std::set<std::uint64_t> distinct;
  for (const auto& e : edges) distinct.insert(e.key());
  out.edges = distinct.size();
  out.mr_two_paths = stats.two_paths_emitted;
  for (const auto& rec : report.adjacency) out.pipeline_storage += rec.stored_entries;
  out.triangles = stats.triangles;
  out.pipeline_triangles = report.result.total;
  return out;
}

inline void write_volume_csv_header(std::ostream& out) {
  out << "graph,nodes,edges,mr_two_paths,pipeline_storage,triangles\n";
}

inline void write_volume_csv_row(const VolumeReport& r, std::ostream& out) {
  out << r.graph_id << ',' << r.nodes << ',' << r.edges << ',' << r.mr_two_paths << ','
      << r.pipeline_storage << ',' << r.triangles << '\n';
}

}  // namespace tripipe::mr
