#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tripipe/engine.hpp"
#include "tripipe/graph_io.hpp"
#include "tripipe/oracle.hpp"

// Executable forms of the pipeline's correctness lemmas, plus oracle and
// determinism cross-checks. Shared by `tripipe verify` and the test suites.

namespace tripipe {

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;
  bool informational = false;  // reported, never fails the run
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  RunReport run;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
  const CheckResult* first_failure() const {
    for (const auto& c : checks) {
      if (!c.passed) return &c;
    }
    return nullptr;
  }
  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

struct VerifyOptions {
  bool determinism = true;
  std::vector<SchedulerConfig> schedulers{Cooperative{}, Threads{2}, Threads{8}};
  std::vector<Capacity> capacities{Capacity{1}, Capacity{kDefaultCapacity}, std::nullopt};
};

namespace detail {

inline std::string edge_text(const LabelTable& labels, NodeId a, NodeId b) {
  return "(" + labels.label(a) + "," + labels.label(b) + ")";
}

inline CheckResult check_lemma1(const RunReport& run) {
  CheckResult c{"lemma1", true, "sink saw only eof in round 1"};
  if (run.stats.sink_round1_edges != 0) {
    c.passed = false;
    c.detail = std::to_string(run.stats.sink_round1_edges) + " edge(s) reached the sink in round 1";
  }
  return c;
}

inline CheckResult check_lemma2(const RunReport& run, const std::vector<Edge>& edges,
                                AdjacencyMode mode, std::size_t node_count,
                                const LabelTable& labels) {
  CheckResult c{"lemma2", true, {}};
  std::unordered_set<std::uint64_t> distinct;
  for (const auto& e : edges) distinct.insert(e.key());
  const std::size_t expected = mode == AdjacencyMode::set ? distinct.size() : edges.size();

  std::size_t stored = 0;
  std::unordered_set<NodeId> responsibles;
  // (responsible, member) -> stage id
  std::unordered_map<std::uint64_t, std::size_t> held;
  for (const auto& rec : run.adjacency) {
    stored += rec.stored_entries;
    if (!responsibles.insert(rec.responsible).second) {
      c.passed = false;
      c.detail = "stage " + std::to_string(rec.stage) + ": node " + labels.label(rec.responsible) +
                 " is responsible at two stages";
      return c;
    }
    for (const auto& [m, mult] : rec.members) {
      held[(std::uint64_t{rec.responsible} << 32) | m] = rec.stage;
    }
  }
  if (stored != expected) {
    c.passed = false;
    c.detail = "stages hold " + std::to_string(stored) + " adjacency entries, expected " +
               std::to_string(expected);
    return c;
  }
  for (const auto& e : edges) {
    auto a = held.find((std::uint64_t{e.u} << 32) | e.v);
    auto b = held.find((std::uint64_t{e.v} << 32) | e.u);
    const int holders = (a != held.end()) + (b != held.end());
    if (holders != 1) {
      c.passed = false;
      c.detail = "edge " + edge_text(labels, e.u, e.v) + " is encoded by " +
                 std::to_string(holders) + " stages";
      return c;
    }
  }
  const std::size_t bound = node_count > 0 ? node_count - 1 : 0;
  if (run.adjacency.size() > bound) {
    c.passed = false;
    c.detail = std::to_string(run.adjacency.size()) + " stages exceed |V|-1 = " + std::to_string(bound);
    return c;
  }
  c.detail = "entries " + std::to_string(stored) + ", stages " + std::to_string(run.adjacency.size()) +
             " <= " + std::to_string(bound);
  if (mode == AdjacencyMode::set && distinct.size() != edges.size()) {
    c.detail += "; " + std::to_string(edges.size() - distinct.size()) +
                " duplicate edge line(s) collapsed by set union";
  }
  return c;
}

/// Recomputes each stage's local count from its captured adjacency and the
/// full edge list, independently of the round-2 stream.
inline CheckResult check_lemma3(const RunReport& run, const std::vector<Edge>& edges,
                                AdjacencyMode mode, MultisetRule rule, const LabelTable& labels) {
  CheckResult c{"lemma3", true, {}};
  const auto& per = run.result.per_responsible;
  if (per.size() != run.adjacency.size()) {
    c.passed = false;
    c.detail = std::to_string(per.size()) + " results for " + std::to_string(run.adjacency.size()) +
               " stages";
    return c;
  }
  for (std::size_t i = 0; i < per.size(); ++i) {
    const auto& rec = run.adjacency[i];
    std::unordered_map<NodeId, std::uint64_t> mult(rec.members.begin(), rec.members.end());
    std::unordered_set<std::uint64_t> counted;
    std::uint64_t expected = 0;
    for (const auto& e : edges) {
      auto a = mult.find(e.u);
      auto b = mult.find(e.v);
      if (a == mult.end() || b == mult.end()) continue;
      switch (mode) {
        case AdjacencyMode::list: ++expected; break;
        case AdjacencyMode::set: expected += counted.insert(e.key()).second ? 1 : 0; break;
        case AdjacencyMode::multiset:
          expected += rule == MultisetRule::product ? a->second * b->second
                                                    : std::min(a->second, b->second);
          break;
      }
    }
    if (per[i].responsible != rec.responsible || per[i].count != expected) {
      c.passed = false;
      c.detail = "stage " + std::to_string(rec.stage) + " (responsible " +
                 labels.label(rec.responsible) + ") counted " + std::to_string(per[i].count) +
                 ", expected " + std::to_string(expected);
      return c;
    }
  }
  c.detail = std::to_string(per.size()) + " stage counts match their adjacency";
  return c;
}

inline CheckResult check_oracle(const RunReport& run, const std::vector<Edge>& edges,
                                AdjacencyMode mode, MultisetRule rule, std::size_t node_count) {
  CheckResult c{"oracle", true, {}};
  const auto total = run.result.total;
  if (node_count > oracle::kMaxNodes || edges.size() > oracle::kMaxEdges) {
    c.informational = true;
    c.detail = "skipped: graph exceeds oracle caps";
    return c;
  }
  std::unordered_set<std::uint64_t> distinct;
  for (const auto& e : edges) distinct.insert(e.key());
  const bool has_duplicates = distinct.size() != edges.size();

  if (mode == AdjacencyMode::multiset) {
    auto truth = oracle::multigraph_count(edges);
    if (rule == MultisetRule::product) {
      c.passed = total == truth;
      c.detail = "pipeline " + std::to_string(total) + ", multigraph enumeration " + std::to_string(truth);
    } else {
      c.informational = true;
      c.detail = "paper-min rule gives " + std::to_string(total) + ", multigraph enumeration " +
                 std::to_string(truth) + (total == truth ? "" : " (divergent)");
    }
    return c;
  }
  if (mode == AdjacencyMode::list && has_duplicates) {
    c.informational = true;
    c.detail = "skipped: list mode counts duplicate edges literally";
    return c;
  }
  auto g = oracle::DenseGraph::simple(node_count, edges);
  auto naive = oracle::naive_count_detail(g);
  auto node_iter = oracle::node_iterator_count(g);
  c.passed = total == naive.triangles && node_iter == naive.triangles;
  c.detail = "pipeline " + std::to_string(total) + ", naive " + std::to_string(naive.triangles) +
             " (2T=" + std::to_string(naive.doubled) + "), node-iterator " + std::to_string(node_iter);
  return c;
}

}  // namespace detail

/// Runs the pipeline once with adjacency capture and checks every lemma,
/// the oracle count, and (optionally) scheduler/capacity determinism.
inline VerifyReport verify(EdgeSource& source, RunConfig cfg, const VerifyOptions& opts = {}) {
  cfg.capture_adjacency = true;
  cfg.record_profile = false;
  VerifyReport out;
  auto edges = collect_edges(source);
  out.run = run_with_report(source, cfg);
  const std::size_t nodes = source.node_count().value_or(source.labels().size());
  const auto& labels = source.labels();

  out.checks.push_back(detail::check_lemma1(out.run));
  out.checks.push_back(detail::check_lemma2(out.run, edges, cfg.mode, nodes, labels));
  out.checks.push_back(detail::check_lemma3(out.run, edges, cfg.mode, cfg.multiset_rule, labels));
  out.checks.push_back(detail::check_oracle(out.run, edges, cfg.mode, cfg.multiset_rule, nodes));

  if (opts.determinism) {
    CheckResult det{"determinism", true, {}};
    std::size_t runs = 0;
    for (const auto& sched : opts.schedulers) {
      for (const auto& cap : opts.capacities) {
        RunConfig variant = cfg;
        variant.capture_adjacency = false;
        variant.scheduler = sched;
        variant.channel_capacity = cap;
        auto other = run_two_rounds(source, variant);
        ++runs;
        if (other != out.run.result && det.passed) {
          det.passed = false;
          det.detail = "result differs under " +
                       std::string(std::holds_alternative<Cooperative>(sched)
                                       ? "cooperative"
                                       : "threads(" + std::to_string(std::get<Threads>(sched).count) + ")") +
                       ", capacity " + (cap ? std::to_string(*cap) : std::string("unbounded"));
        }
      }
    }
    if (det.passed) det.detail = std::to_string(runs) + " scheduler/capacity variants agree";
    out.checks.push_back(det);
  }
  return out;
}

}  // namespace tripipe
