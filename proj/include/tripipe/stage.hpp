#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "tripipe/error.hpp"
#include "tripipe/graph_io.hpp"

namespace tripipe {

/// How a collecting stage stores the neighbours it absorbs.
///  - list: every arrival is prepended, duplicates kept (the literal form).
///  - set: duplicate input edges collapse; closing edges count once each.
///  - multiset: arrivals are counted, and every closing-edge occurrence
///    closes as many triangles as `closure_increment` says.
enum class AdjacencyMode { list, set, multiset };

/// Closing rule for multiset mode. `product` agrees with enumerating
/// distinct edge occurrences; `paper_min` takes the smaller multiplicity.
enum class MultisetRule { paper_min, product };

inline std::optional<AdjacencyMode> parse_adjacency_mode(std::string_view s) {
  if (s == "list") return AdjacencyMode::list;
  if (s == "set") return AdjacencyMode::set;
  if (s == "multiset") return AdjacencyMode::multiset;
  return std::nullopt;
}

inline std::optional<MultisetRule> parse_multiset_rule(std::string_view s) {
  if (s == "paper-min") return MultisetRule::paper_min;
  if (s == "product") return MultisetRule::product;
  return std::nullopt;
}

/// Neighbours of one responsible node. Membership is hashed; `members()`
/// reports them most-recent-first, matching prepend order.
class AdjacencySet {
 public:
  AdjacencySet(NodeId responsible, AdjacencyMode mode) : responsible_(responsible), mode_(mode) {}

  NodeId responsible() const noexcept { return responsible_; }
  AdjacencyMode mode() const noexcept { return mode_; }

  void add(NodeId s) {
    if (s == responsible_) {
      throw Error(ErrorKind::protocol_violation, "responsible node cannot be its own neighbour");
    }
    auto& m = mult_[s];
    ++m;
    if (m == 1 || mode_ == AdjacencyMode::list) order_.push_back(s);
  }

  bool contains(NodeId s) const { return mult_.count(s) != 0; }

  std::uint32_t multiplicity(NodeId s) const {
    auto it = mult_.find(s);
    return it == mult_.end() ? 0 : it->second;
  }

  std::vector<NodeId> members() const { return {order_.rbegin(), order_.rend()}; }

  std::size_t distinct_size() const noexcept { return mult_.size(); }

  /// Entries the stage holds: list keeps every arrival, set keeps distinct
  /// members, multiset weighs each member by its multiplicity.
  std::size_t stored_entries() const {
    switch (mode_) {
      case AdjacencyMode::list: return order_.size();
      case AdjacencyMode::set: return mult_.size();
      case AdjacencyMode::multiset: {
        std::size_t total = 0;
        for (const auto& [node, m] : mult_) total += m;
        return total;
      }
    }
    return 0;
  }

 private:
  NodeId responsible_;
  AdjacencyMode mode_;
  std::vector<NodeId> order_;
  std::unordered_map<NodeId, std::uint32_t> mult_;
};

/// Triangles closed by one occurrence of `e`, both of whose endpoints are
/// members of `adj`.
inline std::uint64_t closure_increment(const AdjacencySet& adj, const Edge& e,
                                       MultisetRule rule = MultisetRule::product) {
  if (adj.mode() != AdjacencyMode::multiset) return 1;
  std::uint64_t a = adj.multiplicity(e.u);
  std::uint64_t b = adj.multiplicity(e.v);
  return rule == MultisetRule::paper_min ? std::min(a, b) : a * b;
}

// ---------------------------------------------------------------------------
// Roles

struct PickResponsible {};

struct CollectAdjacent {
  AdjacencySet adj;
};

struct CountTriangles {
  AdjacencySet adj;
  std::uint64_t count = 0;
  std::unordered_set<std::uint64_t> closed;  // set mode only
};

struct Dead {
  std::uint64_t final_count = 0;
  std::optional<NodeId> responsible;
};

using StageState = std::variant<PickResponsible, CollectAdjacent, CountTriangles, Dead>;

/// Pick=0, Collect=1, Count=2, Dead=3. Never decreases over a stage's life.
inline int role_index(const StageState& s) noexcept { return static_cast<int>(s.index()); }

inline std::string_view role_name(const StageState& s) noexcept {
  constexpr std::string_view names[] = {"pick", "collect", "count", "dead"};
  return names[s.index()];
}

struct StepOutput {
  std::optional<StreamItem> downstream;
  std::optional<std::uint64_t> result;
  bool spawn_request = false;
};

struct Transition {
  StageState state;
  StepOutput out;
};

struct StageConfig {
  AdjacencyMode mode = AdjacencyMode::set;
  MultisetRule rule = MultisetRule::product;
};

inline Transition step_pick(PickResponsible, const StreamItem& item, const StageConfig& cfg) {
  if (item.is_eof()) return {Dead{}, {StreamItem::eof(), std::nullopt, false}};
  const auto& e = item.edge();
  AdjacencySet adj(e.u, cfg.mode);
  adj.add(e.v);
  return {CollectAdjacent{std::move(adj)}, {std::nullopt, std::nullopt, true}};
}

inline Transition step_collect(CollectAdjacent state, const StreamItem& item) {
  if (item.is_eof()) {
    return {CountTriangles{std::move(state.adj), 0, {}}, {StreamItem::eof(), std::nullopt, false}};
  }
  const auto& e = item.edge();
  const NodeId r = state.adj.responsible();
  if (e.touches(r)) {
    state.adj.add(e.u == r ? e.v : e.u);
    return {std::move(state), {}};
  }
  return {std::move(state), {item, std::nullopt, false}};
}

inline Transition step_count(CountTriangles state, const StreamItem& item,
                             MultisetRule rule = MultisetRule::product) {
  if (item.is_eof()) {
    auto n = state.count;
    return {Dead{n, state.adj.responsible()}, {StreamItem::eof(), n, false}};
  }
  const auto& e = item.edge();
  // An edge with only one endpoint in the adjacency closes nothing here.
  if (state.adj.contains(e.u) && state.adj.contains(e.v)) {
    bool fresh = state.adj.mode() != AdjacencyMode::set || state.closed.insert(e.key()).second;
    if (fresh) state.count += closure_increment(state.adj, e, rule);
  }
  return {std::move(state), {item, std::nullopt, false}};
}

/// Dispatches on the current role. Stepping a dead stage is a protocol
/// violation: nothing may follow the eof it already consumed.
inline Transition step(StageState state, const StreamItem& item, const StageConfig& cfg) {
  switch (state.index()) {
    case 0: return step_pick(std::get<PickResponsible>(state), item, cfg);
    case 1: return step_collect(std::get<CollectAdjacent>(std::move(state)), item);
    case 2: return step_count(std::get<CountTriangles>(std::move(state)), item, cfg.rule);
    default:
      throw Error(ErrorKind::protocol_violation, "item delivered to a dead stage");
  }
}

}  // namespace tripipe
