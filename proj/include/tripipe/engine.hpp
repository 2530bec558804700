#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "tripipe/channel.hpp"
#include "tripipe/error.hpp"
#include "tripipe/graph_io.hpp"
#include "tripipe/metrics.hpp"
#include "tripipe/stage.hpp"

namespace tripipe {

/// One activity multiplexes every stage in lockstep steps.
struct Cooperative {};

/// `count` workers pull ready stages from a shared queue.
struct Threads {
  unsigned count = 1;
};

using SchedulerConfig = std::variant<Cooperative, Threads>;

struct RunConfig {
  AdjacencyMode mode = AdjacencyMode::set;
  MultisetRule multiset_rule = MultisetRule::product;
  SchedulerConfig scheduler = Cooperative{};
  Capacity channel_capacity = kDefaultCapacity;
  bool record_profile = false;     // cooperative scheduler only
  bool capture_adjacency = false;  // keep a copy of each adjacency at the round boundary
  std::optional<std::size_t> max_stages;  // defaults to |V|-1 when the source knows |V|
};

inline void validate(const RunConfig& cfg) {
  if (const auto* t = std::get_if<Threads>(&cfg.scheduler)) {
    if (t->count < 1) throw Error(ErrorKind::invalid_config, "thread count must be at least 1");
    if (cfg.record_profile) {
      throw Error(ErrorKind::invalid_config,
                  "parallelism profiles need the cooperative scheduler (steps are undefined under threads)");
    }
  }
}

struct StageResult {
  NodeId responsible = 0;
  std::uint64_t count = 0;
  friend bool operator==(const StageResult&, const StageResult&) = default;
};

/// Local counts in chain order, plus their sum.
struct PipelineResult {
  std::vector<StageResult> per_responsible;
  std::uint64_t total = 0;
  friend bool operator==(const PipelineResult&, const PipelineResult&) = default;
};

inline PipelineResult aggregate(std::vector<StageResult> results) {
  PipelineResult out{std::move(results), 0};
  for (const auto& r : out.per_responsible) out.total += r.count;
  return out;
}

/// The second-hand reading: each dying stage adds its count to whatever
/// arrived from upstream and passes the sum on. Returns what leaves the tail.
inline std::uint64_t aggregate_running_sum(std::span<const StageResult> results) {
  std::uint64_t carried = 0;
  for (const auto& r : results) carried = carried + r.count;
  return carried;
}

/// A stage's adjacency as it stood when the stage switched to counting.
struct AdjacencyRecord {
  std::size_t stage = 0;
  NodeId responsible = 0;
  std::vector<std::pair<NodeId, std::uint32_t>> members;  // (node, multiplicity), prepend order
  std::size_t stored_entries = 0;
};

struct RunStats {
  std::size_t stages_spawned = 0;
  std::size_t max_live_stages = 0;
  std::size_t steps = 0;    // lockstep steps; cooperative only
  std::size_t firings = 0;  // single-item stage activations
  std::size_t items_fed = 0;
  std::size_t sink_round1_edges = 0;
  std::size_t sink_round2_edges = 0;
  std::size_t sink_eofs = 0;
};

struct RunReport {
  PipelineResult result;
  RunStats stats;
  std::vector<AdjacencyRecord> adjacency;
  ParallelismProfile profile;
};

namespace detail {

struct Node {
  Node(std::size_t id, Capacity cap, Node* prev) : id(id), in(cap), prev(prev) {}

  std::size_t id;
  StageState state = PickResponsible{};
  Channel<StreamItem> in;
  Node* prev;
  std::atomic<Node*> next{nullptr};
  std::atomic<bool> dead{false};
  std::atomic<bool> queued{false};
};

class PipelineRun {
 public:
  PipelineRun(EdgeSource& source, const RunConfig& cfg)
      : source_(source),
        cfg_(cfg),
        stage_cfg_{cfg.mode, cfg.multiset_rule},
        feeder_(static_cast<std::size_t>(-1), std::nullopt, nullptr) {
    max_stages_ = cfg.max_stages;
    if (!max_stages_) {
      if (auto n = source.node_count()) max_stages_ = *n > 0 ? *n - 1 : 0;
    }
  }

  RunReport run() {
    if (std::holds_alternative<Threads>(cfg_.scheduler)) {
      run_threads(std::get<Threads>(cfg_.scheduler).count);
    } else {
      run_cooperative();
    }
    return finish();
  }

 private:
  // -- stepping -------------------------------------------------------------

  bool output_space(const Node& n) const {
    const Node* next = n.next.load(std::memory_order_acquire);
    return next == nullptr || next->in.has_space();
  }

  bool fireable(const Node& n) const {
    if (&n == &feeder_) return feed_round_.load(std::memory_order_acquire) <= 2 && output_space(n);
    return !n.dead.load(std::memory_order_acquire) && n.in.size() > 0 && output_space(n);
  }

  void fire(Node& n) {
    if (&n == &feeder_) {
      fire_feeder();
      return;
    }
    bool was_full = false;
    auto item = n.in.try_receive(&was_full);
    if (!item) throw Error(ErrorKind::deadlock, "fired a stage with no pending input");
    firings_.fetch_add(1, std::memory_order_relaxed);
    if (was_full && n.prev) schedule(n.prev);

    const bool from_collect = std::holds_alternative<CollectAdjacent>(n.state);
    Transition t = step(std::move(n.state), *item, stage_cfg_);
    n.state = std::move(t.state);

    if (from_collect && cfg_.capture_adjacency) {
      if (const auto* c = std::get_if<CountTriangles>(&n.state)) capture(n.id, c->adj);
    }
    if (t.out.result) {
      const auto& d = std::get<Dead>(n.state);
      std::lock_guard lock(results_mu_);
      results_.emplace_back(n.id, StageResult{*d.responsible, *t.out.result});
    }
    if (std::holds_alternative<Dead>(n.state)) n.dead.store(true, std::memory_order_release);
    if (t.out.downstream) emit(n, *t.out.downstream, from_collect);
  }

  void fire_feeder() {
    int round = feed_round_.load(std::memory_order_acquire);
    if (!cursor_) cursor_ = source_.open();
    auto item = cursor_->next();
    if (!item) throw Error(ErrorKind::protocol_violation, "source pass ended without eof");
    if (item->is_eof()) {
      if (cursor_->next()) {
        throw Error(ErrorKind::protocol_violation, "source yielded items after its eof");
      }
      cursor_.reset();
      feed_round_.store(round + 1, std::memory_order_release);
    }
    ++items_fed_;
    emit(feeder_, *item, round == 1);
  }

  /// Edges that would fall off the tail during round 1 get a fresh stage;
  /// everything else past the tail goes to the sink.
  void emit(Node& from, const StreamItem& item, bool may_spawn) {
    Node* target = from.next.load(std::memory_order_acquire);
    if (target == nullptr) {
      if (!(item.is_edge() && may_spawn)) {
        to_sink(item);
        return;
      }
      target = spawn(from);
    }
    if (!target->in.try_send(item)) {
      throw Error(ErrorKind::deadlock, "fired a stage whose output channel was full");
    }
    schedule(target);
  }

  Node* spawn(Node& from) {
    std::lock_guard lock(nodes_mu_);
    if (max_stages_ && nodes_.size() >= *max_stages_) {
      throw Error(ErrorKind::bound_exceeded,
                  "stage count would exceed |V|-1 = " + std::to_string(*max_stages_));
    }
    auto node = std::make_unique<Node>(nodes_.size(), cfg_.channel_capacity, &from);
    Node* raw = node.get();
    nodes_.push_back(std::move(node));
    from.next.store(raw, std::memory_order_release);
    return raw;
  }

  void to_sink(const StreamItem& item) {
    bool done = false;
    {
      std::lock_guard lock(sink_mu_);
      if (item.is_eof()) {
        done = ++stats_.sink_eofs == 2;
      } else if (stats_.sink_eofs == 0) {
        ++stats_.sink_round1_edges;
      } else {
        ++stats_.sink_round2_edges;
      }
    }
    if (done) {
      {
        std::lock_guard lock(queue_mu_);
        finished_ = true;
      }
      queue_cv_.notify_all();
    }
  }

  void capture(std::size_t stage, const AdjacencySet& adj) {
    AdjacencyRecord rec{stage, adj.responsible(), {}, adj.stored_entries()};
    std::vector<NodeId> seen;
    for (NodeId m : adj.members()) {
      if (std::find(seen.begin(), seen.end(), m) != seen.end()) continue;
      seen.push_back(m);
      rec.members.emplace_back(m, adj.multiplicity(m));
    }
    std::lock_guard lock(results_mu_);
    adjacency_.push_back(std::move(rec));
  }

  // -- cooperative ----------------------------------------------------------

  /// Lockstep execution: snapshot which activities can fire, then fire each
  /// of them once, downstream first so no item moves two hops in one step.
  void run_cooperative() {
    std::vector<Node*> chain;
    std::size_t known = 0;
    std::vector<StageSnapshot> snaps;
    std::vector<char> ready;
    while (!finished_) {
      snaps.clear();
      ready.assign(chain.size(), 0);
      for (std::size_t i = 0; i < chain.size(); ++i) {
        const Node& n = *chain[i];
        snaps.push_back({n.in.size(), output_space(n)});
        ready[i] = is_fireable(snaps.back());
      }
      const bool feed = fireable(feeder_);
      if (cfg_.record_profile) {
        int round = std::min(feed_round_.load(), 2);
        profile_.append(record_step(stats_.steps, snaps, round));
      }
      if (!feed && std::none_of(ready.begin(), ready.end(), [](char c) { return c != 0; })) {
        throw Error(ErrorKind::deadlock, "no activity can fire but the run has not finished");
      }
      for (std::size_t i = chain.size(); i-- > 0;) {
        if (ready[i]) fire(*chain[i]);
      }
      if (feed) fire(feeder_);
      ++stats_.steps;

      std::erase_if(chain, [](const Node* n) { return n->dead.load(); });
      for (; known < nodes_.size(); ++known) chain.push_back(nodes_[known].get());
      stats_.max_live_stages = std::max(stats_.max_live_stages, chain.size());
    }
  }

  // -- threads --------------------------------------------------------------

  void schedule(Node* n) {
    if (!threaded_ || n == nullptr) return;
    if (n->queued.exchange(true, std::memory_order_acq_rel)) return;
    {
      std::lock_guard lock(queue_mu_);
      ready_.push_back(n);
    }
    queue_cv_.notify_one();
  }

  void run_threads(unsigned count) {
    threaded_ = true;
    idle_ = 0;
    schedule(&feeder_);
    {
      std::vector<std::jthread> workers;
      workers.reserve(count);
      for (unsigned i = 0; i < count; ++i) workers.emplace_back([this, count] { worker(count); });
      std::unique_lock lock(queue_mu_);
      queue_cv_.wait(lock, [&] { return finished_ || error_ != nullptr || stalled_; });
      stop_ = true;
      lock.unlock();
      queue_cv_.notify_all();
    }
    if (error_) std::rethrow_exception(error_);
    if (stalled_ && !finished_) {
      throw Error(ErrorKind::deadlock, "all workers idle with no ready stage");
    }
  }

  void worker(unsigned count) {
    constexpr int kBatch = 64;
    for (;;) {
      Node* n = nullptr;
      {
        std::unique_lock lock(queue_mu_);
        ++idle_;
        if (idle_ == count && ready_.empty() && !finished_) {
          stalled_ = true;
          queue_cv_.notify_all();
        }
        queue_cv_.wait(lock, [&] { return stop_ || !ready_.empty(); });
        --idle_;
        if (stop_) return;
        n = ready_.front();
        ready_.pop_front();
      }
      try {
        for (int b = 0; b < kBatch && fireable(*n); ++b) fire(*n);
      } catch (...) {
        std::lock_guard lock(queue_mu_);
        if (!error_) error_ = std::current_exception();
        stop_ = true;
        queue_cv_.notify_all();
        return;
      }
      n->queued.store(false, std::memory_order_release);
      if (fireable(*n)) schedule(n);
    }
  }

  // -- results --------------------------------------------------------------

  RunReport finish() {
    RunReport report;
    std::sort(results_.begin(), results_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<StageResult> ordered;
    ordered.reserve(results_.size());
    for (auto& [id, r] : results_) ordered.push_back(r);
    report.result = aggregate(std::move(ordered));

    std::sort(adjacency_.begin(), adjacency_.end(),
              [](const auto& a, const auto& b) { return a.stage < b.stage; });
    report.adjacency = std::move(adjacency_);
    report.profile = std::move(profile_);

    stats_.stages_spawned = nodes_.size();
    stats_.firings = firings_.load();
    stats_.items_fed = items_fed_;
    if (threaded_) stats_.max_live_stages = nodes_.size();
    report.stats = stats_;
    return report;
  }

  EdgeSource& source_;
  RunConfig cfg_;
  StageConfig stage_cfg_;
  std::optional<std::size_t> max_stages_;

  Node feeder_;
  std::unique_ptr<ItemCursor> cursor_;
  std::atomic<int> feed_round_{1};
  std::size_t items_fed_ = 0;

  std::mutex nodes_mu_;
  std::deque<std::unique_ptr<Node>> nodes_;

  std::mutex sink_mu_;
  RunStats stats_;

  std::mutex results_mu_;
  std::vector<std::pair<std::size_t, StageResult>> results_;
  std::vector<AdjacencyRecord> adjacency_;
  ParallelismProfile profile_;
  std::atomic<std::size_t> firings_{0};

  bool threaded_ = false;
  std::mutex queue_mu_;
  std::condition_variable queue_cv_;
  std::deque<Node*> ready_;
  unsigned idle_ = 0;
  bool finished_ = false;
  bool stop_ = false;
  bool stalled_ = false;
  std::exception_ptr error_;
};

}  // namespace detail

/// Runs both rounds over `source` and returns the full instrumented report.
inline RunReport run_with_report(EdgeSource& source, const RunConfig& cfg = {}) {
  validate(cfg);
  detail::PipelineRun run(source, cfg);
  return run.run();
}

/// Runs both rounds over `source`: round 1 builds the chain of responsible
/// stages, round 2 replays the stream through it to count.
inline PipelineResult run_two_rounds(EdgeSource& source, const RunConfig& cfg = {}) {
  return run_with_report(source, cfg).result;
}

}  // namespace tripipe
