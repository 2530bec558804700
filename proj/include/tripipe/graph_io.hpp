#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tripipe/error.hpp"

namespace tripipe {

/// Dense id of an interned node label. Only equality is meaningful to the
/// algorithm; the numeric value is an artifact of interning order.
using NodeId = std::uint32_t;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  /// Orientation-free key, used wherever (u,v) and (v,u) must collide.
  std::uint64_t key() const noexcept {
    auto [lo, hi] = std::minmax(u, v);
    return (std::uint64_t{lo} << 32) | hi;
  }
  bool touches(NodeId n) const noexcept { return u == n || v == n; }
  bool same_pair(const Edge& o) const noexcept { return key() == o.key(); }

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// One item on a round channel: an edge or the end-of-round sentinel.
class StreamItem {
 public:
  static StreamItem eof() { return StreamItem{}; }
  static StreamItem of(Edge e) { return StreamItem{e}; }

  bool is_eof() const noexcept { return !edge_.has_value(); }
  bool is_edge() const noexcept { return edge_.has_value(); }
  const Edge& edge() const { return edge_.value(); }

  friend bool operator==(const StreamItem&, const StreamItem&) = default;

 private:
  StreamItem() = default;
  explicit StreamItem(Edge e) : edge_(e) {}
  std::optional<Edge> edge_;
};

/// Interns opaque node labels to dense ids. Shared by every replay of a
/// source so the same label maps to the same id in both rounds.
class LabelTable {
 public:
  NodeId intern(std::string_view label) {
    auto it = ids_.find(std::string(label));
    if (it != ids_.end()) return it->second;
    auto id = static_cast<NodeId>(labels_.size());
    labels_.emplace_back(label);
    ids_.emplace(labels_.back(), id);
    return id;
  }

  std::optional<NodeId> find(std::string_view label) const {
    auto it = ids_.find(std::string(label));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& label(NodeId id) const { return labels_.at(id); }
  std::size_t size() const noexcept { return labels_.size(); }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> ids_;
};

/// `simple` rejects self-loops; `multigraph` drops them, since a loop can
/// never be part of a triangle on three distinct nodes.
enum class ParseMode { simple, multigraph };

/// Streaming reader for the whitespace-separated edge-list format.
class EdgeReader {
 public:
  EdgeReader(std::istream& in, LabelTable& labels, ParseMode mode)
      : in_(in), labels_(labels), mode_(mode) {}

  std::optional<Edge> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      std::istringstream tokens(line);
      std::string a, b, extra;
      if (!(tokens >> a)) continue;  // blank
      if (a.front() == '#') continue;
      if (!(tokens >> b) || (tokens >> extra)) {
        throw Error(ErrorKind::malformed_line, "expected exactly two tokens", line_no_);
      }
      if (a == b) {
        if (mode_ == ParseMode::simple) {
          throw Error(ErrorKind::self_loop, "node '" + a + "' joined to itself", line_no_);
        }
        continue;
      }
      return Edge{labels_.intern(a), labels_.intern(b)};
    }
    if (in_.bad()) throw Error(ErrorKind::io_failure, "read error");
    return std::nullopt;
  }

  std::size_t line_number() const noexcept { return line_no_; }

 private:
  std::istream& in_;
  LabelTable& labels_;
  ParseMode mode_;
  std::size_t line_no_ = 0;
};

inline std::vector<Edge> parse_edge_list(std::istream& in, LabelTable& labels,
                                         ParseMode mode = ParseMode::simple) {
  EdgeReader reader(in, labels, mode);
  std::vector<Edge> edges;
  while (auto e = reader.next()) edges.push_back(*e);
  return edges;
}

inline std::vector<Edge> parse_edge_list(std::string_view text, LabelTable& labels,
                                         ParseMode mode = ParseMode::simple) {
  std::istringstream in{std::string(text)};
  return parse_edge_list(in, labels, mode);
}

inline void serialize_edge_list(const std::vector<Edge>& edges, const LabelTable& labels,
                                std::ostream& out) {
  for (const auto& e : edges) out << labels.label(e.u) << ' ' << labels.label(e.v) << '\n';
}

// ---------------------------------------------------------------------------
// Generators

enum class GeneratorModel { complete, path, cycle, star, gnp };

inline std::optional<GeneratorModel> parse_generator_model(std::string_view name) {
  if (name == "complete") return GeneratorModel::complete;
  if (name == "path") return GeneratorModel::path;
  if (name == "cycle") return GeneratorModel::cycle;
  if (name == "star") return GeneratorModel::star;
  if (name == "gnp") return GeneratorModel::gnp;
  return std::nullopt;
}

/// Nodes are `0..n-1`. For `star`, node 0 is the hub and every edge is
/// written hub-first.
struct GeneratorSpec {
  GeneratorModel model = GeneratorModel::complete;
  std::uint32_t n = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
};

inline void validate(const GeneratorSpec& spec) {
  if (spec.n < 1) throw Error(ErrorKind::invalid_spec, "n must be at least 1");
  if (spec.model == GeneratorModel::gnp && !(spec.p >= 0.0 && spec.p <= 1.0)) {
    throw Error(ErrorKind::invalid_spec, "p must lie in [0, 1]");
  }
  if (spec.model == GeneratorModel::cycle && spec.n < 3) {
    throw Error(ErrorKind::invalid_spec, "cycle needs n >= 3");
  }
}

/// Lazily enumerates the edges of a generator spec. The gnp draw maps the
/// top 53 bits of mt19937_64 to [0,1), so sequences are identical across
/// standard libraries for the same seed.
class EdgeGenerator {
 public:
  explicit EdgeGenerator(const GeneratorSpec& spec) : spec_(spec), rng_(spec.seed) {
    validate(spec_);
  }

  std::optional<Edge> next() {
    const auto n = spec_.n;
    switch (spec_.model) {
      case GeneratorModel::complete:
        return next_pair();
      case GeneratorModel::gnp:
        while (auto e = next_pair()) {
          double draw = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
          if (draw < spec_.p) return e;
        }
        return std::nullopt;
      case GeneratorModel::path:
        if (i_ + 1 >= n) return std::nullopt;
        ++i_;
        return Edge{i_ - 1, i_};
      case GeneratorModel::cycle:
        if (i_ + 1 < n) {
          ++i_;
          return Edge{i_ - 1, i_};
        }
        if (i_ + 1 == n) {
          ++i_;
          return Edge{n - 1, 0};
        }
        return std::nullopt;
      case GeneratorModel::star:
        if (i_ + 1 >= n) return std::nullopt;
        ++i_;
        return Edge{0, i_};
    }
    return std::nullopt;
  }

 private:
  // Unordered pairs (i, j), i < j, in lexicographic order.
  std::optional<Edge> next_pair() {
    if (j_ == 0) j_ = i_ + 1;
    while (i_ + 1 < spec_.n) {
      if (j_ < spec_.n) return Edge{i_, j_++};
      ++i_;
      j_ = i_ + 1;
    }
    return std::nullopt;
  }

  GeneratorSpec spec_;
  std::mt19937_64 rng_;
  NodeId i_ = 0;
  NodeId j_ = 0;
};

inline std::vector<Edge> generate(const GeneratorSpec& spec) {
  EdgeGenerator gen(spec);
  std::vector<Edge> edges;
  while (auto e = gen.next()) edges.push_back(*e);
  return edges;
}

// ---------------------------------------------------------------------------
// Sources

/// Sequential access to one pass over a source. Yields the edges, then
/// exactly one eof, then nullopt forever.
class ItemCursor {
 public:
  virtual ~ItemCursor() = default;
  virtual std::optional<StreamItem> next() = 0;
};

/// A replayable edge stream. Every `open()` starts a fresh pass that must
/// produce the same sequence; at most one pass may be open at a time.
class EdgeSource {
 public:
  virtual ~EdgeSource() = default;

  std::unique_ptr<ItemCursor> open() {
    if (pass_open_->exchange(true)) {
      throw Error(ErrorKind::protocol_violation, "a pass over this source is already open");
    }
    try {
      auto inner = open_pass();
      ++replays_;
      return std::make_unique<Guarded>(std::move(inner), pass_open_);
    } catch (...) {
      pass_open_->store(false);
      throw;
    }
  }

  LabelTable& labels() noexcept { return labels_; }
  const LabelTable& labels() const noexcept { return labels_; }

  /// |V| when the source knows it up front (generators); file sources only
  /// know the labels seen so far.
  virtual std::optional<std::size_t> node_count() const { return std::nullopt; }

  std::size_t replay_count() const noexcept { return replays_; }

 protected:
  virtual std::unique_ptr<ItemCursor> open_pass() = 0;

  LabelTable labels_;

 private:
  class Guarded : public ItemCursor {
   public:
    Guarded(std::unique_ptr<ItemCursor> inner, std::shared_ptr<std::atomic<bool>> flag)
        : inner_(std::move(inner)), flag_(std::move(flag)) {}
    ~Guarded() override { flag_->store(false); }
    std::optional<StreamItem> next() override { return inner_->next(); }

   private:
    std::unique_ptr<ItemCursor> inner_;
    std::shared_ptr<std::atomic<bool>> flag_;
  };

  std::shared_ptr<std::atomic<bool>> pass_open_ = std::make_shared<std::atomic<bool>>(false);
  std::size_t replays_ = 0;
};

namespace detail {

/// Adapts any `next() -> optional<Edge>` producer into an item cursor that
/// appends the eof sentinel.
template <typename Producer>
class EofAppender : public ItemCursor {
 public:
  explicit EofAppender(Producer producer) : producer_(std::move(producer)) {}

  std::optional<StreamItem> next() override {
    if (finished_) return std::nullopt;
    if (auto e = producer_.next()) return StreamItem::of(*e);
    finished_ = true;
    return StreamItem::eof();
  }

 private:
  Producer producer_;
  bool finished_ = false;
};

struct FileProducer {
  std::unique_ptr<std::ifstream> file;
  std::unique_ptr<EdgeReader> reader;
  std::optional<Edge> next() { return reader->next(); }
};

struct VectorProducer {
  const std::vector<Edge>* edges;
  std::size_t pos = 0;
  std::optional<Edge> next() {
    if (pos >= edges->size()) return std::nullopt;
    return (*edges)[pos++];
  }
};

}  // namespace detail

/// Re-reads and re-parses the file on every pass; nothing but the label
/// table is retained between passes.
class FileEdgeSource : public EdgeSource {
 public:
  explicit FileEdgeSource(std::string path, ParseMode mode = ParseMode::simple)
      : path_(std::move(path)), mode_(mode) {}

  const std::string& path() const noexcept { return path_; }

 protected:
  std::unique_ptr<ItemCursor> open_pass() override {
    auto file = std::make_unique<std::ifstream>(path_);
    if (!*file) throw Error(ErrorKind::io_failure, "cannot open '" + path_ + "'");
    auto reader = std::make_unique<EdgeReader>(*file, labels_, mode_);
    return std::make_unique<detail::EofAppender<detail::FileProducer>>(
        detail::FileProducer{std::move(file), std::move(reader)});
  }

 private:
  std::string path_;
  ParseMode mode_;
};

/// Regenerates the edge sequence on every pass; node i carries label "i".
class GeneratorEdgeSource : public EdgeSource {
 public:
  explicit GeneratorEdgeSource(const GeneratorSpec& spec) : spec_(spec) {
    validate(spec_);
    for (std::uint32_t i = 0; i < spec_.n; ++i) labels_.intern(std::to_string(i));
  }

  std::optional<std::size_t> node_count() const override { return spec_.n; }
  const GeneratorSpec& spec() const noexcept { return spec_; }

 protected:
  std::unique_ptr<ItemCursor> open_pass() override {
    return std::make_unique<detail::EofAppender<EdgeGenerator>>(EdgeGenerator(spec_));
  }

 private:
  GeneratorSpec spec_;
};

/// In-memory edge list, mainly for tests and small fixtures.
class MemoryEdgeSource : public EdgeSource {
 public:
  explicit MemoryEdgeSource(std::vector<Edge> edges, std::optional<std::size_t> nodes = {})
      : edges_(std::move(edges)), nodes_(nodes) {
    NodeId max_id = 0;
    for (const auto& e : edges_) max_id = std::max({max_id, e.u, e.v});
    std::size_t count = edges_.empty() ? 0 : std::size_t{max_id} + 1;
    if (nodes_) count = std::max(count, *nodes_);
    for (std::size_t i = 0; i < count; ++i) labels_.intern(std::to_string(i));
  }

  /// Parses `text` once up front; labels keep their textual form.
  static std::unique_ptr<MemoryEdgeSource> from_text(std::string_view text,
                                                     ParseMode mode = ParseMode::simple) {
    auto src = std::unique_ptr<MemoryEdgeSource>(new MemoryEdgeSource());
    src->edges_ = parse_edge_list(text, src->labels_, mode);
    return src;
  }

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::optional<std::size_t> node_count() const override { return nodes_; }

 protected:
  std::unique_ptr<ItemCursor> open_pass() override {
    return std::make_unique<detail::EofAppender<detail::VectorProducer>>(
        detail::VectorProducer{&edges_});
  }

 private:
  MemoryEdgeSource() = default;
  std::vector<Edge> edges_;
  std::optional<std::size_t> nodes_;
};

/// One full pass, materialized: the edges followed by a single eof.
inline std::vector<StreamItem> replay(EdgeSource& source) {
  auto cursor = source.open();
  std::vector<StreamItem> items;
  while (auto item = cursor->next()) {
    items.push_back(*item);
    if (item->is_eof()) break;
  }
  return items;
}

/// The edges of one pass, without the sentinel.
inline std::vector<Edge> collect_edges(EdgeSource& source) {
  std::vector<Edge> edges;
  for (const auto& item : replay(source)) {
    if (item.is_edge()) edges.push_back(item.edge());
  }
  return edges;
}

}  // namespace tripipe
