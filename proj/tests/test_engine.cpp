#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "support.hpp"
#include "tripipe/engine.hpp"
#include "tripipe/oracle.hpp"
#include "tripipe/verify.hpp"

namespace tripipe {
namespace {

std::vector<std::pair<std::string, std::uint64_t>> labelled(const PipelineResult& r,
                                                            const LabelTable& labels) {
  std::vector<std::pair<std::string, std::uint64_t>> out;
  for (const auto& s : r.per_responsible) out.emplace_back(labels.label(s.responsible), s.count);
  return out;
}

std::vector<RunConfig> scheduler_matrix() {
  std::vector<RunConfig> out;
  for (SchedulerConfig s : {SchedulerConfig{Cooperative{}}, SchedulerConfig{Threads{1}},
                            SchedulerConfig{Threads{2}}, SchedulerConfig{Threads{8}}}) {
    for (Capacity c : {Capacity{1}, Capacity{3}, Capacity{kDefaultCapacity}, Capacity{}}) {
      RunConfig cfg;
      cfg.scheduler = s;
      cfg.channel_capacity = c;
      out.push_back(cfg);
    }
  }
  return out;
}

TEST(Channel, FifoAndCapacity) {
  Channel<int> ch(Capacity{2});
  EXPECT_TRUE(ch.try_send(1));
  EXPECT_TRUE(ch.try_send(2));
  EXPECT_FALSE(ch.try_send(3));
  bool was_full = false;
  EXPECT_EQ(ch.try_receive(&was_full), 1);
  EXPECT_TRUE(was_full);
  EXPECT_EQ(ch.try_receive(&was_full), 2);
  EXPECT_FALSE(was_full);
  EXPECT_FALSE(ch.try_receive().has_value());
}

TEST(Channel, UnboundedNeverFills) {
  Channel<int> ch(std::nullopt);
  for (int i = 0; i < 5000; ++i) ASSERT_TRUE(ch.try_send(i));
  EXPECT_TRUE(ch.has_space());
}

TEST(Channel, BlockingSendAndReceiveAcrossThreads) {
  Channel<int> ch(Capacity{4});
  std::jthread producer([&] {
    for (int i = 0; i < 1000; ++i) ch.send(i);
  });
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(ch.receive(), i);
}

TEST(RunTwoRounds, TriangleTrace) {
  auto src = MemoryEdgeSource::from_text("1 2\n1 3\n2 3\n");
  auto result = run_two_rounds(*src);
  using Row = std::pair<std::string, std::uint64_t>;
  EXPECT_EQ(labelled(result, src->labels()), (std::vector<Row>{{"1", 1}, {"2", 0}}));
  EXPECT_EQ(result.total, 1u);
}

TEST(RunTwoRounds, PathHasNoTriangles) {
  GeneratorEdgeSource src({GeneratorModel::path, 5});
  auto result = run_two_rounds(src);
  EXPECT_EQ(result.total, 0u);
  EXPECT_EQ(result.per_responsible.size(), 4u);
  for (const auto& r : result.per_responsible) EXPECT_EQ(r.count, 0u);
}

TEST(RunTwoRounds, CompleteGraphs) {
  for (std::uint32_t n = 1; n <= 12; ++n) {
    GeneratorEdgeSource src({GeneratorModel::complete, n});
    auto report = run_with_report(src);
    EXPECT_EQ(report.result.total, testing::choose3(n)) << "n=" << n;
    EXPECT_EQ(report.stats.stages_spawned, n > 1 ? n - 1 : 0) << "n=" << n;
  }
}

TEST(RunTwoRounds, EmptyGraphSpawnsNothing) {
  MemoryEdgeSource src(std::vector<Edge>{});
  auto report = run_with_report(src);
  EXPECT_EQ(report.result.total, 0u);
  EXPECT_TRUE(report.result.per_responsible.empty());
  EXPECT_EQ(report.stats.stages_spawned, 0u);
  EXPECT_EQ(report.stats.sink_eofs, 2u);
}

TEST(RunTwoRounds, StarWithHubFirstNeedsOneStage) {
  GeneratorEdgeSource src({GeneratorModel::star, 21});
  auto report = run_with_report(src);
  EXPECT_EQ(report.stats.stages_spawned, 1u);
  EXPECT_EQ(report.result.total, 0u);
}

TEST(RunTwoRounds, TailForwardingGrowsTheChainByOne) {
  // Two stages after (1,2) and (3,4); (5,6) passes both and adds a third.
  auto two = MemoryEdgeSource::from_text("1 2\n3 4\n");
  EXPECT_EQ(run_with_report(*two).stats.stages_spawned, 2u);
  auto three = MemoryEdgeSource::from_text("1 2\n3 4\n5 6\n");
  EXPECT_EQ(run_with_report(*three).stats.stages_spawned, 3u);
}

TEST(RunTwoRounds, ResponsibleIsTheFirstComponent) {
  auto src = MemoryEdgeSource::from_text("b a\nc a\n");
  auto result = run_two_rounds(*src);
  ASSERT_EQ(result.per_responsible.size(), 2u);
  EXPECT_EQ(src->labels().label(result.per_responsible[0].responsible), "b");
  EXPECT_EQ(src->labels().label(result.per_responsible[1].responsible), "c");
}

TEST(RunTwoRounds, EveryRoundTwoEdgeReachesTheSink) {
  GeneratorEdgeSource src({GeneratorModel::gnp, 40, 0.2, 4});
  auto report = run_with_report(src);
  EXPECT_EQ(report.stats.sink_round1_edges, 0u);
  EXPECT_EQ(report.stats.sink_round2_edges, generate(src.spec()).size());
}

TEST(RunTwoRounds, DeterministicAcrossSchedulersAndCapacities) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    MemoryEdgeSource src(testing::shuffled_gnp(40, 0.25, seed), 40);
    auto reference = run_two_rounds(src);
    for (const auto& cfg : scheduler_matrix()) {
      EXPECT_EQ(run_two_rounds(src, cfg), reference) << "seed " << seed;
    }
  }
}

TEST(RunTwoRounds, MatchesOracleOnShuffledGraphs) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    std::uint32_t n = 10 + static_cast<std::uint32_t>(seed * 3);
    auto edges = testing::shuffled_gnp(n, 0.3, seed);
    MemoryEdgeSource src(edges, n);
    EXPECT_EQ(run_two_rounds(src).total, oracle::naive_count(oracle::DenseGraph::simple(n, edges)));
  }
}

TEST(RunTwoRounds, SetModeCollapsesDuplicateEdges) {
  auto base = testing::shuffled_gnp(25, 0.3, 17);
  auto dup = testing::duplicate_edges(base, 0.5, 3, 17);
  MemoryEdgeSource src(dup, 25);
  EXPECT_EQ(run_two_rounds(src).total, oracle::naive_count(oracle::DenseGraph::simple(25, base)));
}

TEST(RunTwoRounds, MultisetProductMatchesEnumeration) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto edges = testing::duplicate_edges(testing::shuffled_gnp(15, 0.4, seed), 0.3, 3, seed);
    MemoryEdgeSource src(edges, 15);
    RunConfig cfg;
    cfg.mode = AdjacencyMode::multiset;
    EXPECT_EQ(run_two_rounds(src, cfg).total, oracle::multigraph_count(edges)) << "seed " << seed;
  }
}

TEST(RunTwoRounds, AggregationReadingsAgree) {
  EXPECT_EQ(aggregate({{1, 3}, {4, 0}, {2, 1}}).total, 4u);
  EXPECT_EQ(aggregate({}).total, 0u);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<StageResult> results(rng() % 40);
    for (auto& r : results) r = {static_cast<NodeId>(rng() % 100), rng() % 1000};
    EXPECT_EQ(aggregate_running_sum(results), aggregate(results).total);
  }
}

TEST(RunTwoRounds, CooperativeStepBudget) {
  GeneratorEdgeSource src({GeneratorModel::gnp, 60, 0.2, 21});
  auto report = run_with_report(src);
  const auto edges = generate(src.spec()).size();
  const auto stages = report.stats.stages_spawned;
  EXPECT_LE(report.stats.firings, 2 * (edges + 1) * stages);
  // Lockstep steps: every item needs at most one step per hop, plus feed.
  EXPECT_LE(report.stats.steps, 2 * (edges + 1) + 2 * stages + 2);
}

TEST(RunTwoRounds, LemmaChecksHoldOnRandomGraphs) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    MemoryEdgeSource src(testing::shuffled_gnp(30, 0.3, seed), 30);
    VerifyOptions opts;
    opts.determinism = false;
    auto report = verify(src, {}, opts);
    EXPECT_TRUE(report.all_passed()) << report.first_failure()->name << ": "
                                     << report.first_failure()->detail;
  }
}

TEST(RunTwoRounds, ExplicitStageBoundIsEnforced) {
  GeneratorEdgeSource src({GeneratorModel::complete, 6});
  RunConfig cfg;
  cfg.max_stages = 3;
  try {
    run_two_rounds(src, cfg);
    FAIL() << "expected BoundExceeded";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::bound_exceeded);
  }
  cfg.scheduler = Threads{4};
  EXPECT_THROW(run_two_rounds(src, cfg), Error);
}

class TrailingItemSource : public EdgeSource {
 protected:
  std::unique_ptr<ItemCursor> open_pass() override {
    struct Cursor : ItemCursor {
      int pos = 0;
      std::optional<StreamItem> next() override {
        switch (pos++) {
          case 0: return StreamItem::of({0, 1});
          case 1: return StreamItem::eof();
          case 2: return StreamItem::of({1, 2});
          default: return std::nullopt;
        }
      }
    };
    return std::make_unique<Cursor>();
  }
};

TEST(RunTwoRounds, ItemsAfterEofAreAProtocolViolation) {
  for (SchedulerConfig s : {SchedulerConfig{Cooperative{}}, SchedulerConfig{Threads{3}}}) {
    TrailingItemSource src;
    src.labels().intern("0");
    src.labels().intern("1");
    src.labels().intern("2");
    RunConfig cfg;
    cfg.scheduler = s;
    try {
      run_two_rounds(src, cfg);
      FAIL() << "expected ProtocolViolation";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::protocol_violation);
    }
  }
}

TEST(RunTwoRounds, ParseErrorsSurfaceFromTheRun) {
  auto path = std::filesystem::temp_directory_path() / "tripipe_engine_bad.txt";
  std::ofstream(path) << "1 2\n2 3 4\n";
  FileEdgeSource src(path.string());
  for (SchedulerConfig s : {SchedulerConfig{Cooperative{}}, SchedulerConfig{Threads{2}}}) {
    RunConfig cfg;
    cfg.scheduler = s;
    try {
      run_two_rounds(src, cfg);
      FAIL() << "expected MalformedLine";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::malformed_line);
      EXPECT_EQ(e.line(), 2u);
    }
  }
  std::filesystem::remove(path);
}

TEST(RunConfigValidation, RejectsBadCombinations) {
  GeneratorEdgeSource src({GeneratorModel::complete, 4});
  RunConfig cfg;
  cfg.scheduler = Threads{0};
  EXPECT_THROW(run_two_rounds(src, cfg), Error);
  cfg.scheduler = Threads{2};
  cfg.record_profile = true;
  EXPECT_THROW(run_two_rounds(src, cfg), Error);
}

}  // namespace
}  // namespace tripipe
