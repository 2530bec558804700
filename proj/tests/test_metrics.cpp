#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tripipe/engine.hpp"
#include "tripipe/metrics.hpp"

namespace tripipe {
namespace {

RunReport profiled(GeneratorSpec spec, Capacity cap = kDefaultCapacity) {
  GeneratorEdgeSource src(spec);
  RunConfig cfg;
  cfg.record_profile = true;
  cfg.channel_capacity = cap;
  return run_with_report(src, cfg);
}

TEST(RecordStep, CountsStagesWithInputAndRoom) {
  std::vector<StageSnapshot> one{{1, true}};
  EXPECT_EQ(record_step(0, one, 1).fireable, 1u);
  EXPECT_EQ(record_step(0, std::vector<StageSnapshot>{}, 1).fireable, 0u);

  std::vector<StageSnapshot> k6_round2(5, StageSnapshot{2, true});
  auto e = record_step(17, k6_round2, 2);
  EXPECT_EQ(e.fireable, 5u);
  EXPECT_EQ(e.live, 5u);
  EXPECT_EQ(e.round, 2);

  std::vector<StageSnapshot> blocked{{1, false}, {0, true}, {3, true}};
  EXPECT_EQ(record_step(0, blocked, 1).fireable, 1u);
}

TEST(ParallelismProfile, StepsMustIncrease) {
  ParallelismProfile p;
  p.append({0, 0, 0, 1});
  p.append({1, 1, 1, 1});
  EXPECT_THROW(p.append({1, 1, 1, 1}), Error);
}

TEST(ExportProfile, EmptyProfileIsHeaderOnly) {
  std::ostringstream out;
  write_profile_csv({}, out);
  EXPECT_EQ(out.str(), "step,fireable,live,round\n");
}

TEST(ExportProfile, WritesOneRowPerStep) {
  auto report = profiled({GeneratorModel::complete, 4});
  auto path = std::filesystem::temp_directory_path() / "tripipe_profile_test.csv";
  export_profile(report.profile, path.string());
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "step,fireable,live,round");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 3);
    EXPECT_NE(line.back(), ',');
  }
  EXPECT_EQ(rows, report.profile.entries().size());
  std::filesystem::remove(path);
}

TEST(ExportProfile, UnwritablePathIsIoFailure) {
  EXPECT_THROW(export_profile({}, "/nonexistent/dir/profile.csv"), Error);
}

TEST(Profile, CompleteEightStaysWithinStageBound) {
  for (Capacity cap : {Capacity{1}, Capacity{kDefaultCapacity}, Capacity{}}) {
    auto report = profiled({GeneratorModel::complete, 8}, cap);
    EXPECT_LE(report.profile.max_fireable(), 7u);
    EXPECT_EQ(report.result.total, 56u);
  }
}

TEST(Profile, FireableNeverExceedsLive) {
  auto report = profiled({GeneratorModel::gnp, 40, 0.2, 5}, Capacity{2});
  for (const auto& e : report.profile.entries()) EXPECT_LE(e.fireable, e.live);
}

TEST(Profile, EveryFiringHappensAtAFireableStage) {
  auto report = profiled({GeneratorModel::gnp, 30, 0.3, 8});
  EXPECT_GE(report.profile.total_fireable(), report.stats.firings);
  EXPECT_EQ(report.profile.entries().size(), report.stats.steps);
}

TEST(Profile, RecordingDoesNotChangeTheResult) {
  GeneratorEdgeSource src({GeneratorModel::gnp, 50, 0.2, 12});
  RunConfig plain;
  RunConfig instrumented;
  instrumented.record_profile = true;
  EXPECT_EQ(run_two_rounds(src, plain), run_two_rounds(src, instrumented));
}

TEST(Profile, PathRoundTwoFillsThenDrains) {
  auto report = profiled({GeneratorModel::path, 5});
  std::vector<std::size_t> round2;
  for (const auto& e : report.profile.entries()) {
    if (e.round == 2) round2.push_back(e.fireable);
  }
  ASSERT_FALSE(round2.empty());
  auto peak = std::max_element(round2.begin(), round2.end());
  EXPECT_EQ(*peak, 4u);
  EXPECT_TRUE(std::is_sorted(round2.begin(), peak + 1));
  EXPECT_TRUE(std::is_sorted(peak, round2.end(), std::greater<>{}));
  EXPECT_EQ(round2.back(), 1u);
}

}  // namespace
}  // namespace tripipe
