#pragma once

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tripipe/baseline_mr.hpp"
#include "tripipe/engine.hpp"
#include "tripipe/graph_io.hpp"
#include "tripipe/metrics.hpp"
#include "tripipe/verify.hpp"

namespace tripipe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // invariant or verification failure
inline constexpr int kExitUsage = 2;    // bad flags or bad input

namespace detail {

struct InputFlags {
  std::string input;
  std::string gen;
  std::uint32_t n = 0;
  double p = 0.0;
  std::uint64_t seed = 0;

  void attach(CLI::App& cmd) {
    auto* in = cmd.add_option("--input", input, "Edge-list file");
    auto* g = cmd.add_option("--gen", gen, "Generator model: complete|path|cycle|star|gnp");
    in->excludes(g);
    cmd.add_option("--n", n, "Generator node count");
    cmd.add_option("--p", p, "Edge probability (gnp)");
    cmd.add_option("--seed", seed, "Generator seed (gnp)");
  }

  GeneratorSpec spec() const {
    auto model = parse_generator_model(gen);
    if (!model) throw Error(ErrorKind::invalid_spec, "unknown generator model '" + gen + "'");
    GeneratorSpec s{*model, n, p, seed};
    validate(s);
    return s;
  }

  /// Validates everything before any input is touched.
  std::unique_ptr<EdgeSource> open(ParseMode mode) const {
    if (input.empty() && gen.empty()) throw Error(ErrorKind::invalid_config, "need --input or --gen");
    if (!gen.empty()) return std::make_unique<GeneratorEdgeSource>(spec());
    return std::make_unique<FileEdgeSource>(input, mode);
  }

  std::string describe() const {
    if (!input.empty()) return input;
    std::string id = gen + "-n" + std::to_string(n);
    if (gen == "gnp") id += "-p" + CLI::detail::to_string(p) + "-s" + std::to_string(seed);
    return id;
  }
};

struct RunFlags {
  std::string mode = "set";
  std::string rule = "product";
  unsigned threads = 0;
  bool cooperative = false;
  std::string capacity = std::to_string(kDefaultCapacity);

  void attach(CLI::App& cmd, bool with_scheduler) {
    cmd.add_option("--mode", mode, "Adjacency mode: set|list|multiset")
        ->check(CLI::IsMember({"set", "list", "multiset"}));
    cmd.add_option("--multiset-rule", rule, "Closing rule in multiset mode: product|paper-min")
        ->check(CLI::IsMember({"product", "paper-min"}));
    cmd.add_option("--capacity", capacity, "Channel capacity, or 'unbounded'");
    if (with_scheduler) {
      auto* t = cmd.add_option("--threads", threads, "Run with K worker threads");
      auto* c = cmd.add_flag("--cooperative", cooperative, "Single-threaded lockstep scheduler (default)");
      t->excludes(c);
    }
  }

  ParseMode parse_mode() const {
    return mode == "multiset" ? ParseMode::multigraph : ParseMode::simple;
  }

  RunConfig config() const {
    RunConfig cfg;
    cfg.mode = *parse_adjacency_mode(mode);
    cfg.multiset_rule = *parse_multiset_rule(rule);
    if (capacity == "unbounded") {
      cfg.channel_capacity = std::nullopt;
    } else {
      std::size_t pos = 0;
      long long c = -1;
      try {
        c = std::stoll(capacity, &pos);
      } catch (const std::exception&) {
      }
      if (c < 1 || pos != capacity.size()) {
        throw Error(ErrorKind::invalid_config, "--capacity must be a positive integer or 'unbounded'");
      }
      cfg.channel_capacity = static_cast<std::size_t>(c);
    }
    if (threads > 0) cfg.scheduler = Threads{threads};
    return cfg;
  }
};

}  // namespace detail

/// Entry point shared by the `tripipe` binary and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Streaming triangle counting with a two-round dynamic pipeline", "tripipe"};
  app.require_subcommand(1);

  detail::InputFlags count_in, verify_in, baseline_in, profile_in;
  detail::RunFlags count_run, verify_run, profile_run;
  std::string count_profile;
  bool per_responsible = false;

  auto* count = app.add_subcommand("count", "Count triangles with the pipeline");
  count_in.attach(*count);
  count_run.attach(*count, true);
  count->add_option("--profile", count_profile, "Write the parallelism profile CSV here");
  count->add_flag("--per-responsible", per_responsible, "Print each stage's local count");

  auto* verify_cmd = app.add_subcommand("verify", "Check lemmas, oracles and determinism");
  verify_in.attach(*verify_cmd);
  verify_run.attach(*verify_cmd, false);

  auto* baseline = app.add_subcommand("baseline", "Compare MapReduce 2-path volume with pipeline storage");
  baseline_in.attach(*baseline);

  std::string profile_out;
  auto* profile = app.add_subcommand("profile", "Write the parallelism profile of a cooperative run");
  profile_in.attach(*profile);
  profile_run.attach(*profile, false);
  profile->add_option("-o,--output", profile_out, "CSV path (stdout if omitted)");

  GeneratorSpec gen_spec;
  std::string gen_model, gen_out;
  auto* gen = app.add_subcommand("generate", "Write a generated edge list");
  gen->add_option("--model", gen_model, "complete|path|cycle|star|gnp")->required();
  gen->add_option("--n", gen_spec.n, "Node count")->required();
  gen->add_option("--p", gen_spec.p, "Edge probability (gnp)");
  gen->add_option("--seed", gen_spec.seed, "Seed (gnp)");
  gen->add_option("-o,--output", gen_out, "Output path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*count) {
      auto cfg = count_run.config();
      cfg.record_profile = !count_profile.empty();
      validate(cfg);
      auto source = count_in.open(count_run.parse_mode());
      auto report = run_with_report(*source, cfg);
      if (cfg.record_profile) export_profile(report.profile, count_profile);
      if (per_responsible) {
        for (const auto& r : report.result.per_responsible) {
          out << source->labels().label(r.responsible) << ": " << r.count << '\n';
        }
        out << "total: " << report.result.total << '\n';
      } else {
        out << "triangles: " << report.result.total << '\n';
      }
      return kExitOk;
    }

    if (*verify_cmd) {
      auto cfg = verify_run.config();
      validate(cfg);
      auto source = verify_in.open(verify_run.parse_mode());
      auto report = tripipe::verify(*source, cfg);
      for (const auto& c : report.checks) {
        out << c.name << ": " << (c.informational ? "INFO" : c.passed ? "PASS" : "FAIL");
        if (!c.detail.empty()) out << " (" << c.detail << ')';
        out << '\n';
      }
      out << "triangles: " << report.run.result.total << '\n';
      if (const auto* f = report.first_failure()) {
        err << "verification failed: " << f->name << ": " << f->detail << '\n';
        return kExitFailure;
      }
      return kExitOk;
    }

    if (*baseline) {
      auto source = baseline_in.open(ParseMode::simple);
      auto row = mr::compare_volumes(*source, baseline_in.describe());
      mr::write_volume_csv_header(out);
      mr::write_volume_csv_row(row, out);
      if (row.triangles != row.pipeline_triangles) {
        err << "triangle totals disagree: mr " << row.triangles << ", pipeline "
            << row.pipeline_triangles << '\n';
        return kExitFailure;
      }
      return kExitOk;
    }

    if (*profile) {
      auto cfg = profile_run.config();
      cfg.record_profile = true;
      validate(cfg);
      auto source = profile_in.open(profile_run.parse_mode());
      auto report = run_with_report(*source, cfg);
      if (profile_out.empty()) {
        write_profile_csv(report.profile, out);
      } else {
        export_profile(report.profile, profile_out);
        out << "steps: " << report.profile.entries().size() << '\n'
            << "max_fireable: " << report.profile.max_fireable() << '\n'
            << "triangles: " << report.result.total << '\n';
      }
      return kExitOk;
    }

    if (*gen) {
      auto model = parse_generator_model(gen_model);
      if (!model) throw Error(ErrorKind::invalid_spec, "unknown generator model '" + gen_model + "'");
      gen_spec.model = *model;
      GeneratorEdgeSource source(gen_spec);
      auto edges = generate(gen_spec);
      if (gen_out.empty()) {
        serialize_edge_list(edges, source.labels(), out);
      } else {
        std::ofstream file(gen_out);
        if (!file) throw Error(ErrorKind::io_failure, "cannot write '" + gen_out + "'");
        serialize_edge_list(edges, source.labels(), file);
        if (!file) throw Error(ErrorKind::io_failure, "write to '" + gen_out + "' failed");
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_input_error() ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace tripipe::cli
