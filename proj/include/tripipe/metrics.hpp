#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tripipe/error.hpp"

namespace tripipe {

/// What the profiler needs to know about one live stage at a step boundary.
struct StageSnapshot {
  std::size_t pending = 0;   // items waiting on the input channel
  bool output_space = true;  // downstream channel can take one more item
};

struct ProfileEntry {
  std::size_t step = 0;
  std::size_t fireable = 0;
  std::size_t live = 0;
  int round = 1;

  friend bool operator==(const ProfileEntry&, const ProfileEntry&) = default;
};

/// A stage can fire when it has input and somewhere to put its output.
inline bool is_fireable(const StageSnapshot& s) noexcept { return s.pending > 0 && s.output_space; }

inline ProfileEntry record_step(std::size_t step, std::span<const StageSnapshot> stages, int round) {
  auto fireable = static_cast<std::size_t>(std::count_if(stages.begin(), stages.end(), is_fireable));
  return {step, fireable, stages.size(), round};
}

/// Available parallelism per lockstep step.
class ParallelismProfile {
 public:
  void append(const ProfileEntry& e) {
    if (!entries_.empty() && e.step <= entries_.back().step) {
      throw Error(ErrorKind::protocol_violation, "profile steps must strictly increase");
    }
    entries_.push_back(e);
  }

  const std::vector<ProfileEntry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  std::size_t max_fireable() const {
    std::size_t m = 0;
    for (const auto& e : entries_) m = std::max(m, e.fireable);
    return m;
  }

  std::size_t total_fireable() const {
    std::size_t s = 0;
    for (const auto& e : entries_) s += e.fireable;
    return s;
  }

 private:
  std::vector<ProfileEntry> entries_;
};

inline void write_profile_csv(const ParallelismProfile& profile, std::ostream& out) {
  out << "step,fireable,live,round\n";
  for (const auto& e : profile.entries()) {
    out << e.step << ',' << e.fireable << ',' << e.live << ',' << e.round << '\n';
  }
}

inline void export_profile(const ParallelismProfile& profile, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io_failure, "cannot write '" + path + "'");
  write_profile_csv(profile, out);
  if (!out) throw Error(ErrorKind::io_failure, "write to '" + path + "' failed");
}

}  // namespace tripipe
