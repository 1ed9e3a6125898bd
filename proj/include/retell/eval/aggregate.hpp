#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "retell/core/error.hpp"
#include "retell/session/session.hpp"

namespace retell::eval {

struct RoundAggregate {
  int round_index = 0;
  double mean_spent_seconds = 0.0;
  double mean_overall_similarity = 0.0;
  int sessions = 0;  // sessions that completed this round
};

// Per-round arithmetic means over the sessions that completed that round.
inline std::vector<RoundAggregate> aggregate_sessions(const std::vector<session::SessionState>& sessions) {
  if (sessions.empty()) fail(ErrorCode::invalid_argument, "aggregate_sessions: no sessions");
  const auto rounds = sessions.front().schedule.limits.size();
  for (const auto& s : sessions) {
    require(s.schedule.limits.size() == rounds, "aggregate_sessions: schedule lengths differ");
  }
  std::vector<RoundAggregate> out(rounds);
  for (std::size_t r = 0; r < rounds; ++r) {
    out[r].round_index = static_cast<int>(r);
    for (const auto& s : sessions) {
      if (r >= s.rounds.size()) continue;
      out[r].mean_spent_seconds += s.rounds[r].spent_seconds;
      out[r].mean_overall_similarity += s.rounds[r].report.overall_similarity;
      out[r].sessions += 1;
    }
    if (out[r].sessions > 0) {
      out[r].mean_spent_seconds /= out[r].sessions;
      out[r].mean_overall_similarity /= out[r].sessions;
    }
  }
  return out;
}

inline void to_json(nlohmann::json& j, const RoundAggregate& a) {
  j = {{"round_index", a.round_index},
       {"mean_spent_seconds", a.mean_spent_seconds},
       {"mean_overall_similarity", a.mean_overall_similarity},
       {"sessions", a.sessions}};
}

}  // namespace retell::eval
