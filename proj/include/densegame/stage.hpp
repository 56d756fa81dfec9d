#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "densegame/error.hpp"

namespace densegame {

/// Session stages in play order.
enum class StageId { PreTest, Training, C1, C2, C3, Bonus, PostTest };

inline constexpr std::array<StageId, 7> kStageOrder = {StageId::PreTest, StageId::Training, StageId::C1, StageId::C2,
                                                       StageId::C3,      StageId::Bonus,    StageId::PostTest};

inline std::string_view to_string(StageId s) {
  switch (s) {
    case StageId::PreTest: return "PreTest";
    case StageId::Training: return "Training";
    case StageId::C1: return "C1";
    case StageId::C2: return "C2";
    case StageId::C3: return "C3";
    case StageId::Bonus: return "Bonus";
    case StageId::PostTest: return "PostTest";
  }
  throw Error("unknown stage value " + std::to_string(static_cast<int>(s)));
}

inline StageId parse_stage(std::string_view s) {
  for (StageId id : kStageOrder)
    if (to_string(id) == s) return id;
  throw Error("unknown stage '" + std::string(s) + "'");
}

/// Row label used in timing tables.
inline std::string_view report_label(StageId s) {
  switch (s) {
    case StageId::PreTest: return "Pre-test";
    case StageId::Training: return "Training";
    case StageId::C1: return "Scenario 1";
    case StageId::C2: return "Scenario 2";
    case StageId::C3: return "Scenario 3";
    case StageId::Bonus: return "Scenario Bonus";
    case StageId::PostTest: return "Post-test";
  }
  throw Error("unknown stage value " + std::to_string(static_cast<int>(s)));
}

inline std::size_t stage_index(StageId s) { return static_cast<std::size_t>(s); }

/// Next stage, or nullopt after PostTest.
inline std::optional<StageId> successor(StageId s) {
  const auto i = stage_index(s);
  if (i + 1 >= kStageOrder.size()) return std::nullopt;
  return kStageOrder[i + 1];
}

inline bool is_test_stage(StageId s) { return s == StageId::PreTest || s == StageId::PostTest; }
inline bool is_trial_stage(StageId s) {
  return s == StageId::C1 || s == StageId::C2 || s == StageId::C3 || s == StageId::Bonus;
}
inline bool is_scored_stage(StageId s) { return s == StageId::C1 || s == StageId::C2 || s == StageId::C3; }

}  // namespace densegame
