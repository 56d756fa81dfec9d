#pragma once

// Scripted players that stand in for human participants.

#include <cstdint>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "densegame/game.hpp"
#include "densegame/protocol.hpp"
#include "densegame/rng.hpp"

namespace densegame {

enum class PolicyKind { Oracle, Contrarian, Random, Scripted };

inline std::string_view to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::Oracle: return "oracle";
    case PolicyKind::Contrarian: return "contrarian";
    case PolicyKind::Random: return "random";
    case PolicyKind::Scripted: return "scripted";
  }
  throw Error("invalid PolicyKind");
}

inline PolicyKind parse_policy_kind(std::string_view s) {
  for (PolicyKind k : {PolicyKind::Oracle, PolicyKind::Contrarian, PolicyKind::Random, PolicyKind::Scripted})
    if (to_string(k) == s) return k;
  throw Error("unknown policy '" + std::string(s) + "'");
}

struct AgentPolicy {
  PolicyKind kind = PolicyKind::Oracle;
  std::uint64_t seed = 0;            // Random
  std::vector<std::string> script;   // Scripted: protocol command lines

  static AgentPolicy oracle() { return {PolicyKind::Oracle, 0, {}}; }
  static AgentPolicy contrarian() { return {PolicyKind::Contrarian, 0, {}}; }
  static AgentPolicy random(std::uint64_t seed) { return {PolicyKind::Random, seed, {}}; }
  static AgentPolicy scripted(std::vector<std::string> lines) { return {PolicyKind::Scripted, 0, std::move(lines)}; }

  static AgentPolicy scripted_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open script " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return scripted(std::move(lines));
  }
};

namespace detail {

/// Virtual clock with seeded think times, so logs carry plausible durations.
class AgentClock {
 public:
  explicit AgentClock(std::uint64_t seed) : rng_(seed ^ 0x9E3779B97F4A7C15ULL) {}

  std::int64_t after(const GameSession& s, std::int64_t lo_ms, std::int64_t hi_ms) {
    return s.log().last_time() + rng_.between(lo_ms, hi_ms);
  }

 private:
  Rng rng_;
};

class Chooser {
 public:
  explicit Chooser(const AgentPolicy& p) : policy_(p), rng_(p.seed) {}

  Prediction predict(FlotationOutcome truth) {
    switch (policy_.kind) {
      case PolicyKind::Oracle: return prediction_of(truth);
      case PolicyKind::Contrarian: return static_cast<Prediction>((static_cast<int>(prediction_of(truth)) + 1) % 3);
      case PolicyKind::Random: return static_cast<Prediction>(rng_.below(3));
      case PolicyKind::Scripted: break;
    }
    throw Error("scripted agents do not choose");
  }

  Response answer(const Question& q) {
    const int n = static_cast<int>(q.options.size());
    switch (policy_.kind) {
      case PolicyKind::Oracle: return {q.id, q.correct_index, 4};
      case PolicyKind::Contrarian: return {q.id, (q.correct_index + 1) % n, 4};
      case PolicyKind::Random:
        return {q.id, static_cast<int>(rng_.below(static_cast<std::uint64_t>(n))), static_cast<int>(rng_.between(1, 4))};
      case PolicyKind::Scripted: break;
    }
    throw Error("scripted agents do not choose");
  }

 private:
  AgentPolicy policy_;
  Rng rng_;
};

inline GameSession run_script(std::shared_ptr<const GameSetup> setup, const AgentPolicy& policy,
                              const std::string& participant_id, std::uint64_t seed) {
  ProtocolHandler handler(setup);
  std::size_t line_no = 0;
  for (const auto& line : policy.script) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!handler.session()) {
      const Json cmd = Json::parse(line, nullptr, false);
      if (cmd.is_discarded() || !cmd.is_object() || cmd.value("cmd", "") != "new_session")
        handler.handle(Json{{"cmd", "new_session"}, {"participant_id", participant_id}, {"seed", seed}});
    }
    const Json reply = Json::parse(handler.handle_line(line));
    if (!reply.at("ok").get<bool>())
      throw ParseError("script command failed: " + reply.at("error").get<std::string>(), line_no);
  }
  if (!handler.session() || !handler.session()->finalized())
    throw Error("script ended before the session finished");
  return *handler.session();
}

}  // namespace detail

/// Plays one full session PreTest -> PostTest under `policy`.
inline GameSession play_session(std::shared_ptr<const GameSetup> setup, const AgentPolicy& policy,
                                const std::string& participant_id, std::uint64_t seed) {
  if (policy.kind == PolicyKind::Scripted) return detail::run_script(std::move(setup), policy, participant_id, seed);

  GameSession s = GameSession::create(setup, participant_id, seed);
  detail::AgentClock clock(seed);
  detail::Chooser chooser(policy);

  auto take_test = [&] {
    for (const auto& id : s.current_test().ordering) {
      const Response r = chooser.answer(*setup->bank.find(id));
      s.answer_item(r.question_id, r.chosen_index, r.confidence, clock.after(s, 15'000, 75'000));
    }
  };
  auto run_trials = [&] {
    const auto stage_setup = s.current_setup();
    const bool scored = is_scored_stage(s.stage());
    for (const auto& tank : stage_setup.tanks) {
      for (const auto& cube : stage_setup.catalog.cubes) {
        std::optional<Prediction> pred;
        if (scored) pred = chooser.predict(classify_flotation(cube, tank.liquid, setup->suspend_tolerance));
        s.submit_prediction(cube.id, tank.id, pred, clock.after(s, 5'000, 20'000));
      }
    }
  };
  auto weigh_neighbours = [&] {
    const auto cubes = s.current_setup().catalog.cubes;
    for (std::size_t i = 0; i + 1 < cubes.size(); ++i)
      s.weigh(cubes[i].id, cubes[i + 1].id, clock.after(s, 3'000, 10'000));
  };
  auto advance = [&] { s.advance_stage(clock.after(s, 1'000, 5'000)); };

  take_test();
  advance();
  weigh_neighbours();  // Training
  advance();
  weigh_neighbours();  // C1
  run_trials();
  advance();
  run_trials();  // C2
  advance();
  run_trials();  // C3
  advance();
  run_trials();  // Bonus
  advance();
  take_test();
  advance();
  return s;
}

}  // namespace densegame
