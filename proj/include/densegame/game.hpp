#pragma once

// The staged game session: PreTest -> Training -> C1 -> C2 -> C3 -> Bonus ->
// PostTest. Every mutation appends to the session's event log, and a log can
// be replayed into an identical session.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "densegame/assessment.hpp"
#include "densegame/catalog.hpp"
#include "densegame/content.hpp"
#include "densegame/physics.hpp"
#include "densegame/stage.hpp"
#include "densegame/telemetry.hpp"

namespace densegame {

enum class Prediction { Sink, StayMiddle, Float };

inline std::string_view to_string(Prediction p) {
  switch (p) {
    case Prediction::Sink: return "sink";
    case Prediction::StayMiddle: return "middle";
    case Prediction::Float: return "float";
  }
  throw Error("invalid Prediction");
}

inline Prediction parse_prediction(std::string_view s) {
  if (s == "sink") return Prediction::Sink;
  if (s == "middle") return Prediction::StayMiddle;
  if (s == "float") return Prediction::Float;
  throw Error("unknown prediction '" + std::string(s) + "' (expected sink, middle or float)");
}

inline FlotationOutcome outcome_of(Prediction p) {
  switch (p) {
    case Prediction::Sink: return FlotationOutcome::Sinks;
    case Prediction::StayMiddle: return FlotationOutcome::Suspends;
    case Prediction::Float: return FlotationOutcome::Floats;
  }
  throw Error("invalid Prediction");
}

inline Prediction prediction_of(FlotationOutcome o) {
  switch (o) {
    case FlotationOutcome::Sinks: return Prediction::Sink;
    case FlotationOutcome::Suspends: return Prediction::StayMiddle;
    case FlotationOutcome::Floats: return Prediction::Float;
  }
  throw Error("invalid FlotationOutcome");
}

inline constexpr int kCorrectPredictionPoints = 2;
inline constexpr int kWrongPredictionPoints = -1;

/// Immutable content shared by sessions.
struct GameSetup {
  Catalog catalog = Catalog::defaults();
  ItemBank bank = ItemBank::defaults();
  StringTable strings = StringTable::defaults();
  DynamicsParams dynamics;
  double suspend_tolerance = kGameplaySuspendTolerance;
  double max_release_time = 120.0;    // s
  std::size_t trajectory_stride = 4;  // 30 Hz at the default step

  void validate() const {
    dynamics.validate();
    if (bank.size() < 2) throw Error("item bank needs at least two questions");
    bank.check_strings(strings);
    for (StageId s : kStageOrder) instructions_for(strings, s);
    for (const auto& c : catalog.all_cubes()) mid_depth_release(c, dynamics);
  }
};

inline std::shared_ptr<const GameSetup> default_setup() {
  static const auto setup = std::make_shared<const GameSetup>();
  return setup;
}

struct TrialResult {
  FlotationOutcome observed = FlotationOutcome::Suspends;
  int score_delta = 0;
  int new_score = 0;
  bool surface_breach = false;
  std::vector<TrajectorySample> trajectory;
};

inline Json trajectory_to_json(const std::vector<TrajectorySample>& samples) {
  Json arr = Json::array();
  for (const auto& s : samples) arr.push_back(Json{{"t", s.t}, {"submersion", s.submersion}, {"velocity", s.velocity}});
  return arr;
}

class GameSession {
 public:
  /// Fresh session at PreTest with score 0. Deterministic in (participant, seed).
  static GameSession create(std::shared_ptr<const GameSetup> setup, std::string participant_id, std::uint64_t seed) {
    if (!setup) throw Error("missing game setup");
    setup->validate();
    GameSession s(std::move(setup));
    s.session_id_ = participant_id + "-" + std::to_string(seed);
    s.participant_id_ = std::move(participant_id);
    s.seed_ = seed;
    s.pre_test_ = build_test(s.setup_->bank, TestKind::Pre, seed);
    s.post_test_ = build_test(s.setup_->bank, TestKind::Post, seed);
    s.stage_entered_at_[StageId::PreTest] = 0;
    s.emit(0, StageId::PreTest, EventKind::StageEnter,
           Json{{"session_id", s.session_id_}, {"participant_id", s.participant_id_}, {"seed", seed}});
    return s;
  }

  /// Rebuilds a session by re-issuing the commands recorded in `log`; throws
  /// if the replayed log differs from the input anywhere.
  static GameSession replay(std::shared_ptr<const GameSetup> setup, const EventLog& log) {
    const auto& ev = log.events();
    if (ev.empty() || ev[0].kind != EventKind::StageEnter || ev[0].stage != StageId::PreTest)
      throw Error("log does not start with a PreTest entry");
    const Json& head = ev[0].payload;
    if (!head.contains("participant_id") || !head.contains("seed")) throw Error("log header lacks participant or seed");
    GameSession s = create(std::move(setup), head["participant_id"].get<std::string>(), head["seed"].get<std::uint64_t>());
    for (std::size_t i = 1; i < ev.size(); ++i) {
      const Event& e = ev[i];
      if (s.log_.size() > i) continue;  // produced as a side effect of an earlier command
      const Json& p = e.payload;
      switch (e.kind) {
        case EventKind::StageExit: s.advance_stage(e.t_ms); break;
        case EventKind::PredictionSubmitted: {
          std::optional<Prediction> pred;
          if (!p.at("prediction").is_null()) pred = parse_prediction(p.at("prediction").get<std::string>());
          s.submit_prediction(p.at("cube_id").get<std::string>(), p.at("tank_id").get<std::string>(), pred, e.t_ms);
          break;
        }
        case EventKind::BalanceUsed:
          s.weigh(p.at("left").get<std::string>(), p.at("right").get<std::string>(), e.t_ms);
          break;
        case EventKind::ItemAnswered:
          s.answer_item(p.at("item_id").get<std::string>(), p.at("choice").get<int>(), p.at("confidence").get<int>(),
                        e.t_ms);
          break;
        case EventKind::StageEnter:
        case EventKind::OutcomeObserved:
          throw Error("replay diverged at seq " + std::to_string(e.seq) + ": unexpected " + std::string(to_string(e.kind)));
      }
      const auto upto = std::min(s.log_.size(), ev.size());
      for (std::size_t k = i; k < upto; ++k)
        if (!(s.log_.events()[k] == ev[k])) throw Error("replay diverged at seq " + std::to_string(ev[k].seq));
    }
    if (s.log_.size() != ev.size()) throw Error("replay produced a different number of events");
    return s;
  }

  const GameSetup& setup() const { return *setup_; }
  std::shared_ptr<const GameSetup> setup_ptr() const { return setup_; }
  const std::string& session_id() const { return session_id_; }
  const std::string& participant_id() const { return participant_id_; }
  std::uint64_t seed() const { return seed_; }
  StageId stage() const { return stage_; }
  bool finalized() const { return finalized_; }
  int score() const { return score_; }
  const EventLog& log() const { return log_; }
  const std::map<StageId, std::int64_t>& stage_entered_at() const { return stage_entered_at_; }
  const TestInstance& pre_test() const { return pre_test_; }
  const TestInstance& post_test() const { return post_test_; }

  /// Test shown in the current stage; throws outside PreTest/PostTest.
  const TestInstance& current_test() const {
    if (stage_ == StageId::PreTest) return pre_test_;
    if (stage_ == StageId::PostTest) return post_test_;
    throw Error("stage " + std::string(to_string(stage_)) + " has no test");
  }

  StageSetup current_setup() const { return setup_->catalog.catalog_for(stage_); }

  const std::string& instructions() const { return instructions_for(setup_->strings, stage_); }

  const std::vector<Response>& responses(TestKind kind) const {
    static const std::vector<Response> none;
    auto it = answers_.find(kind);
    return it == answers_.end() ? none : it->second;
  }

  bool tested(std::string_view cube_id, std::string_view tank_id) const {
    return tested_.count({stage_, std::string(cube_id), std::string(tank_id)}) > 0;
  }

  /// Reasons the current stage cannot be left yet; empty when complete.
  std::vector<std::string> unmet_conditions() const {
    std::vector<std::string> out;
    if (finalized_) return out;
    if (is_test_stage(stage_)) {
      const auto kind = stage_ == StageId::PreTest ? TestKind::Pre : TestKind::Post;
      const auto& given = responses(kind);
      for (const auto& id : current_test().ordering) {
        const bool done = std::any_of(given.begin(), given.end(), [&](const Response& r) { return r.question_id == id; });
        if (!done) out.push_back("item " + id + " unanswered");
      }
    } else if (is_scored_stage(stage_)) {
      const auto setup = current_setup();
      for (const auto& tank : setup.tanks)
        for (const auto& cube : setup.catalog.cubes)
          if (!tested(cube.id, tank.id))
            out.push_back("cube " + cube.id + " untested" + (setup.tanks.size() > 1 ? " in " + tank.id : ""));
    }
    return out;
  }

  void advance_stage(std::int64_t t_ms) {
    if (finalized_) throw Error("session is finalized");
    if (auto unmet = unmet_conditions(); !unmet.empty()) throw Error(unmet.front());
    check_time(t_ms);
    emit(t_ms, stage_, EventKind::StageExit, Json::object());
    const auto next = successor(stage_);
    if (!next) {
      finalized_ = true;
      return;
    }
    stage_ = *next;
    stage_entered_at_[stage_] = t_ms;
    emit(t_ms, stage_, EventKind::StageEnter, Json::object());
  }

  /// Drops a cube into a tank. In scored stages the prediction is required
  /// and scored; in the bonus stage it is ignored.
  TrialResult submit_prediction(const std::string& cube_id, const std::string& tank_id,
                                std::optional<Prediction> prediction, std::int64_t t_ms) {
    require_active();
    if (!is_trial_stage(stage_))
      throw Error("predictions are not accepted in stage " + std::string(to_string(stage_)));
    const auto setup = current_setup();
    const Cube* cube = setup.catalog.find(cube_id);
    if (!cube) throw Error("cube " + cube_id + " is not part of stage " + std::string(to_string(stage_)));
    const Tank* tank = setup.find_tank(tank_id);
    if (!tank) throw Error("tank " + tank_id + " is not part of stage " + std::string(to_string(stage_)));
    if (tested(cube_id, tank_id)) throw Error("cube " + cube_id + " was already tested in " + tank_id);
    const bool scored = is_scored_stage(stage_);
    if (scored && !prediction) throw Error("a prediction is required before the drop");
    check_time(t_ms);

    TrialResult res;
    res.observed = classify_flotation(*cube, tank->liquid, setup_->suspend_tolerance);
    Json prediction_json = nullptr;
    if (scored) {
      prediction_json = to_string(*prediction);
      res.score_delta = outcome_of(*prediction) == res.observed ? kCorrectPredictionPoints : kWrongPredictionPoints;
    }
    const auto release = simulate_release(*cube, tank->liquid, mid_depth_release(*cube, setup_->dynamics),
                                          setup_->dynamics, setup_->max_release_time, setup_->trajectory_stride);
    res.trajectory = release.trajectory;
    res.surface_breach = release.surface_breach;
    score_ += res.score_delta;
    res.new_score = score_;
    tested_.insert({stage_, cube_id, tank_id});

    emit(t_ms, stage_, EventKind::PredictionSubmitted,
         Json{{"cube_id", cube_id},
              {"tank_id", tank_id},
              {"prediction", prediction_json}});
    const auto observed_at = t_ms + static_cast<std::int64_t>(std::llround(release.elapsed * 1000.0));
    emit(observed_at, stage_, EventKind::OutcomeObserved,
         Json{{"cube_id", cube_id},
              {"tank_id", tank_id},
              {"observed", to_string(res.observed)},
              {"score_delta", res.score_delta},
              {"new_score", res.new_score},
              {"surface_breach", res.surface_breach},
              {"trajectory", trajectory_to_json(res.trajectory)}});
    return res;
  }

  /// Roberval balance; available in Training and C1.
  BalanceReading weigh(const std::string& left_id, const std::string& right_id, std::int64_t t_ms) {
    require_active();
    if (stage_ != StageId::Training && stage_ != StageId::C1)
      throw Error("the balance is not available in stage " + std::string(to_string(stage_)));
    const auto setup = current_setup();
    const Cube* left = setup.catalog.find(left_id);
    const Cube* right = setup.catalog.find(right_id);
    if (!left) throw Error("cube " + left_id + " is not part of stage " + std::string(to_string(stage_)));
    if (!right) throw Error("cube " + right_id + " is not part of stage " + std::string(to_string(stage_)));
    check_time(t_ms);
    const auto reading = densegame::weigh(*left, *right);
    emit(t_ms, stage_, EventKind::BalanceUsed,
         Json{{"left", left_id}, {"right", right_id}, {"reading", to_string(reading)}});
    return reading;
  }

  void answer_item(const std::string& item_id, int choice, int confidence, std::int64_t t_ms) {
    require_active();
    if (!is_test_stage(stage_)) throw Error("no test is running in stage " + std::string(to_string(stage_)));
    const auto kind = stage_ == StageId::PreTest ? TestKind::Pre : TestKind::Post;
    Response r{item_id, choice, confidence};
    validate_response(r, setup_->bank);
    for (const auto& g : responses(kind))
      if (g.question_id == item_id) throw Error("item " + item_id + " was already answered");
    check_time(t_ms);
    answers_[kind].push_back(r);
    emit(t_ms, stage_, EventKind::ItemAnswered,
         Json{{"test", to_string(kind)}, {"item_id", item_id}, {"choice", choice}, {"confidence", confidence}});
  }

  /// Full mutable state; two sessions are identical iff these serialise equal.
  Json state_json() const {
    Json tested = Json::array();
    for (const auto& [stage, cube, tank] : tested_) tested.push_back(Json{to_string(stage), cube, tank});
    Json answers = Json::object();
    for (const auto& [kind, list] : answers_) {
      Json arr = Json::array();
      for (const auto& r : list) arr.push_back(Json{r.question_id, r.chosen_index, r.confidence});
      answers[std::string(to_string(kind))] = std::move(arr);
    }
    Json entered = Json::object();
    for (const auto& [stage, t] : stage_entered_at_) entered[std::string(to_string(stage))] = t;
    Json events = Json::array();
    for (const auto& e : log_.events()) events.push_back(to_json(e));
    return Json{{"session_id", session_id_},   {"participant_id", participant_id_},
                {"seed", seed_},               {"stage", to_string(stage_)},
                {"finalized", finalized_},     {"score", score_},
                {"pre_test", pre_test_.ordering}, {"post_test", post_test_.ordering},
                {"stage_entered_at", entered}, {"tested", tested},
                {"answers", answers},          {"event_log", events}};
  }

  friend bool operator==(const GameSession& a, const GameSession& b) {
    return a.session_id_ == b.session_id_ && a.participant_id_ == b.participant_id_ && a.seed_ == b.seed_ &&
           a.stage_ == b.stage_ && a.finalized_ == b.finalized_ && a.score_ == b.score_ && a.log_ == b.log_ &&
           a.stage_entered_at_ == b.stage_entered_at_ && a.pre_test_ == b.pre_test_ && a.post_test_ == b.post_test_ &&
           a.tested_ == b.tested_ && a.answers_ == b.answers_;
  }

 private:
  explicit GameSession(std::shared_ptr<const GameSetup> setup) : setup_(std::move(setup)) {}

  void require_active() const {
    if (finalized_) throw Error("session is finalized");
  }

  void check_time(std::int64_t t_ms) const {
    if (t_ms < log_.last_time())
      throw Error("command time " + std::to_string(t_ms) + " ms precedes the last event at " +
                  std::to_string(log_.last_time()) + " ms");
  }

  void emit(std::int64_t t_ms, StageId stage, EventKind kind, Json payload) {
    log_.append(Event{log_.next_seq(), t_ms, stage, kind, std::move(payload)});
  }

  std::shared_ptr<const GameSetup> setup_;
  std::string session_id_;
  std::string participant_id_;
  std::uint64_t seed_ = 0;
  StageId stage_ = StageId::PreTest;
  bool finalized_ = false;
  int score_ = 0;
  EventLog log_;
  std::map<StageId, std::int64_t> stage_entered_at_;
  TestInstance pre_test_;
  TestInstance post_test_;
  std::set<std::tuple<StageId, std::string, std::string>> tested_;
  std::map<TestKind, std::vector<Response>> answers_;
};

/// Score implied by a log: +2 per correct and -1 per wrong scored prediction,
/// recomputed from the recorded predictions and outcomes.
inline int replay_score(const EventLog& log) {
  int score = 0;
  std::optional<Json> pending;
  for (const auto& e : log.events()) {
    if (e.kind == EventKind::PredictionSubmitted) pending = e.payload;
    if (e.kind == EventKind::OutcomeObserved && is_scored_stage(e.stage)) {
      if (!pending || pending->at("prediction").is_null()) throw Error("scored outcome without a prediction");
      const auto predicted = outcome_of(parse_prediction(pending->at("prediction").get<std::string>()));
      score += predicted == parse_outcome(e.payload.at("observed").get<std::string>()) ? kCorrectPredictionPoints
                                                                                        : kWrongPredictionPoints;
      pending.reset();
    }
  }
  return score;
}

/// Responses recorded in a log for one test.
inline std::vector<Response> responses_from_log(const EventLog& log, TestKind kind) {
  std::vector<Response> out;
  for (const auto& e : log.events()) {
    if (e.kind != EventKind::ItemAnswered) continue;
    if (parse_test_kind(e.payload.at("test").get<std::string>()) != kind) continue;
    out.push_back({e.payload.at("item_id").get<std::string>(), e.payload.at("choice").get<int>(),
                   e.payload.at("confidence").get<int>()});
  }
  return out;
}

/// Participant recorded in the log header.
inline std::string participant_from_log(const EventLog& log) {
  if (log.empty() || !log.events().front().payload.contains("participant_id"))
    throw Error("log header lacks a participant id");
  return log.events().front().payload.at("participant_id").get<std::string>();
}

}  // namespace densegame
