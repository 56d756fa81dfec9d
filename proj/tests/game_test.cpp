#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "densegame/agents.hpp"
#include "densegame/game.hpp"
#include "densegame/protocol.hpp"

using namespace densegame;

namespace {

std::shared_ptr<const GameSetup> setup() { return default_setup(); }

void answer_all(GameSession& s, std::int64_t t) {
  for (const auto& id : s.current_test().ordering) s.answer_item(id, 0, 2, t);
}

/// Tests every cube in every tank of the current stage with correct predictions.
void complete_trials(GameSession& s, std::int64_t t) {
  const auto st = s.current_setup();
  for (const auto& tank : st.tanks)
    for (const auto& cube : st.catalog.cubes) {
      std::optional<Prediction> p;
      if (is_scored_stage(s.stage())) p = prediction_of(classify_flotation(cube, tank.liquid, kGameplaySuspendTolerance));
      s.submit_prediction(cube.id, tank.id, p, s.log().last_time() + t);
    }
}

/// Completes the current stage and moves on.
void finish_stage(GameSession& s) {
  if (is_test_stage(s.stage())) answer_all(s, s.log().last_time() + 1000);
  if (is_trial_stage(s.stage())) complete_trials(s, 1000);
  s.advance_stage(s.log().last_time() + 1000);
}

GameSession session_at(StageId stage, std::uint64_t seed = 42) {
  GameSession s = GameSession::create(setup(), "p1", seed);
  while (s.stage() != stage) finish_stage(s);
  return s;
}

Catalog catalog_with(const std::string& cubes) {
  return Catalog::parse("liquid id=water density_g_cm3=1\nliquid id=oil density_g_cm3=0.92\n"
                        "liquid id=quicksilver density_g_cm3=13.534\n" + cubes);
}

}  // namespace

TEST(Stage, OrderAndLabels) {
  EXPECT_EQ(successor(StageId::PreTest), StageId::Training);
  EXPECT_EQ(successor(StageId::C3), StageId::Bonus);
  EXPECT_EQ(successor(StageId::PostTest), std::nullopt);
  EXPECT_EQ(report_label(StageId::C1), "Scenario 1");
  EXPECT_EQ(parse_stage("Bonus"), StageId::Bonus);
  EXPECT_THROW(parse_stage("C4"), Error);
  EXPECT_THROW(to_string(static_cast<StageId>(9)), Error);
}

TEST(Instructions, PerStage) {
  const auto strings = StringTable::defaults();
  EXPECT_FALSE(instructions_for(strings, StageId::PreTest).empty());
  EXPECT_NE(instructions_for(strings, StageId::C1).find("prediction"), std::string::npos);
  EXPECT_THROW(instructions_for(strings, static_cast<StageId>(9)), Error);
  for (StageId s : kStageOrder) EXPECT_FALSE(instructions_for(strings, s).empty());
}

TEST(Catalog, DefaultStageSetups) {
  const auto cat = Catalog::defaults();
  const auto c3 = cat.catalog_for(StageId::C3);
  ASSERT_EQ(c3.tanks.size(), 2u);
  EXPECT_EQ(c3.tanks[0].liquid.density, 1.0);
  EXPECT_EQ(c3.tanks[1].liquid.density, 0.92);
  EXPECT_EQ(c3.catalog.cubes, cat.catalog_for(StageId::C1).catalog.cubes);

  const auto bonus = cat.catalog_for(StageId::Bonus);
  ASSERT_EQ(bonus.tanks.size(), 2u);
  EXPECT_EQ(bonus.tanks[0].id, "water");
  EXPECT_EQ(bonus.tanks[1].liquid.density, 13.534);
  EXPECT_EQ(bonus.catalog.cubes, cat.catalog_for(StageId::C1).catalog.cubes);

  const auto c2 = cat.catalog_for(StageId::C2);
  EXPECT_EQ(c2.tanks.size(), 1u);
  ASSERT_EQ(c2.catalog.cubes.size(), 3u);
  for (const auto& c : c2.catalog.cubes) EXPECT_EQ(c.mass, 800.0);

  EXPECT_THROW(cat.catalog_for(StageId::PreTest), Error);
  EXPECT_EQ(cat.scored_trial_count(), 15u);  // C1 4 + C2 3 + C3 4x2
}

TEST(Catalog, EveryPredictionIsCorrectSomewhere) {
  const auto cat = Catalog::defaults();
  for (StageId s : {StageId::C1, StageId::C2}) {
    std::set<FlotationOutcome> seen;
    const auto st = cat.catalog_for(s);
    for (const auto& c : st.catalog.cubes) seen.insert(classify_flotation(c, st.tanks[0].liquid, 1e-3));
    EXPECT_EQ(seen.size(), 3u) << to_string(s);
  }
}

TEST(Catalog, DiscriminatingCubeBehavesDifferentlyInOil) {
  const auto cat = Catalog::defaults();
  const auto c3 = cat.catalog_for(StageId::C3);
  int discriminating = 0;
  for (const auto& c : c3.catalog.cubes) {
    const double rho = density(c);
    const auto in_water = classify_flotation(c, c3.tanks[0].liquid, kGameplaySuspendTolerance);
    const auto in_oil = classify_flotation(c, c3.tanks[1].liquid, kGameplaySuspendTolerance);
    if (rho > 0.92 && rho < 1.0) {
      EXPECT_NE(in_water, in_oil) << c.id;
    }
    discriminating += in_water != in_oil;
  }
  EXPECT_GE(discriminating, 1);
  // A catalog with no such cube is rejected.
  EXPECT_THROW(catalog_with("cube stage=Training id=T volume_cm3=1 mass_g=1\n"
                            "cube stage=C1 id=A volume_cm3=1000 mass_g=500\n"
                            "cube stage=C1 id=B volume_cm3=1000 mass_g=2000\n"
                            "cube stage=C2 id=E volume_cm3=500 mass_g=800\n"),
               Error);
}

TEST(Catalog, ParseErrorsCarryLineNumbers) {
  try {
    Catalog::parse("liquid id=water density_g_cm3=1\n\ncube stage=C1 id=A volume_cm3=-3 mass_g=1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(Catalog::parse("cube stage=C3 id=A volume_cm3=1 mass_g=1\n"), ParseError);
  EXPECT_THROW(Catalog::parse("liquid id=water density_g_cm3=1,0\n"), ParseError);
  EXPECT_THROW(Catalog::parse("tank id=x\n"), ParseError);
}

TEST(Balance, Examples) {
  const Cube heavy = make_cube("h", 1000, 1200), light = make_cube("l", 1000, 500);
  EXPECT_EQ(weigh(heavy, light), BalanceReading::LeftHeavier);
  EXPECT_EQ(weigh(make_cube("a", 512, 800), make_cube("b", 1000, 800)), BalanceReading::Balanced);
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> m(1.0, 3000.0);
  for (int i = 0; i < 200; ++i) {
    const Cube a = make_cube("a", 100, m(gen)), b = make_cube("b", 100, i % 10 == 0 ? a.mass : m(gen));
    const auto ab = weigh(a, b), ba = weigh(b, a);
    if (ab == BalanceReading::Balanced) {
      EXPECT_EQ(ba, BalanceReading::Balanced);
    } else {
      EXPECT_NE(ab, ba);
      EXPECT_NE(ba, BalanceReading::Balanced);
    }
  }
}

TEST(NewSession, StartsAtPreTestDeterministically) {
  const auto a = GameSession::create(setup(), "p1", 42);
  EXPECT_EQ(a.stage(), StageId::PreTest);
  EXPECT_EQ(a.score(), 0);
  EXPECT_EQ(a.session_id(), "p1-42");
  const auto b = GameSession::create(setup(), "p1", 42);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.state_json().dump(), b.state_json().dump());
  EXPECT_EQ(log_to_string(a.log()), log_to_string(b.log()));

  const auto c = GameSession::create(setup(), "p1", 43);
  EXPECT_EQ(a.pre_test(), TestInstance({TestKind::Pre, c.pre_test().ordering, 42}));
  EXPECT_NE(a.post_test().ordering, c.post_test().ordering);
  EXPECT_NE(a.post_test().ordering, a.pre_test().ordering);
}

TEST(AdvanceStage, PreTestCompleteGoesToTraining) {
  GameSession s = GameSession::create(setup(), "p1", 42);
  EXPECT_THROW(s.advance_stage(10), Error);
  answer_all(s, 10);
  s.advance_stage(20);
  EXPECT_EQ(s.stage(), StageId::Training);
  EXPECT_EQ(s.stage_entered_at().at(StageId::Training), 20);
}

TEST(AdvanceStage, C3CompleteGoesToBonusAndBonusNeedsNothing) {
  GameSession s = session_at(StageId::C3);
  complete_trials(s, 1000);
  s.advance_stage(s.log().last_time());
  EXPECT_EQ(s.stage(), StageId::Bonus);
  s.advance_stage(s.log().last_time());
  EXPECT_EQ(s.stage(), StageId::PostTest);
}

TEST(AdvanceStage, UntestedCubeBlocksC1) {
  GameSession s = session_at(StageId::C1);
  for (const char* id : {"A", "B", "C"}) s.submit_prediction(id, "water", Prediction::Float, s.log().last_time());
  try {
    s.advance_stage(s.log().last_time());
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "cube D untested");
  }
  GameSession c3 = session_at(StageId::C3);
  EXPECT_EQ(c3.unmet_conditions().front(), "cube A untested in water");
}

TEST(AdvanceStage, FinalizedSessionRejectsEverything) {
  GameSession s = session_at(StageId::PostTest);
  finish_stage(s);
  EXPECT_TRUE(s.finalized());
  EXPECT_THROW(s.advance_stage(s.log().last_time()), Error);
  EXPECT_THROW(s.answer_item("Q01", 0, 1, s.log().last_time()), Error);
  const auto durations = stage_durations(s.log());
  EXPECT_EQ(durations.size(), 7u);
}

TEST(SubmitPrediction, ScoringExamples) {
  const auto half = "cube stage=Training id=T volume_cm3=1000 mass_g=300\n"
                    "cube stage=C1 id=H volume_cm3=1000 mass_g=500\n"
                    "cube stage=C1 id=S volume_cm3=1000 mass_g=950\n"
                    "cube stage=C2 id=E volume_cm3=500 mass_g=800\n";
  auto custom = std::make_shared<GameSetup>();
  custom->catalog = catalog_with(half);
  GameSession s = GameSession::create(custom, "p", 1);
  while (s.stage() != StageId::C1) finish_stage(s);

  const auto right = s.submit_prediction("H", "water", Prediction::Float, s.log().last_time());
  EXPECT_EQ(right.observed, FlotationOutcome::Floats);
  EXPECT_EQ(right.score_delta, 2);
  EXPECT_EQ(s.score(), 2);
  const auto wrong = s.submit_prediction("S", "water", Prediction::Sink, s.log().last_time());
  EXPECT_EQ(wrong.observed, FlotationOutcome::Floats);
  EXPECT_EQ(wrong.score_delta, -1);
  EXPECT_EQ(s.score(), 1);
  EXPECT_EQ(replay_score(s.log()), 1);
}

TEST(SubmitPrediction, ValidationLeavesStateUntouched) {
  GameSession s = session_at(StageId::C1);
  const auto before = s.state_json();
  EXPECT_THROW(s.submit_prediction("A", "water", std::nullopt, s.log().last_time()), Error);
  EXPECT_THROW(s.submit_prediction("E", "water", Prediction::Sink, s.log().last_time()), Error);
  EXPECT_THROW(s.submit_prediction("A", "oil", Prediction::Sink, s.log().last_time()), Error);
  EXPECT_THROW(s.submit_prediction("A", "water", Prediction::Sink, s.log().last_time() - 1), Error);
  EXPECT_EQ(s.state_json(), before);
  s.submit_prediction("A", "water", Prediction::Sink, s.log().last_time());
  EXPECT_THROW(s.submit_prediction("A", "water", Prediction::Sink, s.log().last_time()), Error);

  GameSession pre = GameSession::create(setup(), "p", 1);
  EXPECT_THROW(pre.submit_prediction("A", "water", Prediction::Sink, 0), Error);
  EXPECT_THROW(pre.weigh("A", "B", 0), Error);
}

TEST(SubmitPrediction, OutcomeFollowsPredictionInTheLog) {
  GameSession s = session_at(StageId::C1);
  const auto n = s.log().size();
  s.submit_prediction("D", "water", Prediction::Sink, s.log().last_time() + 500);
  const auto& ev = s.log().events();
  ASSERT_EQ(ev.size(), n + 2);
  EXPECT_EQ(ev[n].kind, EventKind::PredictionSubmitted);
  EXPECT_EQ(ev[n].payload["prediction"], "sink");
  EXPECT_EQ(ev[n + 1].kind, EventKind::OutcomeObserved);
  EXPECT_EQ(ev[n + 1].payload["observed"], "Sinks");
  EXPECT_GT(ev[n + 1].t_ms, ev[n].t_ms);
  EXPECT_FALSE(ev[n + 1].payload["trajectory"].empty());
}

TEST(Bonus, NeverChangesScore) {
  GameSession s = session_at(StageId::Bonus);
  const int score = s.score();
  const auto st = s.current_setup();
  int k = 0;
  for (const auto& tank : st.tanks)
    for (const auto& cube : st.catalog.cubes) {
      // Any supplied prediction is ignored.
      std::optional<Prediction> p;
      if (k++ % 2) p = Prediction::Sink;
      const auto r = s.submit_prediction(cube.id, tank.id, p, s.log().last_time());
      EXPECT_EQ(r.score_delta, 0);
      EXPECT_EQ(s.score(), score);
      if (tank.id == "quicksilver") {
        EXPECT_EQ(r.observed, FlotationOutcome::Floats) << cube.id;
      }
      EXPECT_TRUE(s.log().events()[s.log().size() - 2].payload["prediction"].is_null());
    }
}

TEST(Weigh, AvailableInTrainingAndC1) {
  GameSession t = session_at(StageId::Training);
  EXPECT_EQ(t.weigh("T1", "T2", 0 + t.log().last_time()), BalanceReading::RightHeavier);
  GameSession c1 = session_at(StageId::C1);
  EXPECT_EQ(c1.weigh("D", "A", c1.log().last_time()), BalanceReading::LeftHeavier);
  EXPECT_EQ(c1.log().events().back().payload["reading"], "LeftHeavier");
  EXPECT_THROW(c1.weigh("D", "E", c1.log().last_time()), Error);
  GameSession c2 = session_at(StageId::C2);
  EXPECT_THROW(c2.weigh("E", "F", c2.log().last_time()), Error);
}

TEST(Replay, ReproducesFinalState) {
  for (const auto& policy : {AgentPolicy::oracle(), AgentPolicy::contrarian(), AgentPolicy::random(7)}) {
    const GameSession s = play_session(setup(), policy, "p", 11);
    const GameSession r = GameSession::replay(setup(), s.log());
    EXPECT_EQ(r, s);
    EXPECT_EQ(r.state_json().dump(), s.state_json().dump());
    // Through the file format as well.
    EXPECT_EQ(GameSession::replay(setup(), read_log(log_to_string(s.log()))), s);
  }
}

TEST(Replay, PartialLogsAndTampering) {
  GameSession s = session_at(StageId::C2);
  s.submit_prediction("E", "water", Prediction::Sink, s.log().last_time());
  EXPECT_EQ(GameSession::replay(setup(), s.log()), s);

  EventLog tampered;
  for (auto e : s.log().events()) {
    if (e.kind == EventKind::OutcomeObserved && e.payload["cube_id"] == "E") e.payload["observed"] = "Floats";
    tampered.append(e);
  }
  EXPECT_THROW(GameSession::replay(setup(), tampered), Error);
  EXPECT_THROW(GameSession::replay(setup(), EventLog{}), Error);
}

TEST(Agents, OracleAndContrarianScores) {
  const auto oracle = play_session(setup(), AgentPolicy::oracle(), "o", 1);
  EXPECT_EQ(oracle.score(), 30);
  const auto contrarian = play_session(setup(), AgentPolicy::contrarian(), "c", 1);
  EXPECT_EQ(contrarian.score(), -15);
  for (const auto* s : {&oracle, &contrarian}) {
    EXPECT_TRUE(s->finalized());
    EXPECT_EQ(replay_score(s->log()), s->score());
    int bonus_outcomes = 0;
    for (const auto& e : s->log().events())
      if (e.stage == StageId::Bonus && e.kind == EventKind::OutcomeObserved) {
        ++bonus_outcomes;
        EXPECT_EQ(e.payload["score_delta"], 0);
      }
    EXPECT_EQ(bonus_outcomes, 8);
  }
  const auto pre = grade(responses_from_log(oracle.log(), TestKind::Pre), setup()->bank);
  EXPECT_EQ(pre.success_rate, 1.0);
  const auto post = grade(responses_from_log(contrarian.log(), TestKind::Post), setup()->bank);
  EXPECT_EQ(post.success_rate, 0.0);
}

TEST(Agents, DeterministicPerSeed) {
  const auto a = play_session(setup(), AgentPolicy::random(3), "r", 5);
  const auto b = play_session(setup(), AgentPolicy::random(3), "r", 5);
  EXPECT_EQ(log_to_string(a.log()), log_to_string(b.log()));
  const auto c = play_session(setup(), AgentPolicy::random(4), "r", 5);
  EXPECT_NE(log_to_string(a.log()), log_to_string(c.log()));
}

TEST(Agents, ScriptedPolicyDrivesTheProtocol) {
  // A script produced from an oracle session's own commands replays it.
  const auto reference = play_session(setup(), AgentPolicy::oracle(), "s", 9);
  std::vector<std::string> lines = {R"({"cmd":"new_session","participant_id":"s","seed":9})"};
  for (const auto& e : reference.log().events()) {
    Json cmd;
    switch (e.kind) {
      case EventKind::StageExit: cmd = {{"cmd", "advance_stage"}}; break;
      case EventKind::PredictionSubmitted:
        cmd = {{"cmd", "submit_prediction"}, {"cube_id", e.payload["cube_id"]}, {"tank_id", e.payload["tank_id"]},
               {"prediction", e.payload["prediction"]}};
        break;
      case EventKind::BalanceUsed: cmd = {{"cmd", "weigh"}, {"left", e.payload["left"]}, {"right", e.payload["right"]}}; break;
      case EventKind::ItemAnswered:
        cmd = {{"cmd", "answer_item"}, {"item_id", e.payload["item_id"]}, {"choice", e.payload["choice"]},
               {"confidence", e.payload["confidence"]}};
        break;
      default: continue;
    }
    cmd["t_ms"] = e.t_ms;
    lines.push_back(cmd.dump());
  }
  const auto s = play_session(setup(), AgentPolicy::scripted(lines), "ignored", 0);
  EXPECT_EQ(s, reference);

  lines.pop_back();
  EXPECT_THROW(play_session(setup(), AgentPolicy::scripted(lines), "x", 0), Error);
  EXPECT_THROW(play_session(setup(), AgentPolicy::scripted({R"({"cmd":"advance_stage"})"}), "x", 0), ParseError);
}

TEST(Property, RandomCommandSequencesKeepInvariants) {
  std::mt19937_64 gen(99);
  const auto bank_ids = setup()->bank.ids();
  for (int trial = 0; trial < 40; ++trial) {
    GameSession s = GameSession::create(setup(), "p" + std::to_string(trial), gen());
    std::vector<StageId> visited = {s.stage()};
    for (int step = 0; step < 400 && !s.finalized(); ++step) {
      const auto before_state = s.state_json();
      const int before_score = s.score();
      const StageId before_stage = s.stage();
      const std::int64_t t = s.log().last_time() + static_cast<std::int64_t>(gen() % 3000) - 100;
      try {
        switch (gen() % 5) {
          case 0: s.advance_stage(t); break;
          case 1:
            s.answer_item(bank_ids[gen() % bank_ids.size()], static_cast<int>(gen() % 5), static_cast<int>(gen() % 5), t);
            break;
          case 2: s.weigh(std::string(1, static_cast<char>('A' + gen() % 7)), "T1", t); break;
          default: {
            const char* tanks[] = {"water", "oil", "quicksilver"};
            std::optional<Prediction> p;
            if (gen() % 6) p = static_cast<Prediction>(gen() % 3);
            s.submit_prediction(std::string(1, static_cast<char>('A' + gen() % 7)), tanks[gen() % 3], p, t);
          }
        }
      } catch (const Error&) {
        EXPECT_EQ(s.state_json(), before_state) << "failed command mutated the session";
      }
      if (!is_scored_stage(before_stage)) {
        EXPECT_EQ(s.score(), before_score);
      }
      EXPECT_EQ(s.score(), replay_score(s.log()));
      if (s.stage() != visited.back()) visited.push_back(s.stage());
    }
    // Stages are visited in order, without skips or repeats.
    for (std::size_t i = 0; i < visited.size(); ++i) EXPECT_EQ(visited[i], kStageOrder[i]);
    EXPECT_EQ(GameSession::replay(setup(), s.log()), s);
  }
}

TEST(Property, OracleScoresTwicePerScoredTrialOnRandomCatalogs) {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 25; ++trial) {
    const double oil = std::uniform_real_distribution<double>(0.80, 0.95)(gen);
    const double vol = std::uniform_real_distribution<double>(200.0, 3000.0)(gen);
    std::string text = "liquid id=water density_g_cm3=1\nliquid id=oil density_g_cm3=" + std::to_string(oil) +
                       "\nliquid id=quicksilver density_g_cm3=13.534\ncube stage=Training id=T volume_cm3=1 mass_g=2\n";
    // One C1 cube between the two liquids guarantees a water/oil difference.
    std::vector<double> rhos = {(1.0 + oil) / 2.0};
    const std::size_t n1 = 1 + gen() % 5, n2 = 1 + gen() % 4;
    while (rhos.size() < n1 + 1) rhos.push_back(std::uniform_real_distribution<double>(0.2, 2.5)(gen));
    for (std::size_t i = 0; i < rhos.size(); ++i)
      text += "cube stage=C1 id=A" + std::to_string(i) + " volume_cm3=" + std::to_string(vol) +
              " mass_g=" + std::to_string(rhos[i] * vol) + "\n";
    const double mass = std::uniform_real_distribution<double>(100.0, 2000.0)(gen);
    for (std::size_t i = 0; i < n2; ++i)
      text += "cube stage=C2 id=E" + std::to_string(i) + " volume_cm3=" +
              std::to_string(mass / std::uniform_real_distribution<double>(0.3, 2.0)(gen) + static_cast<double>(i)) +
              " mass_g=" + std::to_string(mass) + "\n";
    Catalog cat;
    try {
      cat = Catalog::parse(text);
    } catch (const Error&) {
      continue;  // e.g. colliding random masses
    }
    auto custom = std::make_shared<GameSetup>();
    custom->catalog = cat;
    custom->max_release_time = 20.0;
    const auto trials = static_cast<int>(cat.scored_trial_count());
    EXPECT_EQ(play_session(custom, AgentPolicy::oracle(), "o", gen()).score(), 2 * trials);
    EXPECT_EQ(play_session(custom, AgentPolicy::contrarian(), "c", gen()).score(), -trials);
  }
}

TEST(Protocol, SessionLifecycle) {
  ProtocolHandler h(setup());
  auto reply = Json::parse(h.handle_line(R"({"cmd":"view"})"));
  EXPECT_FALSE(reply["ok"].get<bool>());

  reply = h.handle(Json{{"cmd", "new_session"}, {"participant_id", "p1"}, {"seed", 42}});
  ASSERT_TRUE(reply["ok"].get<bool>()) << reply.dump();
  EXPECT_EQ(reply["stage"], "PreTest");
  EXPECT_EQ(reply["score"], 0);
  EXPECT_EQ(reply["events"].size(), 1u);
  EXPECT_EQ(reply["view"]["test"]["items"].size(), 13u);
  EXPECT_EQ(reply["view"]["unmet"].size(), 13u);

  reply = h.handle(Json{{"cmd", "advance_stage"}});
  EXPECT_FALSE(reply["ok"].get<bool>());
  EXPECT_EQ(reply["error"], "item Q01 unanswered");

  for (const auto& id : h.session()->current_test().ordering) {
    reply = h.handle(Json{{"cmd", "answer_item"}, {"item_id", id}, {"choice", 1}, {"confidence", 3}, {"t_ms", 5000}});
    ASSERT_TRUE(reply["ok"].get<bool>()) << reply.dump();
  }
  reply = h.handle(Json{{"cmd", "advance_stage"}, {"t_ms", 6000}});
  ASSERT_TRUE(reply["ok"].get<bool>());
  EXPECT_EQ(reply["stage"], "Training");
  EXPECT_EQ(reply["events"].size(), 2u);  // exit + enter
  EXPECT_TRUE(reply["view"]["balance"].get<bool>());
  EXPECT_FALSE(reply["view"]["predictions"].get<bool>());

  reply = h.handle(Json{{"cmd", "weigh"}, {"left", "T1"}, {"right", "T2"}});
  EXPECT_EQ(reply["reading"], "RightHeavier");
  EXPECT_EQ(reply["events"][0]["t_ms"], 6000);  // omitted time reuses the last one

  h.handle(Json{{"cmd", "advance_stage"}});
  reply = h.handle(Json{{"cmd", "view"}});
  EXPECT_EQ(reply["view"]["stage"], "C1");
  EXPECT_TRUE(reply["view"]["predictions"].get<bool>());
  ASSERT_EQ(reply["view"]["cubes"].size(), 4u);
  EXPECT_EQ(reply["view"]["cubes"][3]["dot_level"], 12);
  EXPECT_EQ(reply["view"]["cubes"][0]["edge_cm"], 10.0);

  reply = h.handle(Json{{"cmd", "submit_prediction"}, {"cube_id", "A"}, {"tank_id", "water"}});
  EXPECT_FALSE(reply["ok"].get<bool>());
  reply = h.handle(Json{{"cmd", "submit_prediction"}, {"cube_id", "A"}, {"tank_id", "water"}, {"prediction", "float"}});
  ASSERT_TRUE(reply["ok"].get<bool>()) << reply.dump();
  EXPECT_EQ(reply["observed"], "Floats");
  EXPECT_EQ(reply["score_delta"], 2);
  EXPECT_EQ(reply["score"], 2);
  EXPECT_EQ(reply["events"].size(), 2u);
  EXPECT_EQ(reply["events"][0]["kind"], "PredictionSubmitted");
}

TEST(Protocol, MalformedInput) {
  ProtocolHandler h(setup());
  for (const char* line : {"{", "[]", R"({"cmd":3})", R"({"cmd":"fly"})", R"({"cmd":"new_session"})",
                           R"({"cmd":"new_session","participant_id":"p","seed":"x"})"}) {
    const auto reply = Json::parse(h.handle_line(line));
    EXPECT_FALSE(reply["ok"].get<bool>()) << line;
    EXPECT_TRUE(reply["error"].is_string());
  }
  const auto bad_prediction = Json::parse(h.handle_line(R"({"cmd":"new_session","participant_id":"p","seed":1})"));
  EXPECT_TRUE(bad_prediction["ok"].get<bool>());
}
