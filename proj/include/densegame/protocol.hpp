#pragma once

// Newline-delimited JSON command/event protocol spoken by front ends.
//
// Commands (one object per line, discriminated by "cmd"):
//   {"cmd":"new_session","participant_id":"p1","seed":42}
//   {"cmd":"advance_stage"}
//   {"cmd":"submit_prediction","cube_id":"A","tank_id":"water","prediction":"float"}
//   {"cmd":"weigh","left":"A","right":"B"}
//   {"cmd":"answer_item","item_id":"Q01","choice":0,"confidence":3}
//   {"cmd":"view"}
// Any command may carry "t_ms" (session clock); it defaults to the time of
// the last logged event.
//
// Every reply carries "ok". Successful replies echo "cmd", the resulting
// "stage" and "score", command-specific results ("observed", "score_delta",
// "trajectory", ...) and the log records the command appended in "events".

#include <memory>
#include <optional>
#include <string>

#include "densegame/game.hpp"

namespace densegame {

class ProtocolHandler {
 public:
  explicit ProtocolHandler(std::shared_ptr<const GameSetup> setup = default_setup()) : setup_(std::move(setup)) {}

  const std::optional<GameSession>& session() const { return session_; }

  std::string handle_line(const std::string& line) {
    Json cmd;
    try {
      cmd = Json::parse(line);
    } catch (const std::exception& e) {
      return failure(Json(nullptr), std::string("malformed command: ") + e.what()).dump();
    }
    return handle(cmd).dump();
  }

  Json handle(const Json& cmd) {
    const Json name = cmd.is_object() && cmd.contains("cmd") ? cmd["cmd"] : Json(nullptr);
    try {
      if (!name.is_string()) throw Error("command needs a string 'cmd' field");
      return dispatch(name.get<std::string>(), cmd);
    } catch (const Error& e) {
      return failure(name, e.what());
    } catch (const Json::exception& e) {
      return failure(name, std::string("bad command field: ") + e.what());
    }
  }

 private:
  static Json failure(const Json& name, const std::string& message) {
    return Json{{"ok", false}, {"cmd", name}, {"error", message}};
  }

  GameSession& active() {
    if (!session_) throw Error("no session: send new_session first");
    return *session_;
  }

  std::int64_t time_of(const Json& cmd) {
    if (cmd.contains("t_ms")) return cmd.at("t_ms").get<std::int64_t>();
    return session_ ? session_->log().last_time() : 0;
  }

  Json view() const {
    const GameSession& s = *session_;
    Json v{{"session_id", s.session_id()},
           {"participant_id", s.participant_id()},
           {"stage", to_string(s.stage())},
           {"finalized", s.finalized()},
           {"score", s.score()},
           {"instructions", s.instructions()},
           {"unmet", s.unmet_conditions()}};
    if (is_test_stage(s.stage())) {
      const auto& strings = setup_->strings;
      Json items = Json::array();
      for (const auto& id : s.current_test().ordering) {
        const Question& q = *setup_->bank.find(id);
        Json options = Json::array();
        for (const auto& o : q.options) options.push_back(strings.at(o));
        items.push_back(Json{{"item_id", id}, {"prompt", strings.at(q.prompt_key)}, {"options", options}});
      }
      v["test"] = Json{{"kind", to_string(s.current_test().kind)}, {"items", items}};
    } else {
      const auto setup = s.current_setup();
      Json cubes = Json::array();
      for (const auto& c : setup.catalog.cubes)
        cubes.push_back(Json{{"id", c.id}, {"volume_cm3", c.volume}, {"dot_level", c.dot_level},
                             {"edge_cm", edge_length(c)}});
      Json tanks = Json::array();
      for (const auto& t : setup.tanks)
        tanks.push_back(Json{{"id", t.id}, {"liquid", t.liquid.name}, {"depth_cm", setup_->dynamics.tank_depth}});
      v["cubes"] = cubes;
      v["tanks"] = tanks;
      v["balance"] = s.stage() == StageId::Training || s.stage() == StageId::C1;
      v["predictions"] = is_scored_stage(s.stage());
    }
    return v;
  }

  Json dispatch(const std::string& name, const Json& cmd) {
    Json reply{{"ok", true}, {"cmd", name}};
    std::size_t log_before = session_ ? session_->log().size() : 0;

    if (name == "new_session") {
      session_ = GameSession::create(setup_, cmd.at("participant_id").get<std::string>(),
                                     cmd.at("seed").get<std::uint64_t>());
      log_before = 0;
      reply["view"] = view();
    } else if (name == "advance_stage") {
      active().advance_stage(time_of(cmd));
      reply["view"] = view();
    } else if (name == "submit_prediction") {
      std::optional<Prediction> pred;
      if (cmd.contains("prediction") && !cmd["prediction"].is_null())
        pred = parse_prediction(cmd["prediction"].get<std::string>());
      const auto t = time_of(cmd);
      const auto res = active().submit_prediction(cmd.at("cube_id").get<std::string>(),
                                                  cmd.at("tank_id").get<std::string>(), pred, t);
      reply["observed"] = to_string(res.observed);
      reply["score_delta"] = res.score_delta;
      reply["new_score"] = res.new_score;
      reply["surface_breach"] = res.surface_breach;
      reply["trajectory"] = trajectory_to_json(res.trajectory);
    } else if (name == "weigh") {
      const auto reading =
          active().weigh(cmd.at("left").get<std::string>(), cmd.at("right").get<std::string>(), time_of(cmd));
      reply["reading"] = to_string(reading);
    } else if (name == "answer_item") {
      active().answer_item(cmd.at("item_id").get<std::string>(), cmd.at("choice").get<int>(),
                           cmd.at("confidence").get<int>(), time_of(cmd));
    } else if (name == "view") {
      active();
      reply["view"] = view();
    } else {
      throw Error("unknown command '" + name + "'");
    }

    const GameSession& s = active();
    reply["stage"] = to_string(s.stage());
    reply["score"] = s.score();
    Json events = Json::array();
    for (std::size_t i = log_before; i < s.log().size(); ++i) events.push_back(to_json(s.log().events()[i]));
    reply["events"] = std::move(events);
    return reply;
  }

  std::shared_ptr<const GameSetup> setup_;
  std::optional<GameSession> session_;
};

}  // namespace densegame
