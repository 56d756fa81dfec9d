#pragma once

// Session event log and the timing analytics computed from it.
//
// Log files hold one JSON object per line:
//   {"seq":1,"t_ms":0,"stage":"PreTest","kind":"StageEnter","payload":{...}}
// `t_ms` is milliseconds since the session started.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "densegame/error.hpp"
#include "densegame/stage.hpp"

namespace densegame {

using Json = nlohmann::ordered_json;

enum class EventKind { StageEnter, StageExit, PredictionSubmitted, OutcomeObserved, BalanceUsed, ItemAnswered };

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::StageEnter: return "StageEnter";
    case EventKind::StageExit: return "StageExit";
    case EventKind::PredictionSubmitted: return "PredictionSubmitted";
    case EventKind::OutcomeObserved: return "OutcomeObserved";
    case EventKind::BalanceUsed: return "BalanceUsed";
    case EventKind::ItemAnswered: return "ItemAnswered";
  }
  throw Error("invalid EventKind");
}

inline EventKind parse_event_kind(std::string_view s) {
  for (EventKind k : {EventKind::StageEnter, EventKind::StageExit, EventKind::PredictionSubmitted,
                      EventKind::OutcomeObserved, EventKind::BalanceUsed, EventKind::ItemAnswered})
    if (to_string(k) == s) return k;
  throw Error("unknown event kind '" + std::string(s) + "'");
}

struct Event {
  std::uint64_t seq = 0;
  std::int64_t t_ms = 0;
  StageId stage = StageId::PreTest;
  EventKind kind = EventKind::StageEnter;
  Json payload = Json::object();

  friend bool operator==(const Event&, const Event&) = default;
};

inline Json to_json(const Event& e) {
  Json j;
  j["seq"] = e.seq;
  j["t_ms"] = e.t_ms;
  j["stage"] = to_string(e.stage);
  j["kind"] = to_string(e.kind);
  j["payload"] = e.payload;
  return j;
}

inline Event event_from_json(const Json& j) {
  if (!j.is_object()) throw Error("event record must be an object");
  for (const char* key : {"seq", "t_ms", "stage", "kind", "payload"})
    if (!j.contains(key)) throw Error(std::string("event record is missing '") + key + "'");
  if (j.size() != 5) throw Error("event record has unexpected fields");
  if (!j["seq"].is_number_unsigned()) throw Error("seq must be a positive integer");
  if (!j["t_ms"].is_number_integer()) throw Error("t_ms must be an integer");
  if (!j["stage"].is_string() || !j["kind"].is_string()) throw Error("stage and kind must be strings");
  if (!j["payload"].is_object()) throw Error("payload must be an object");
  return Event{j["seq"].get<std::uint64_t>(), j["t_ms"].get<std::int64_t>(),
               parse_stage(j["stage"].get<std::string>()), parse_event_kind(j["kind"].get<std::string>()),
               j["payload"]};
}

inline std::string to_line(const Event& e) { return to_json(e).dump(); }

/// Append-only, totally ordered event sequence. Sequence numbers start at 1
/// and grow by one; timestamps never decrease.
class EventLog {
 public:
  void append(Event e) {
    const std::uint64_t expected = events_.empty() ? 1 : events_.back().seq + 1;
    if (e.seq != expected)
      throw Error("out-of-order event: expected seq " + std::to_string(expected) + ", got " + std::to_string(e.seq));
    if (e.t_ms < 0) throw Error("negative timestamp");
    if (!events_.empty() && e.t_ms < events_.back().t_ms) throw Error("event timestamps must not decrease");
    events_.push_back(std::move(e));
  }

  std::uint64_t next_seq() const { return events_.empty() ? 1 : events_.back().seq + 1; }
  std::int64_t last_time() const { return events_.empty() ? 0 : events_.back().t_ms; }

  const std::vector<Event>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  friend bool operator==(const EventLog&, const EventLog&) = default;

 private:
  std::vector<Event> events_;
};

inline void write_log(std::ostream& out, const EventLog& log) {
  for (const auto& e : log.events()) out << to_line(e) << '\n';
}

inline std::string log_to_string(const EventLog& log) {
  std::ostringstream out;
  write_log(out, log);
  return out.str();
}

inline EventLog read_log(std::istream& in) {
  EventLog log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      log.append(event_from_json(Json::parse(line)));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return log;
}

inline EventLog read_log(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_log(in);
}

inline EventLog load_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open log " + path);
  return read_log(in);
}

/// Milliseconds spent in each visited stage.
inline std::map<StageId, std::int64_t> stage_durations_ms(const EventLog& log) {
  std::map<StageId, std::int64_t> entered, out;
  std::optional<StageId> open;
  for (const auto& e : log.events()) {
    if (e.kind == EventKind::StageEnter) {
      if (open) throw Error(std::string(to_string(*open)) + " unbalanced");
      if (entered.count(e.stage) || out.count(e.stage))
        throw Error(std::string(to_string(e.stage)) + " entered twice");
      entered[e.stage] = e.t_ms;
      open = e.stage;
    } else if (e.kind == EventKind::StageExit) {
      if (!open || *open != e.stage) throw Error(std::string(to_string(e.stage)) + " unbalanced");
      out[e.stage] = e.t_ms - entered.at(e.stage);
      open.reset();
    }
  }
  if (open) throw Error(std::string(to_string(*open)) + " unbalanced");
  return out;
}

/// Stage durations in decimal minutes.
inline std::map<StageId, double> stage_durations(const EventLog& log) {
  std::map<StageId, double> out;
  for (const auto& [stage, ms] : stage_durations_ms(log)) out[stage] = static_cast<double>(ms) / 60000.0;
  return out;
}

/// PostTest exit minus PreTest enter, when the session ran to the end.
inline std::optional<std::int64_t> total_game_time_ms(const EventLog& log) {
  std::optional<std::int64_t> start, end;
  for (const auto& e : log.events()) {
    if (e.kind == EventKind::StageEnter && e.stage == StageId::PreTest) start = e.t_ms;
    if (e.kind == EventKind::StageExit && e.stage == StageId::PostTest) end = e.t_ms;
  }
  if (!start || !end) return std::nullopt;
  return *end - *start;
}

struct TimingRow {
  std::string section;
  std::optional<StageId> stage;  // empty for the total row
  std::size_t sessions = 0;
  double min_minutes = 0.0;
  double max_minutes = 0.0;
  double avg_minutes = 0.0;

  friend bool operator==(const TimingRow&, const TimingRow&) = default;
};

struct TimingReport {
  std::vector<TimingRow> rows;  // stage order, then "Total game time"

  const TimingRow* find(std::string_view section) const {
    for (const auto& r : rows)
      if (r.section == section) return &r;
    return nullptr;
  }

  friend bool operator==(const TimingReport&, const TimingReport&) = default;
};

namespace detail {
inline TimingRow make_row(std::string section, std::optional<StageId> stage, const std::vector<std::int64_t>& ms) {
  TimingRow row{std::move(section), stage, ms.size()};
  const auto [lo, hi] = std::minmax_element(ms.begin(), ms.end());
  std::int64_t sum = 0;
  for (auto v : ms) sum += v;
  row.min_minutes = static_cast<double>(*lo) / 60000.0;
  row.max_minutes = static_cast<double>(*hi) / 60000.0;
  row.avg_minutes = static_cast<double>(sum) / static_cast<double>(ms.size()) / 60000.0;
  return row;
}
}  // namespace detail

/// Per-stage min/max/mean across sessions. Stages nobody visited are omitted.
/// Aggregation runs on integer milliseconds so the result does not depend on
/// the order of `logs`.
inline TimingReport timing_report(std::span<const EventLog> logs) {
  if (logs.empty()) throw Error("timing report needs at least one log");
  std::map<StageId, std::vector<std::int64_t>> per_stage;
  std::vector<std::int64_t> totals;
  for (const auto& log : logs) {
    for (const auto& [stage, ms] : stage_durations_ms(log)) per_stage[stage].push_back(ms);
    if (auto t = total_game_time_ms(log)) totals.push_back(*t);
  }
  TimingReport report;
  for (StageId s : kStageOrder) {
    auto it = per_stage.find(s);
    if (it != per_stage.end()) report.rows.push_back(detail::make_row(std::string(report_label(s)), s, it->second));
  }
  if (!totals.empty()) report.rows.push_back(detail::make_row("Total game time", std::nullopt, totals));
  return report;
}

/// Two-decimal rendering with a chosen decimal separator ("3,62").
inline std::string format_minutes(double minutes, char decimal_separator = ',') {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, minutes, std::chars_format::fixed, 2);
  if (ec != std::errc()) throw Error("cannot format value");
  std::string s(buf, ptr);
  if (s == "-0.00") s = "0.00";
  std::replace(s.begin(), s.end(), '.', decimal_separator);
  return s;
}

/// The three numeric cells of a row, e.g. {"3,62", "33,04", "10,15"}.
inline std::vector<std::string> render_cells(const TimingRow& row, char decimal_separator = ',') {
  return {format_minutes(row.min_minutes, decimal_separator), format_minutes(row.max_minutes, decimal_separator),
          format_minutes(row.avg_minutes, decimal_separator)};
}

/// Tab-separated table in the layout of the published timing tables.
inline std::string render_table(const TimingReport& report, char decimal_separator = ',') {
  std::string out = "Sections\tMin t\tMax t\tAverage t\n";
  for (const auto& row : report.rows) {
    out += row.section;
    for (const auto& cell : render_cells(row, decimal_separator)) out += '\t' + cell;
    out += '\n';
  }
  return out;
}

inline Json to_json(const TimingReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    Json j;
    j["section"] = r.section;
    j["stage"] = r.stage ? Json(to_string(*r.stage)) : Json(nullptr);
    j["sessions"] = r.sessions;
    j["min_minutes"] = r.min_minutes;
    j["max_minutes"] = r.max_minutes;
    j["avg_minutes"] = r.avg_minutes;
    rows.push_back(std::move(j));
  }
  Json out;
  out["unit"] = "minutes";
  out["rows"] = std::move(rows);
  return out;
}

}  // namespace densegame
