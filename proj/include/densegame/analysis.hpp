#pragma once

// Cohort analytics over a set of session logs: the timing table plus graded
// pre/post tests and their deltas.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "densegame/assessment.hpp"
#include "densegame/game.hpp"
#include "densegame/telemetry.hpp"

namespace densegame {

struct SessionSummary {
  std::string source;  // file name or label
  std::string participant_id;
  std::optional<AssessmentResult> pre;
  std::optional<AssessmentResult> post;
};

struct CohortSummary {
  std::size_t sessions = 0;
  std::optional<CohortStats> pre;
  std::optional<CohortStats> post;
  std::size_t paired = 0;  // sessions with both tests complete
  // Per-participant deltas, then averaged.
  std::optional<PrePostDelta> mean_delta;
};

struct Analysis {
  TimingReport timing;
  std::vector<SessionSummary> sessions;
  CohortSummary cohort;
  std::vector<std::string> warnings;  // corrupt or partially usable inputs
};

struct LabeledLog {
  std::string source;
  EventLog log;
};

inline Analysis analyze_logs(std::span<const LabeledLog> logs, const ItemBank& bank) {
  if (logs.empty()) throw Error("no logs to analyse");
  Analysis out;
  std::vector<EventLog> usable;
  for (const auto& [source, log] : logs) {
    try {
      stage_durations_ms(log);
    } catch (const Error& e) {
      out.warnings.push_back(source + ": " + e.what());
      continue;
    }
    usable.push_back(log);
    SessionSummary summary{source, {}, {}, {}};
    try {
      summary.participant_id = participant_from_log(log);
    } catch (const std::exception& e) {
      summary.participant_id = source;
    }
    for (TestKind kind : {TestKind::Pre, TestKind::Post}) {
      const auto responses = responses_from_log(log, kind);
      if (responses.empty()) continue;
      try {
        (kind == TestKind::Pre ? summary.pre : summary.post) = grade(responses, bank);
      } catch (const Error& e) {
        out.warnings.push_back(source + ": " + std::string(to_string(kind)) + "-test not graded: " + e.what());
      }
    }
    out.sessions.push_back(std::move(summary));
  }
  if (usable.empty()) throw Error("no valid logs found");
  out.timing = timing_report(usable);

  std::vector<AssessmentResult> pre, post;
  PrePostDelta sum;
  for (const auto& s : out.sessions) {
    if (s.pre) pre.push_back(*s.pre);
    if (s.post) post.push_back(*s.post);
    if (s.pre && s.post) {
      const auto d = pre_post_delta(*s.pre, *s.post);
      sum.accuracy_delta_pct += d.accuracy_delta_pct;
      sum.confidence_delta_pct += d.confidence_delta_pct;
      ++out.cohort.paired;
    }
  }
  out.cohort.sessions = out.sessions.size();
  if (!pre.empty()) out.cohort.pre = cohort_stats(pre);
  if (!post.empty()) out.cohort.post = cohort_stats(post);
  if (out.cohort.paired) {
    const auto n = static_cast<double>(out.cohort.paired);
    out.cohort.mean_delta = PrePostDelta{sum.accuracy_delta_pct / n, sum.confidence_delta_pct / n};
  }
  return out;
}

/// Loads every *.jsonl / *.log file in `dir` (sorted by name). Files that do
/// not parse are reported through `corrupt` and skipped.
inline std::vector<LabeledLog> load_log_directory(const std::filesystem::path& dir, std::vector<std::string>& corrupt) {
  if (!std::filesystem::is_directory(dir)) throw Error("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension();
    if (ext == ".jsonl" || ext == ".log") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<LabeledLog> logs;
  for (const auto& f : files) {
    try {
      auto log = load_log(f.string());
      if (log.empty()) throw Error("empty log");
      logs.push_back({f.filename().string(), std::move(log)});
    } catch (const std::exception& e) {
      corrupt.push_back(f.filename().string() + ": " + e.what());
    }
  }
  return logs;
}

inline std::string format_percent(double pct, char decimal_separator, bool signed_value = false) {
  std::string s = format_minutes(pct, decimal_separator);
  if (signed_value && pct >= 0.0) s = "+" + s;
  return s + " %";
}

inline std::string render_analysis_text(const Analysis& a, char decimal_separator = ',') {
  std::string out = render_table(a.timing, decimal_separator);
  out += "\nSessions\t" + std::to_string(a.cohort.sessions) + "\n";
  if (a.cohort.pre)
    out += "Pre-test success\tmean " + format_percent(a.cohort.pre->mean_success_pct, decimal_separator) +
           "\tabove 50%: " + format_percent(a.cohort.pre->share_above_50_pct, decimal_separator) + "\n";
  if (a.cohort.post)
    out += "Post-test success\tmean " + format_percent(a.cohort.post->mean_success_pct, decimal_separator) +
           "\tabove 50%: " + format_percent(a.cohort.post->share_above_50_pct, decimal_separator) + "\n";
  if (a.cohort.mean_delta) {
    out += "Accuracy delta\t" + format_percent(a.cohort.mean_delta->accuracy_delta_pct, decimal_separator, true) +
           "\t(" + std::to_string(a.cohort.paired) + " paired sessions)\n";
    out += "Confidence delta\t" + format_percent(a.cohort.mean_delta->confidence_delta_pct, decimal_separator, true) +
           "\n";
  }
  return out;
}

inline Json to_json(const Analysis& a) {
  auto stats = [](const std::optional<CohortStats>& s) {
    return s ? Json{{"mean_success_pct", s->mean_success_pct}, {"share_above_50_pct", s->share_above_50_pct}}
             : Json(nullptr);
  };
  Json sessions = Json::array();
  for (const auto& s : a.sessions) {
    sessions.push_back(Json{{"source", s.source},
                            {"participant_id", s.participant_id},
                            {"pre_success_rate", s.pre ? Json(s.pre->success_rate) : Json(nullptr)},
                            {"post_success_rate", s.post ? Json(s.post->success_rate) : Json(nullptr)}});
  }
  Json delta = a.cohort.mean_delta ? Json{{"accuracy_delta_pct", a.cohort.mean_delta->accuracy_delta_pct},
                                          {"confidence_delta_pct", a.cohort.mean_delta->confidence_delta_pct}}
                                   : Json(nullptr);
  return Json{{"timing", to_json(a.timing)},
              {"cohort",
               {{"sessions", a.cohort.sessions},
                {"paired", a.cohort.paired},
                {"pre", stats(a.cohort.pre)},
                {"post", stats(a.cohort.post)},
                {"mean_delta", delta}}},
              {"sessions", sessions},
              {"warnings", a.warnings}};
}

}  // namespace densegame
