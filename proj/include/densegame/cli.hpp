#pragma once

// Command implementations behind the `densegame` executable. Each returns a
// process exit code: 0 success, 1 usage error, 2 data error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "densegame/agents.hpp"
#include "densegame/analysis.hpp"
#include "densegame/io.hpp"
#include "densegame/protocol.hpp"

namespace densegame::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Directory holding catalog.cfg, item_bank.cfg and strings.cfg defaults.
inline constexpr const char* kConfigDirEnv = "DENSEGAME_CONFIG_DIR";

/// Explicit path, else the file in $DENSEGAME_CONFIG_DIR, else none (built-in).
inline std::optional<std::string> resolve_config(const std::string& explicit_path, const char* file_name) {
  if (!explicit_path.empty()) return explicit_path;
  if (const char* dir = std::getenv(kConfigDirEnv)) {
    const auto p = std::filesystem::path(dir) / file_name;
    if (std::filesystem::exists(p)) return p.string();
  }
  return std::nullopt;
}

struct ContentPaths {
  std::string catalog;
  std::string bank;
  std::string strings;
};

inline ItemBank load_bank(const std::string& path) {
  const auto p = resolve_config(path, "item_bank.cfg");
  return p ? ItemBank::load(*p) : ItemBank::defaults();
}

inline std::shared_ptr<const GameSetup> load_setup(const ContentPaths& paths) {
  auto setup = std::make_shared<GameSetup>();
  if (auto p = resolve_config(paths.catalog, "catalog.cfg")) setup->catalog = Catalog::load(*p);
  setup->bank = load_bank(paths.bank);
  if (auto p = resolve_config(paths.strings, "strings.cfg")) setup->strings = StringTable::load(*p);
  setup->validate();
  return setup;
}

struct SimulateOptions {
  ContentPaths content;
  std::string policy = "oracle";
  std::string script;
  std::uint64_t seed = 0;
  std::string out;
  std::string participant;
};

inline int simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  AgentPolicy policy;
  try {
    policy.kind = parse_policy_kind(o.policy);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (policy.kind == PolicyKind::Scripted && o.script.empty()) {
    err << "error: --policy scripted needs --script <file>\n";
    return kExitUsage;
  }
  try {
    const auto setup = load_setup(o.content);
    if (policy.kind == PolicyKind::Random) policy.seed = o.seed;
    if (policy.kind == PolicyKind::Scripted) policy = AgentPolicy::scripted_file(o.script);
    const std::string participant =
        o.participant.empty() ? std::string(to_string(policy.kind)) + "-" + std::to_string(o.seed) : o.participant;
    const GameSession s = play_session(setup, policy, participant, o.seed);
    write_file_atomic(o.out, log_to_string(s.log()));
    out << "session " << s.session_id() << " finished: score " << s.score() << " (" << s.log().size()
        << " events written to " << o.out << ")\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

struct AnalyzeOptions {
  std::string in;
  std::string format = "table";
  std::string bank;
  char decimal = '.';
  std::string export_responses;
  std::string export_test = "pre";
};

inline int analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
  if (o.format != "table" && o.format != "machine") {
    err << "error: --format must be table or machine\n";
    return kExitUsage;
  }
  try {
    const auto export_kind = parse_test_kind(o.export_test);
    const ItemBank bank = load_bank(o.bank);
    std::vector<std::string> corrupt;
    const auto logs = load_log_directory(o.in, corrupt);
    for (const auto& c : corrupt) err << "warning: skipped corrupt log " << c << '\n';
    if (logs.empty()) throw Error("no logs found in " + o.in);
    Analysis a = analyze_logs(logs, bank);
    for (const auto& w : a.warnings) err << "warning: " << w << '\n';
    a.warnings.insert(a.warnings.begin(), corrupt.begin(), corrupt.end());

    if (!o.export_responses.empty()) {
      std::string text;
      for (const auto& l : logs) {
        const auto responses = responses_from_log(l.log, export_kind);
        if (responses.empty()) continue;
        std::string who;
        try {
          who = participant_from_log(l.log);
        } catch (const Error&) {
          who = l.source;
        }
        for (const auto& r : responses) text += format_response({who, r}) + '\n';
      }
      write_file_atomic(o.export_responses, text);
    }

    if (o.format == "machine")
      out << to_json(a).dump(2) << '\n';
    else
      out << render_analysis_text(a, o.decimal);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

struct GradeOptions {
  std::string responses;
  std::string bank;
  char decimal = '.';
};

struct GradedParticipant {
  std::string participant_id;
  AssessmentResult result;
  std::vector<Response> responses;
};

/// Grades every complete participant; incomplete ones are reported to `err`.
inline std::vector<GradedParticipant> grade_participants(const std::vector<ParticipantResponse>& rows,
                                                         const ItemBank& bank, std::ostream& err) {
  std::vector<GradedParticipant> out;
  for (auto& [who, responses] : group_by_participant(rows)) {
    try {
      out.push_back({who, grade(responses, bank), responses});
    } catch (const Error& e) {
      err << "warning: excluded participant " << who << ": " << e.what() << '\n';
    }
  }
  return out;
}

inline int grade_cmd(const GradeOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const ItemBank bank = load_bank(o.bank);
    const auto graded = grade_participants(load_responses(o.responses), bank, err);
    if (graded.empty()) throw Error("no complete participants to grade");
    out << "participant\tsuccess\tmean confidence\n";
    std::vector<AssessmentResult> results;
    for (const auto& g : graded) {
      out << g.participant_id << '\t' << format_percent(g.result.success_rate * 100.0, o.decimal) << '\t'
          << format_minutes(g.result.mean_confidence, o.decimal) << '\n';
      results.push_back(g.result);
    }
    const auto stats = cohort_stats(results);
    out << "cohort (" << results.size() << " participants)\tmean " << format_percent(stats.mean_success_pct, o.decimal)
        << "\tabove 50%: " << format_percent(stats.share_above_50_pct, o.decimal) << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

struct ClusterOptions {
  std::string responses;
  std::string bank;
  double threshold = 0.75;
};

inline int cluster_cmd(const ClusterOptions& o, std::ostream& out, std::ostream& err) {
  if (!(o.threshold > 0.0 && o.threshold < 1.0)) {
    err << "error: --threshold must lie in (0, 1)\n";
    return kExitUsage;
  }
  try {
    const ItemBank bank = load_bank(o.bank);
    std::vector<AnswerProfile> profiles;
    for (const auto& g : grade_participants(load_responses(o.responses), bank, err))
      profiles.push_back(make_profile(g.participant_id, g.responses, bank));
    const auto c = cluster_profiles(profiles, o.threshold);
    for (std::size_t i = 0; i < c.clusters.size(); ++i) {
      out << "cluster " << i + 1 << " (" << c.clusters[i].size() << "):";
      for (const auto& id : c.clusters[i]) out << ' ' << id;
      out << '\n';
    }
    out << "outliers (" << c.outliers.size() << "):";
    for (const auto& id : c.outliers) out << ' ' << id;
    out << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

/// Serves the command protocol over a stream pair, one reply per line.
inline int play(const ContentPaths& content, std::istream& in, std::ostream& out, std::ostream& err) {
  try {
    ProtocolHandler handler(load_setup(content));
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      out << handler.handle_line(line) << '\n' << std::flush;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace densegame::cli
