#pragma once

// Fixtures and independent oracles shared by the unit tests and the
// acceptance gate.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "densegame/assessment.hpp"
#include "densegame/telemetry.hpp"

namespace densegame::testing {

/// Answers every bank question; the first `n_correct` (bank order) correctly.
inline std::vector<Response> answers_with_correct(const ItemBank& bank, std::size_t n_correct, int confidence) {
  std::vector<Response> out;
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const Question& q = bank.questions()[i];
    const int wrong = (q.correct_index + 1) % static_cast<int>(q.options.size());
    out.push_back({q.id, i < n_correct ? q.correct_index : wrong, confidence});
  }
  return out;
}

inline AnswerProfile profile(std::string id, std::vector<int> choices) {
  std::vector<std::string> qids;
  for (std::size_t i = 0; i < choices.size(); ++i) qids.push_back("Q" + std::to_string(i + 1));
  return {std::move(id), std::move(qids), std::move(choices)};
}

/// Brute-force average linkage: every step recomputes each cluster-pair mean
/// from the raw pairwise matrix and merges the best pair, ties broken by the
/// smallest member ids. Written independently of the library's incremental
/// update to serve as its reference.
inline Clustering linkage_oracle(std::vector<AnswerProfile> ps, double threshold) {
  std::sort(ps.begin(), ps.end(), [](const auto& a, const auto& b) { return a.participant_id < b.participant_id; });
  const std::size_t n = ps.size();
  auto agree = [&](std::size_t a, std::size_t b) {
    int same = 0;
    for (std::size_t q = 0; q < ps[a].choices.size(); ++q) same += ps[a].choices[q] == ps[b].choices[q];
    return static_cast<double>(same) / static_cast<double>(ps[a].choices.size());
  };
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups.push_back({i});
  auto mean_link = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    double sum = 0.0;
    for (auto x : a)
      for (auto y : b) sum += agree(x, y);
    return sum / static_cast<double>(a.size() * b.size());
  };
  while (groups.size() > 1) {
    // Groups stay ordered by smallest member, so scanning a < b visits pairs
    // in tie-break order; keep the first pair that is not beaten.
    double best = -1.0;
    std::size_t ba = 0, bb = 0;
    for (std::size_t a = 0; a < groups.size(); ++a)
      for (std::size_t b = a + 1; b < groups.size(); ++b) {
        const double m = mean_link(groups[a], groups[b]);
        if (m > best + 1e-12) {
          best = m;
          ba = a;
          bb = b;
        }
      }
    if (best < threshold - 1e-12) break;
    groups[ba].insert(groups[ba].end(), groups[bb].begin(), groups[bb].end());
    std::sort(groups[ba].begin(), groups[ba].end());
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(bb));
  }
  Clustering out;
  for (const auto& g : groups) {
    if (g.size() == 1) {
      double nearest = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        if (k != g[0]) nearest = std::max(nearest, agree(g[0], k));
      if (nearest < threshold - 1e-12) {
        out.outliers.push_back(ps[g[0]].participant_id);
        continue;
      }
    }
    std::vector<std::string> ids;
    for (auto m : g) ids.push_back(ps[m].participant_id);
    out.clusters.push_back(std::move(ids));
  }
  std::sort(out.outliers.begin(), out.outliers.end());
  return out;
}

/// Three groups of near-identical 13-answer profiles (cross-group agreement
/// at most 4/13) plus two outliers "x1", "x2" far from everyone.
inline std::vector<AnswerProfile> three_blob_profiles() {
  const std::vector<int> base_a(13, 0);
  std::vector<int> base_b(13, 1);
  for (int i = 0; i < 4; ++i) base_b[i] = 0;  // agrees with A on 4 questions
  std::vector<int> base_c(13, 2);
  for (int i = 0; i < 4; ++i) base_c[i] = 1;  // agrees with B on 0, A on 0
  std::vector<AnswerProfile> out;
  auto blob = [&](const std::string& prefix, const std::vector<int>& base, int size, int deviant) {
    for (int k = 0; k < size; ++k) {
      auto c = base;
      c[static_cast<std::size_t>(4 + k)] = deviant;  // one private deviation per member
      out.push_back(profile(prefix + std::to_string(k + 1), c));
    }
  };
  blob("a", base_a, 4, 7);
  blob("b", base_b, 4, 8);
  blob("c", base_c, 3, 9);
  out.push_back(profile("x1", std::vector<int>(13, 3)));
  std::vector<int> x2(13, 2);
  for (int i = 0; i < 6; ++i) x2[static_cast<std::size_t>(i)] = 0;  // 6/13 with A, 7/13 with C
  out.push_back(profile("x2", x2));
  return out;
}

/// A complete session log with the given per-stage durations (ms), in stage
/// order PreTest..PostTest.
inline EventLog session_log(const std::vector<std::int64_t>& stage_ms) {
  EventLog log;
  std::int64_t t = 0;
  for (std::size_t i = 0; i < stage_ms.size() && i < kStageOrder.size(); ++i) {
    log.append(Event{log.next_seq(), t, kStageOrder[i], EventKind::StageEnter, Json::object()});
    t += stage_ms[i];
    log.append(Event{log.next_seq(), t, kStageOrder[i], EventKind::StageExit, Json::object()});
  }
  return log;
}

/// Pre-test durations in hundredths of a minute for the nine-session timing
/// fixture: min 3.62, max 33.04, sum 91.35 so the mean is exactly 10.15.
inline constexpr std::int64_t kNineSessionPreTestCentiMinutes[9] = {362, 3304, 781, 781, 781, 781, 781, 781, 783};

inline std::vector<EventLog> nine_session_fixture() {
  std::vector<EventLog> out;
  for (std::size_t i = 0; i < 9; ++i) {
    const std::int64_t pre = kNineSessionPreTestCentiMinutes[i] * 600;  // 1/100 min = 600 ms
    const auto k = static_cast<std::int64_t>(i);
    out.push_back(session_log({pre, 120'000 + 1'000 * k, 300'000, 240'000 + 7'000 * k, 360'000, 90'000, 200'000 + k}));
  }
  return out;
}

}  // namespace densegame::testing
