#pragma once

// Pre/post questionnaire: item bank, test orderings, grading with confidence,
// pre/post deltas, answer-profile similarity and profile clustering.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "densegame/content.hpp"
#include "densegame/error.hpp"
#include "densegame/records.hpp"
#include "densegame/rng.hpp"

namespace densegame {

struct Question {
  std::string id;
  std::string prompt_key;
  std::vector<std::string> options;
  int correct_index = 0;

  friend bool operator==(const Question&, const Question&) = default;
};

class ItemBank {
 public:
  ItemBank() = default;
  explicit ItemBank(std::vector<Question> questions) : questions_(std::move(questions)) { validate(); }

  static ItemBank parse(std::istream& in) {
    std::vector<Question> qs;
    for (const Record& r : parse_records(in)) {
      if (r.type() != "question") throw ParseError("unknown record type '" + r.type() + "'", r.line());
      r.expect_only({"id", "prompt_key", "options", "correct_index"});
      Question q{r.get("id"), r.get("prompt_key"), split_list(r.get("options")),
                 static_cast<int>(r.get_integer("correct_index"))};
      for (const auto& existing : qs)
        if (existing.id == q.id) throw ParseError("duplicate question id '" + q.id + "'", r.line());
      if (q.options.size() < 2) throw ParseError("question " + q.id + " needs at least two options", r.line());
      if (q.correct_index < 0 || q.correct_index >= static_cast<int>(q.options.size()))
        throw ParseError("question " + q.id + " has correct_index out of range", r.line());
      qs.push_back(std::move(q));
    }
    return ItemBank(std::move(qs));
  }

  static ItemBank parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse(in);
  }

  static ItemBank load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open item bank " + path);
    return parse(in);
  }

  static ItemBank defaults() { return parse(kDefaultItemBankText); }

  const std::vector<Question>& questions() const { return questions_; }
  std::size_t size() const { return questions_.size(); }
  bool empty() const { return questions_.empty(); }

  const Question* find(std::string_view id) const {
    for (const auto& q : questions_)
      if (q.id == id) return &q;
    return nullptr;
  }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& q : questions_) out.push_back(q.id);
    return out;
  }

  /// Every prompt and option key resolves in `strings`.
  void check_strings(const StringTable& strings) const {
    for (const auto& q : questions_) {
      strings.at(q.prompt_key);
      for (const auto& o : q.options) strings.at(o);
    }
  }

  friend bool operator==(const ItemBank&, const ItemBank&) = default;

 private:
  void validate() const {
    std::set<std::string> seen;
    for (const auto& q : questions_) {
      if (!seen.insert(q.id).second) throw Error("duplicate question id '" + q.id + "'");
      if (q.options.size() < 2) throw Error("question " + q.id + " needs at least two options");
      if (q.correct_index < 0 || q.correct_index >= static_cast<int>(q.options.size()))
        throw Error("question " + q.id + " has correct_index out of range");
    }
  }

  std::vector<Question> questions_;
};

enum class TestKind { Pre, Post };

inline std::string_view to_string(TestKind k) { return k == TestKind::Pre ? "pre" : "post"; }

inline TestKind parse_test_kind(std::string_view s) {
  if (s == "pre") return TestKind::Pre;
  if (s == "post") return TestKind::Post;
  throw Error("unknown test kind '" + std::string(s) + "'");
}

struct TestInstance {
  TestKind kind = TestKind::Pre;
  std::vector<std::string> ordering;
  std::uint64_t seed = 0;

  friend bool operator==(const TestInstance&, const TestInstance&) = default;
};

/// Pre keeps the bank order; Post is a seeded shuffle, redrawn until it
/// differs from the bank order.
inline TestInstance build_test(const ItemBank& bank, TestKind kind, std::uint64_t seed) {
  if (bank.empty()) throw Error("item bank is empty");
  TestInstance t{kind, bank.ids(), seed};
  if (kind == TestKind::Pre) return t;
  if (bank.size() < 2) throw Error("a reordered test needs at least two questions");
  const auto canonical = t.ordering;
  Rng rng(seed);
  do {
    rng.shuffle(t.ordering);
  } while (t.ordering == canonical);
  return t;
}

struct Response {
  std::string question_id;
  int chosen_index = 0;
  int confidence = 1;  // 1..4

  friend bool operator==(const Response&, const Response&) = default;
};

struct AssessmentResult {
  double success_rate = 0.0;
  double mean_confidence = 0.0;
  std::vector<bool> per_question_correct;  // bank order

  friend bool operator==(const AssessmentResult&, const AssessmentResult&) = default;
};

/// Checks one response against its question; throws on invalid values.
inline void validate_response(const Response& r, const ItemBank& bank) {
  const Question* q = bank.find(r.question_id);
  if (!q) throw Error("unknown question id " + r.question_id);
  if (r.chosen_index < 0 || r.chosen_index >= static_cast<int>(q->options.size()))
    throw Error("question " + r.question_id + ": choice " + std::to_string(r.chosen_index) + " out of range");
  if (r.confidence < 1 || r.confidence > 4)
    throw Error("question " + r.question_id + ": confidence must be 1..4");
}

namespace detail {
inline std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) out += (out.empty() ? "" : ", ") + id;
  return out;
}
}  // namespace detail

inline AssessmentResult grade(std::span<const Response> responses, const ItemBank& bank) {
  if (bank.empty()) throw Error("item bank is empty");
  std::map<std::string, const Response*> by_id;
  std::vector<std::string> duplicates;
  for (const auto& r : responses) {
    validate_response(r, bank);
    if (!by_id.emplace(r.question_id, &r).second) duplicates.push_back(r.question_id);
  }
  std::vector<std::string> missing;
  for (const auto& q : bank.questions())
    if (!by_id.count(q.id)) missing.push_back(q.id);
  if (!duplicates.empty() || !missing.empty()) {
    std::string msg = "incomplete responses:";
    if (!missing.empty()) msg += " missing [" + detail::join_ids(missing) + "]";
    if (!duplicates.empty()) msg += " duplicated [" + detail::join_ids(duplicates) + "]";
    throw Error(msg);
  }

  AssessmentResult res;
  std::size_t correct = 0;
  long confidence_sum = 0;
  for (const auto& q : bank.questions()) {
    const Response& r = *by_id.at(q.id);
    const bool ok = r.chosen_index == q.correct_index;
    res.per_question_correct.push_back(ok);
    correct += ok;
    confidence_sum += r.confidence;
  }
  const auto n = static_cast<double>(bank.size());
  res.success_rate = static_cast<double>(correct) / n;
  res.mean_confidence = static_cast<double>(confidence_sum) / n;
  return res;
}

struct PrePostDelta {
  double accuracy_delta_pct = 0.0;
  double confidence_delta_pct = 0.0;  // relative to the 3-point span of the 1..4 scale

  friend bool operator==(const PrePostDelta&, const PrePostDelta&) = default;
};

inline PrePostDelta pre_post_delta(const AssessmentResult& pre, const AssessmentResult& post) {
  return {(post.success_rate - pre.success_rate) * 100.0,
          (post.mean_confidence - pre.mean_confidence) / 3.0 * 100.0};
}

struct AnswerProfile {
  std::string participant_id;
  std::vector<std::string> question_ids;  // bank order
  std::vector<int> choices;

  friend bool operator==(const AnswerProfile&, const AnswerProfile&) = default;
};

/// Builds a complete profile; throws when any bank question is unanswered.
inline AnswerProfile make_profile(std::string participant_id, std::span<const Response> responses,
                                  const ItemBank& bank) {
  AnswerProfile p{std::move(participant_id), bank.ids(), {}};
  for (const auto& q : bank.questions()) {
    auto it = std::find_if(responses.begin(), responses.end(),
                           [&](const Response& r) { return r.question_id == q.id; });
    if (it == responses.end()) throw Error("participant " + p.participant_id + " did not answer " + q.id);
    p.choices.push_back(it->chosen_index);
  }
  return p;
}

/// Fraction of questions answered identically.
inline double profile_similarity(const AnswerProfile& a, const AnswerProfile& b) {
  if (a.question_ids != b.question_ids || a.choices.size() != b.choices.size())
    throw Error("profiles " + a.participant_id + " and " + b.participant_id + " come from different banks");
  if (a.choices.empty()) throw Error("empty answer profile");
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.choices.size(); ++i) same += a.choices[i] == b.choices[i];
  return static_cast<double>(same) / static_cast<double>(a.choices.size());
}

struct Clustering {
  std::vector<std::vector<std::string>> clusters;  // members sorted, clusters by first member
  std::vector<std::string> outliers;               // sorted

  friend bool operator==(const Clustering&, const Clustering&) = default;
};

/// Similarities closer than this are treated as ties.
inline constexpr double kLinkageTieTolerance = 1e-12;

/// Agglomerative average-linkage clustering over agreement similarity.
///
/// Repeatedly merges the two clusters with the highest mean pairwise
/// similarity while that mean is >= threshold. Ties go to the pair whose
/// smallest participant ids sort first. Unmerged profiles whose best
/// similarity to anyone is below threshold are outliers; other unmerged
/// profiles are returned as one-member clusters.
inline Clustering cluster_profiles(std::span<const AnswerProfile> profiles, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw Error("threshold must lie in (0, 1)");
  if (profiles.size() < 2) throw Error("clustering needs at least two profiles");

  std::vector<const AnswerProfile*> ps;
  for (const auto& p : profiles) ps.push_back(&p);
  std::sort(ps.begin(), ps.end(), [](auto* a, auto* b) { return a->participant_id < b->participant_id; });
  for (std::size_t i = 1; i < ps.size(); ++i)
    if (ps[i]->participant_id == ps[i - 1]->participant_id)
      throw Error("duplicate participant " + ps[i]->participant_id);

  const std::size_t n = ps.size();
  std::vector<std::vector<double>> sim(n, std::vector<double>(n, 1.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) sim[i][j] = sim[j][i] = profile_similarity(*ps[i], *ps[j]);
  const auto pairwise = sim;

  // Cluster i is keyed by its smallest member index, so index order is id order.
  std::vector<std::vector<std::size_t>> members(n);
  std::vector<bool> active(n, true);
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};

  while (true) {
    double best = -1.0;
    std::size_t bi = n, bj = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        if (sim[i][j] > best + kLinkageTieTolerance) {
          best = sim[i][j];
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == n || best < threshold - kLinkageTieTolerance) break;

    // Lance-Williams update for average linkage.
    const double ni = static_cast<double>(members[bi].size());
    const double nj = static_cast<double>(members[bj].size());
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      sim[bi][k] = sim[k][bi] = (ni * sim[bi][k] + nj * sim[bj][k]) / (ni + nj);
    }
    members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
    std::sort(members[bi].begin(), members[bi].end());
    active[bj] = false;
  }

  Clustering out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!active[i]) continue;
    if (members[i].size() == 1) {
      double nearest = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        if (k != i) nearest = std::max(nearest, pairwise[i][k]);
      if (nearest < threshold - kLinkageTieTolerance) {
        out.outliers.push_back(ps[i]->participant_id);
        continue;
      }
    }
    std::vector<std::string> ids;
    for (auto m : members[i]) ids.push_back(ps[m]->participant_id);
    out.clusters.push_back(std::move(ids));
  }
  return out;
}

struct CohortStats {
  double mean_success_pct = 0.0;
  double share_above_50_pct = 0.0;  // strictly above one half

  friend bool operator==(const CohortStats&, const CohortStats&) = default;
};

inline CohortStats cohort_stats(std::span<const AssessmentResult> results) {
  if (results.empty()) throw Error("cohort is empty");
  double sum = 0.0;
  std::size_t above = 0;
  for (const auto& r : results) {
    sum += r.success_rate;
    above += r.success_rate > 0.5;
  }
  const auto n = static_cast<double>(results.size());
  return {sum / n * 100.0, static_cast<double>(above) / n * 100.0};
}

/// One line of a responses file, attributed to a participant.
struct ParticipantResponse {
  std::string participant_id;
  Response response;
};

/// Responses file:
///   response participant_id=p01 question_id=Q01 chosen_index=0 confidence=3
inline std::vector<ParticipantResponse> parse_responses(std::istream& in) {
  std::vector<ParticipantResponse> out;
  for (const Record& r : parse_records(in)) {
    if (r.type() != "response") throw ParseError("unknown record type '" + r.type() + "'", r.line());
    r.expect_only({"participant_id", "question_id", "chosen_index", "confidence"});
    out.push_back({r.get("participant_id"),
                   {r.get("question_id"), static_cast<int>(r.get_integer("chosen_index")),
                    static_cast<int>(r.get_integer("confidence"))}});
  }
  return out;
}

inline std::vector<ParticipantResponse> load_responses(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open responses file " + path);
  return parse_responses(in);
}

inline std::string format_response(const ParticipantResponse& pr) {
  return "response participant_id=" + quote_field(pr.participant_id) + " question_id=" +
         quote_field(pr.response.question_id) + " chosen_index=" + std::to_string(pr.response.chosen_index) +
         " confidence=" + std::to_string(pr.response.confidence);
}

/// Responses grouped by participant, in first-appearance order.
inline std::vector<std::pair<std::string, std::vector<Response>>> group_by_participant(
    std::span<const ParticipantResponse> rows) {
  std::vector<std::pair<std::string, std::vector<Response>>> out;
  std::map<std::string, std::size_t> index;
  for (const auto& row : rows) {
    auto [it, fresh] = index.emplace(row.participant_id, out.size());
    if (fresh) out.emplace_back(row.participant_id, std::vector<Response>{});
    out[it->second].second.push_back(row.response);
  }
  return out;
}

}  // namespace densegame
