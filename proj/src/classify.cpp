#include "xnet/classify.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "xnet/five_thirds.hpp"

namespace xnet {

namespace {

void require_canonical(const PatternString& word) {
  if (canonicalize(word).word != word.word)
    throw PatternError("non-canonical input word '" + word.word + "'");
}

// 2x2 path-count product of the letter matrices.
std::array<std::array<long long, 2>, 2> word_path_counts(
    const std::string& word) {
  std::array<std::array<long long, 2>, 2> acc = {{{1, 0}, {0, 1}}};
  for (const char c : word) {
    const HopMatrix m = letter_matrix(c);
    std::array<std::array<long long, 2>, 2> next{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) next[i][j] += acc[i][k] * m[k][j];
    acc = next;
  }
  return acc;
}

bool letters_contiguous(const std::string& word, char which) {
  const auto first = word.find(which);
  if (first == std::string::npos) return true;
  const auto last = word.rfind(which);
  for (std::size_t i = first; i <= last; ++i)
    if (word[i] != which) return false;
  return true;
}

// Canonical images of the eight 3/2-DoF patterns of length L.
std::set<std::string> case_c_words(int L) {
  std::set<std::string> out;
  if (L < 2) return out;
  const std::string zs(L - 1, 'Z'), ss(L - 1, 'S');
  for (const std::string& pattern :
       {"X" + zs, "X" + ss, zs + "X", ss + "X", "Z" + ss, "S" + zs, ss + "Z",
        zs + "S"})
    out.insert(canonicalize({pattern}).word);
  return out;
}

}  // namespace

CaseCCheck is_case_c(const PatternString& word) {
  require_canonical(word);
  if (word.word.size() < 2 || word.word == "P")
    throw PatternError("is_case_c needs a canonical word with L >= 2");

  CaseCCheck check;
  const auto counts = word_path_counts(word.word);
  const long long c12 = counts[0][1], c21 = counts[1][0];
  check.single_cross_path = (c12 == 1 || c21 == 1);
  check.contiguous_zs =
      letters_contiguous(word.word, 'Z') && letters_contiguous(word.word, 'S');
  check.value = check.single_cross_path && check.contiguous_zs;

  std::ostringstream reason;
  if (check.value) {
    reason << "exactly one cross path (s1->d2: " << c12 << ", s2->d1: " << c21
           << ") and contiguous Z/S runs";
  } else {
    if (!check.single_cross_path)
      reason << "cross path counts are 0 or >= 2 in both directions (s1->d2: "
             << c12 << ", s2->d1: " << c21 << ")";
    if (!check.contiguous_zs) {
      if (!check.single_cross_path) reason << "; ";
      reason << "Z or S letters are not consecutive";
    }
  }
  check.reason = reason.str();
  return check;
}

DofValue classify_two_relay(const PatternString& word) {
  require_canonical(word);
  const std::string& w = word.word;
  if (w == "P") return {Rational(2), "T1-D"};
  if (w.size() == 1) {
    if (w == "Z" || w == "S") return {Rational(1), "T1-A"};
    return {Rational(4, 3), "T1-B"};  // "X"
  }
  const auto c_words = case_c_words(static_cast<int>(w.size()));
  if (c_words.count(w)) return {Rational(3, 2), "T1-C"};
  return {Rational(2), "T1-D"};
}

bool is_five_thirds_topology(const LayeredNetwork& net) {
  return match_five_thirds(net).has_value();
}

ClassifyResult classify_general(const LayeredNetwork& net, uint64_t seed) {
  ClassifyResult result;
  result.min_cut = generic_min_cut(net);

  if (result.min_cut == 0) {
    result.value = {Rational(0), "BRACKET"};
    DofBracket bracket;
    bracket.lower = Rational(0);
    bracket.upper = Rational(0);
    bracket.lower_witness = "no source-sink path; empty scheme";
    bracket.upper_vertex = {Rational(0), Rational(0), Rational(0),
                            Rational(0)};
    result.bracket = std::move(bracket);
    result.detail = "disconnected: structural min-cut 0";
    return result;
  }
  if (result.min_cut == 1) {
    result.value = {Rational(1), "MINCUT1"};
    result.detail =
        "structural min-cut 1 (max vertex-disjoint source-sink paths)";
    return result;
  }

  const bool two_wide = std::all_of(net.layers.begin(), net.layers.end(),
                                    [](int n) { return n == 2; });
  if (two_wide) {
    const PatternString raw = pattern_word(net);
    const PatternString canon = canonicalize(raw);
    result.word = canon;
    result.value = classify_two_relay(canon);
    std::ostringstream detail;
    detail << "two-relay word " << raw.word << " (canonical " << canon.word
           << ")";
    if (canon.word.size() >= 2 && canon.word != "P") {
      const auto check = is_case_c(canon);
      detail << "; " << check.reason;
    }
    result.detail = detail.str();
    return result;
  }

  if (net.mode == NetMode::Wireless && is_five_thirds_topology(net)) {
    result.value = {Rational(5, 3), "T2"};
    result.detail = "isomorphic to the five-thirds topology";
    return result;
  }

  // Bracket: LP outer bound, best verified scheme as the lower bound.
  const BoundReport report = outer_bound(net);
  DofBracket bracket;
  bracket.upper = report.lp.optimum;
  bracket.upper_vertex = report.lp.vertex;
  bracket.upper_witness = report.inequalities;

  bracket.lower = Rational(0);
  bracket.lower_witness = "none";
  const std::array<std::array<MessageId, 2>, 2> keep_options = {
      {{MessageId{0, 0}, MessageId{1, 1}}, {MessageId{0, 1}, MessageId{1, 0}}}};
  for (const auto& kept : keep_options) {
    if (net.path_count(kept[0].m, kept[0].n) == 0 ||
        net.path_count(kept[1].m, kept[1].n) == 0)
      continue;
    try {
      const SynthesisOutcome outcome = synthesize_with_retry(
          net, SchemeSpec{SchemeKind::Neutralize, kept}, seed);
      if (outcome.report.passed && outcome.report.sum_dof > bracket.lower) {
        bracket.lower = outcome.report.sum_dof;
        bracket.lower_witness =
            "neutralize keeping {" + message_name(kept[0]) + ", " +
            message_name(kept[1]) + "}: verified sum DoF " +
            to_string(outcome.report.sum_dof);
      }
    } catch (const SchemeError&) {
      // structural obstruction; fall through to other candidates
    } catch (const DegenerateDrawError&) {
      // persistent degeneracy; treat as no scheme from this candidate
    }
  }
  if (bracket.lower < 1) {
    const SynthesisOutcome outcome =
        synthesize_with_retry(net, SchemeSpec{SchemeKind::Tdma, {}}, seed);
    if (outcome.report.passed) {
      bracket.lower = outcome.report.sum_dof;  // 1
      std::ostringstream w;
      w << "tdma routing of " << message_name(outcome.scheme.streams[0].message)
        << ": verified sum DoF " << to_string(outcome.report.sum_dof);
      bracket.lower_witness = w.str();
    }
  }

  result.value = {Rational(0), "BRACKET"};
  result.bracket = std::move(bracket);
  result.detail = "outside classified families; reporting bracket";
  return result;
}

}  // namespace xnet
