// include/easr/metrics.h

// Copyright 2026 The easraug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Text normalization, edit-distance alignment, WER/CER scoring and the
// Wilcoxon signed-rank test used to compare two systems on the same test set.

#ifndef EASR_METRICS_H_
#define EASR_METRICS_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "easr/corpus.h"

namespace easr {

enum class Language { kEnglish, kKorean };

Language parse_language(const std::string& s);
std::string to_string(Language l);

struct NormPolicy {
  bool lowercase = true;  // honored for English only
  bool strip_punct = true;
  bool collapse_whitespace = true;
  Language language = Language::kEnglish;

  static NormPolicy english() { return {true, true, true, Language::kEnglish}; }
  static NormPolicy korean() { return {false, true, true, Language::kKorean}; }
  static NormPolicy for_language(Language l) {
    return l == Language::kKorean ? korean() : english();
  }

  /// Short description written into reports, e.g. "en:nfc+lower+punct+ws".
  std::string label() const;
};

/// NFC, optional lowercasing (English only), removal of Unicode P*
/// characters, whitespace collapse and trim. Idempotent.
std::string normalize_text(std::string_view s, const NormPolicy& policy);

/// Whitespace-delimited tokens of an already normalized string.
std::vector<std::string> word_tokens(std::string_view normalized);

/// One token per code point, whitespace excluded. With NFC input a
/// precomposed Hangul syllable is one token.
std::vector<std::string> char_tokens(std::string_view normalized);

enum class EditOp { kMatch, kSubstitute, kDelete, kInsert };

struct AlignedPair {
  EditOp op;
  std::optional<std::size_t> ref_index;
  std::optional<std::size_t> hyp_index;
};

struct Alignment {
  std::vector<AlignedPair> ops;
  std::size_t matches = 0;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_length = 0;

  std::size_t errors() const { return substitutions + deletions + insertions; }
  /// errors / ref_length. An empty reference scores 0 with an empty
  /// hypothesis and `errors` otherwise (as if the reference had length 1).
  double error_rate() const;
};

/// Minimum-cost Levenshtein alignment with unit costs. When several
/// alignments share the minimum cost the backtrace prefers
/// match > substitute > delete > insert.
Alignment align(std::span<const std::string> ref, std::span<const std::string> hyp);

enum class Unit { kWord, kChar };
Unit parse_unit(const std::string& s);
std::string to_string(Unit u);

struct ScoredPair {
  std::string id;
  std::string ref;
  std::string hyp;
};

struct UtteranceScore {
  std::string id;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_length = 0;
  double rate = 0.0;
};

struct MetricReport {
  Unit unit = Unit::kWord;
  std::string policy_label;
  std::vector<UtteranceScore> utterances;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_length = 0;
  /// Pooled: (S + D + I) / N_ref over the whole list.
  double corpus_rate = 0.0;
  /// Unweighted mean of the per-utterance rates; reported for comparison.
  double mean_utterance_rate = 0.0;
};

/// Throws DataError for an empty list or when every reference is empty.
MetricReport corpus_error_rate(std::span<const ScoredPair> pairs, Unit unit,
                               const NormPolicy& policy);

/// Hypothesis records: JSON Lines with `id` and `hyp_text` (`text` is
/// accepted as an alias). Duplicate ids are an error.
std::map<std::string, std::string> load_hypotheses(const std::filesystem::path& path);

/// Joins hypotheses to the reference manifest by id, in manifest order.
/// Missing or unknown ids are a DataError.
std::vector<ScoredPair> join_hypotheses(const Manifest& ref,
                                        const std::map<std::string, std::string>& hyps);

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank.

inline constexpr std::size_t kExactThreshold = 20;

enum class TestMethod { kExact, kNormalApprox };

struct PairedTestResult {
  std::size_t n_nonzero = 0;
  double w_plus = 0.0;
  double w_minus = 0.0;
  double w_statistic = 0.0;  // min(W+, W-)
  double p_value = 1.0;
  TestMethod method = TestMethod::kExact;
  bool applicable = true;  // false when every difference is zero
  bool significant = false;
  double alpha = 0.05;
};

/// Two-sided test on paired differences (system A - system B). Zeros are
/// dropped, ties get average ranks. Exact null distribution of W when at
/// most `exact_threshold` differences remain, otherwise the normal
/// approximation with tie and continuity corrections.
PairedTestResult wilcoxon_signed_rank(std::span<const double> diffs, double alpha = 0.05,
                                      std::size_t exact_threshold = kExactThreshold);

// ---------------------------------------------------------------------------
// Reports.

struct ReportCell {
  double wer = 0.0;  // fractions, rendered as percentages
  double cer = 0.0;
};

struct ReportRow {
  std::string label;
  std::vector<std::string> attributes;       // one per attribute header
  std::vector<std::optional<ReportCell>> cells;  // one per column header
};

struct ReportTable {
  std::string row_header = "Config";
  std::vector<std::string> attribute_headers;
  std::vector<std::string> column_headers;
  std::vector<ReportRow> rows;
};

enum class ReportFormat { kText, kCsv };
ReportFormat parse_report_format(const std::string& s);

/// Renders rows in their declared order with cells as "w.w / c.c" percent.
std::string emit_report(const ReportTable& table, ReportFormat format);

/// Builds a table from result records (JSON Lines with `row`, `column`,
/// `wer`, `cer` and an optional `attrs` object). Rows, columns and
/// attribute headers follow first appearance.
ReportTable load_report_results(const std::filesystem::path& path);

}  // namespace easr

#endif  // EASR_METRICS_H_
