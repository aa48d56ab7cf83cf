// src/metrics.cpp

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

#include "easr/metrics.h"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "easr/errors.h"
#include "easr/util.h"

namespace easr {

using nlohmann::json;

Language parse_language(const std::string& s) {
  if (s == "en" || s == "english") return Language::kEnglish;
  if (s == "ko" || s == "korean") return Language::kKorean;
  throw std::invalid_argument("unknown language '" + s + "' (expected en|ko)");
}

std::string to_string(Language l) { return l == Language::kKorean ? "ko" : "en"; }

std::string NormPolicy::label() const {
  std::string s = to_string(language) + ":nfc";
  if (lowercase && language == Language::kEnglish) s += "+lower";
  if (strip_punct) s += "+punct";
  if (collapse_whitespace) s += "+ws";
  return s;
}

namespace {

icu::UnicodeString nfc(const icu::UnicodeString& in) {
  UErrorCode ec = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(ec);
  if (U_FAILURE(ec)) throw Error("ICU NFC normalizer unavailable");
  icu::UnicodeString out = norm->normalize(in, ec);
  if (U_FAILURE(ec)) throw Error("NFC normalization failed");
  return out;
}

}  // namespace

std::string normalize_text(std::string_view s, const NormPolicy& policy) {
  icu::UnicodeString us = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<std::int32_t>(s.size())));
  us = nfc(us);
  if (policy.lowercase && policy.language == Language::kEnglish) {
    us.toLower(icu::Locale::getRoot());
  }
  icu::UnicodeString out;
  bool pending_space = false;
  for (std::int32_t i = 0; i < us.length();) {
    const UChar32 c = us.char32At(i);
    i += U16_LENGTH(c);
    if (policy.strip_punct && u_ispunct(c)) continue;
    if (u_isUWhiteSpace(c)) {
      if (policy.collapse_whitespace) {
        pending_space = true;
      } else {
        out.append(c);
      }
      continue;
    }
    if (pending_space && out.length() > 0) out.append(static_cast<UChar>(' '));
    pending_space = false;
    out.append(c);
  }
  out = nfc(out);
  std::string result;
  out.toUTF8String(result);
  return result;
}

std::vector<std::string> word_tokens(std::string_view normalized) {
  return split_whitespace(normalized);
}

std::vector<std::string> char_tokens(std::string_view normalized) {
  std::vector<std::string> out;
  const auto* p = reinterpret_cast<const std::uint8_t*>(normalized.data());
  const auto n = static_cast<std::int32_t>(normalized.size());
  for (std::int32_t i = 0; i < n;) {
    const std::int32_t start = i;
    UChar32 c;
    U8_NEXT(p, i, n, c);
    if (c >= 0 && u_isUWhiteSpace(c)) continue;
    out.emplace_back(normalized.substr(static_cast<std::size_t>(start),
                                       static_cast<std::size_t>(i - start)));
  }
  return out;
}

double Alignment::error_rate() const {
  if (ref_length == 0) return static_cast<double>(errors());
  return static_cast<double>(errors()) / static_cast<double>(ref_length);
}

Alignment align(std::span<const std::string> ref, std::span<const std::string> hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  const std::size_t w = m + 1;
  std::vector<std::uint32_t> d((n + 1) * w);
  for (std::size_t i = 0; i <= n; ++i) d[i * w] = static_cast<std::uint32_t>(i);
  for (std::size_t j = 0; j <= m; ++j) d[j] = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::uint32_t diag = d[(i - 1) * w + j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const std::uint32_t up = d[(i - 1) * w + j] + 1;
      const std::uint32_t left = d[i * w + j - 1] + 1;
      d[i * w + j] = std::min({diag, up, left});
    }
  }

  Alignment a;
  a.ref_length = n;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const std::uint32_t cur = d[i * w + j];
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && cur == d[(i - 1) * w + j - 1]) {
      a.ops.push_back({EditOp::kMatch, i - 1, j - 1});
      ++a.matches;
      --i, --j;
    } else if (i > 0 && j > 0 && cur == d[(i - 1) * w + j - 1] + 1) {
      a.ops.push_back({EditOp::kSubstitute, i - 1, j - 1});
      ++a.substitutions;
      --i, --j;
    } else if (i > 0 && cur == d[(i - 1) * w + j] + 1) {
      a.ops.push_back({EditOp::kDelete, i - 1, std::nullopt});
      ++a.deletions;
      --i;
    } else {
      a.ops.push_back({EditOp::kInsert, std::nullopt, j - 1});
      ++a.insertions;
      --j;
    }
  }
  std::reverse(a.ops.begin(), a.ops.end());
  return a;
}

Unit parse_unit(const std::string& s) {
  if (s == "word" || s == "wer") return Unit::kWord;
  if (s == "char" || s == "cer") return Unit::kChar;
  throw std::invalid_argument("unknown unit '" + s + "' (expected word|char)");
}

std::string to_string(Unit u) { return u == Unit::kWord ? "word" : "char"; }

MetricReport corpus_error_rate(std::span<const ScoredPair> pairs, Unit unit,
                               const NormPolicy& policy) {
  if (pairs.empty()) throw DataError("corpus_error_rate: no pairs to score");
  MetricReport r;
  r.unit = unit;
  r.policy_label = policy.label();
  r.utterances.reserve(pairs.size());
  double rate_sum = 0.0;
  for (const auto& p : pairs) {
    const std::string ref = normalize_text(p.ref, policy);
    const std::string hyp = normalize_text(p.hyp, policy);
    const auto rt = unit == Unit::kWord ? word_tokens(ref) : char_tokens(ref);
    const auto ht = unit == Unit::kWord ? word_tokens(hyp) : char_tokens(hyp);
    const Alignment a = align(rt, ht);
    UtteranceScore s{p.id, a.substitutions, a.deletions, a.insertions, a.ref_length,
                     a.error_rate()};
    r.substitutions += s.substitutions;
    r.deletions += s.deletions;
    r.insertions += s.insertions;
    r.ref_length += s.ref_length;
    rate_sum += s.rate;
    r.utterances.push_back(std::move(s));
  }
  if (r.ref_length == 0) throw DataError("corpus_error_rate: every reference is empty");
  r.corpus_rate = static_cast<double>(r.substitutions + r.deletions + r.insertions) /
                  static_cast<double>(r.ref_length);
  r.mean_utterance_rate = rate_sum / static_cast<double>(pairs.size());
  return r;
}

std::map<std::string, std::string> load_hypotheses(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open hypothesis file: " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::string where = path.string() + ": line " + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(where + ": malformed record: " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
      throw DataError(where + ": field `id` is missing");
    }
    const json* text = nullptr;
    if (j.contains("hyp_text")) text = &j["hyp_text"];
    else if (j.contains("text")) text = &j["text"];
    if (!text || !text->is_string()) throw DataError(where + ": field `hyp_text` is missing");
    const std::string id = j["id"].get<std::string>();
    if (!out.emplace(id, text->get<std::string>()).second) {
      throw DataError(where + ": duplicate id '" + id + "'");
    }
  }
  return out;
}

std::vector<ScoredPair> join_hypotheses(const Manifest& ref,
                                        const std::map<std::string, std::string>& hyps) {
  std::vector<ScoredPair> out;
  std::vector<std::string> missing;
  std::set<std::string> ref_ids;
  for (const auto& u : ref.entries) {
    ref_ids.insert(u.id);
    auto it = hyps.find(u.id);
    if (it == hyps.end()) {
      missing.push_back(u.id);
      continue;
    }
    out.push_back({u.id, u.text, it->second});
  }
  std::vector<std::string> unknown;
  for (const auto& [id, _] : hyps) {
    if (!ref_ids.count(id)) unknown.push_back(id);
  }
  auto list = [](const std::vector<std::string>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size() && i < 5; ++i) s += (i ? ", " : "") + ids[i];
    if (ids.size() > 5) s += ", ...";
    return s;
  };
  if (!missing.empty()) {
    throw DataError(std::to_string(missing.size()) + " reference ids have no hypothesis: " +
                    list(missing));
  }
  if (!unknown.empty()) {
    throw DataError(std::to_string(unknown.size()) +
                    " hypothesis ids are not in the reference manifest: " + list(unknown));
  }
  return out;
}

// ---------------------------------------------------------------------------

PairedTestResult wilcoxon_signed_rank(std::span<const double> diffs, double alpha,
                                      std::size_t exact_threshold) {
  PairedTestResult r;
  r.alpha = alpha;
  std::vector<double> nz;
  for (double d : diffs) {
    if (std::isnan(d)) throw std::invalid_argument("wilcoxon_signed_rank: NaN difference");
    if (d != 0.0) nz.push_back(d);
  }
  const std::size_t n = nz.size();
  r.n_nonzero = n;
  r.method = n <= exact_threshold ? TestMethod::kExact : TestMethod::kNormalApprox;
  if (n == 0) {
    r.applicable = false;
    r.p_value = 1.0;
    r.significant = false;
    return r;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(nz[a]) < std::abs(nz[b]); });
  // Doubled average ranks are integers, which keeps the exact null
  // distribution on an integer lattice.
  std::vector<std::int64_t> rank2(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    const double base = std::abs(nz[order[i]]);
    while (j < n && std::abs(nz[order[j]]) - base <= 1e-12 * base) ++j;
    const auto r2 = static_cast<std::int64_t>(i + 1 + j);  // 2 * average of (i+1 .. j)
    for (std::size_t k = i; k < j; ++k) rank2[order[k]] = r2;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  std::int64_t wp2 = 0, wm2 = 0;
  for (std::size_t i = 0; i < n; ++i) (nz[i] > 0 ? wp2 : wm2) += rank2[i];
  r.w_plus = wp2 / 2.0;
  r.w_minus = wm2 / 2.0;
  r.w_statistic = std::min(r.w_plus, r.w_minus);
  const std::int64_t w2 = std::min(wp2, wm2);
  const std::int64_t total2 = wp2 + wm2;

  if (r.method == TestMethod::kExact) {
    // count[s]: number of sign assignments whose positive doubled rank sum is s.
    std::vector<std::uint64_t> count(static_cast<std::size_t>(total2) + 1, 0);
    count[0] = 1;
    std::int64_t reach = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::int64_t s = reach; s >= 0; --s) {
        if (count[static_cast<std::size_t>(s)]) {
          count[static_cast<std::size_t>(s + rank2[i])] += count[static_cast<std::size_t>(s)];
        }
      }
      reach += rank2[i];
    }
    std::uint64_t extreme = 0;
    for (std::int64_t s = 0; s <= total2; ++s) {
      if (s <= w2 || s >= total2 - w2) extreme += count[static_cast<std::size_t>(s)];
    }
    r.p_value = static_cast<double>(extreme) / std::ldexp(1.0, static_cast<int>(n));
  } else {
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    const double z = std::min(0.0, (r.w_statistic - mean + 0.5) / std::sqrt(var));
    r.p_value = std::erfc(-z / std::sqrt(2.0));
  }
  r.p_value = std::clamp(r.p_value, 0.0, 1.0);
  r.significant = r.p_value < alpha;
  return r;
}

// ---------------------------------------------------------------------------

ReportFormat parse_report_format(const std::string& s) {
  if (s == "text" || s == "table" || s == "table_text") return ReportFormat::kText;
  if (s == "csv") return ReportFormat::kCsv;
  throw std::invalid_argument("unknown report format '" + s + "' (expected text|csv)");
}

namespace {

std::string format_cell(const std::optional<ReportCell>& c) {
  if (!c) return "-";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f / %.1f", c->wer * 100.0, c->cer * 100.0);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Display width in code points; good enough for the ASCII and Hangul labels
// these tables carry.
std::size_t display_width(const std::string& s) {
  std::size_t w = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++w;
  }
  return w;
}

}  // namespace

std::string emit_report(const ReportTable& table, ReportFormat format) {
  std::vector<std::string> header;
  header.push_back(table.row_header);
  header.insert(header.end(), table.attribute_headers.begin(), table.attribute_headers.end());
  header.insert(header.end(), table.column_headers.begin(), table.column_headers.end());

  std::vector<std::vector<std::string>> rows;
  for (const auto& row : table.rows) {
    std::vector<std::string> cells;
    cells.push_back(row.label);
    for (std::size_t i = 0; i < table.attribute_headers.size(); ++i) {
      cells.push_back(i < row.attributes.size() ? row.attributes[i] : "-");
    }
    for (std::size_t i = 0; i < table.column_headers.size(); ++i) {
      cells.push_back(format_cell(i < row.cells.size() ? row.cells[i] : std::nullopt));
    }
    rows.push_back(std::move(cells));
  }

  std::string out;
  if (format == ReportFormat::kCsv) {
    auto emit = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += csv_field(cells[i]);
      }
      out += '\n';
    };
    emit(header);
    for (const auto& r : rows) emit(r);
    return out;
  }

  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = display_width(header[i]);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], display_width(r[i]));
  }
  auto emit = [&](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += "  ";
      line += cells[i];
      if (i + 1 < cells.size()) line.append(width[i] - display_width(cells[i]), ' ');
    }
    out += line + '\n';
  };
  emit(header);
  std::size_t rule = 0;
  for (std::size_t i = 0; i < width.size(); ++i) rule += width[i] + (i ? 2 : 0);
  out += std::string(rule, '-') + '\n';
  for (const auto& r : rows) emit(r);
  return out;
}

ReportTable load_report_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open results file: " + path.string());
  ReportTable t;
  std::map<std::string, std::size_t> row_index, col_index, attr_index;
  std::vector<std::map<std::string, std::string>> row_attrs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::string where = path.string() + ": line " + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(where + ": malformed record: " + e.what());
    }
    for (const char* key : {"row", "column"}) {
      if (!j.contains(key) || !j[key].is_string()) {
        throw DataError(where + ": field `" + key + "` is missing");
      }
    }
    for (const char* key : {"wer", "cer"}) {
      if (!j.contains(key) || !j[key].is_number()) {
        throw DataError(where + ": field `" + key + "` is missing");
      }
    }
    const std::string row = j["row"].get<std::string>();
    const std::string col = j["column"].get<std::string>();
    if (!row_index.count(row)) {
      row_index[row] = t.rows.size();
      t.rows.push_back({row, {}, {}});
      row_attrs.emplace_back();
    }
    if (!col_index.count(col)) {
      col_index[col] = t.column_headers.size();
      t.column_headers.push_back(col);
    }
    const std::size_t ri = row_index[row];
    if (j.contains("attrs") && j["attrs"].is_object()) {
      for (auto it = j["attrs"].begin(); it != j["attrs"].end(); ++it) {
        if (!attr_index.count(it.key())) {
          attr_index[it.key()] = t.attribute_headers.size();
          t.attribute_headers.push_back(it.key());
        }
        row_attrs[ri][it.key()] = it.value().is_string() ? it.value().get<std::string>()
                                                          : it.value().dump();
      }
    }
    auto& cells = t.rows[ri].cells;
    const std::size_t ci = col_index[col];
    if (cells.size() <= ci) cells.resize(ci + 1);
    cells[ci] = ReportCell{j["wer"].get<double>(), j["cer"].get<double>()};
  }
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (const auto& h : t.attribute_headers) {
      auto it = row_attrs[r].find(h);
      t.rows[r].attributes.push_back(it == row_attrs[r].end() ? "-" : it->second);
    }
    t.rows[r].cells.resize(t.column_headers.size());
  }
  return t;
}

}  // namespace easr
