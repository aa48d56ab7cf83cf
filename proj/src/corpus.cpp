// src/corpus.cpp

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

#include "easr/corpus.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "easr/dsp.h"
#include "easr/errors.h"
#include "easr/util.h"

namespace easr {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Origin o) {
  return o == Origin::kOriginal ? "original" : "synthetic";
}

std::string to_string(Gender g) {
  switch (g) {
    case Gender::kFemale: return "F";
    case Gender::kMale: return "M";
    case Gender::kOther: return "other";
  }
  return "other";
}

std::string to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    case Split::kTest: return "test";
    case Split::kUnsplit: return "unsplit";
  }
  return "unsplit";
}

Origin parse_origin(const std::string& s) {
  if (s == "original") return Origin::kOriginal;
  if (s == "synthetic") return Origin::kSynthetic;
  throw DataError("unknown origin '" + s + "' (expected original|synthetic)");
}

Gender parse_gender(const std::string& s) {
  if (s == "F" || s == "f" || s == "female") return Gender::kFemale;
  if (s == "M" || s == "m" || s == "male") return Gender::kMale;
  if (s == "other") return Gender::kOther;
  throw DataError("unknown gender '" + s + "' (expected F|M|other)");
}

Split parse_split(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "validation" || s == "dev") return Split::kValidation;
  if (s == "test") return Split::kTest;
  if (s == "unsplit") return Split::kUnsplit;
  throw DataError("unknown split '" + s + "'");
}

json utterance_to_json(const Utterance& u) {
  json j = u.extra.is_object() ? u.extra : json::object();
  j["id"] = u.id;
  j["audio_path"] = u.audio_path;
  j["text"] = u.text;
  j["origin"] = to_string(u.origin);
  if (u.speaker_id) j["speaker_id"] = *u.speaker_id;
  if (u.age) j["age"] = *u.age;
  if (u.gender) j["gender"] = to_string(*u.gender);
  if (u.lang) j["lang"] = *u.lang;
  if (u.source_id) j["source_id"] = *u.source_id;
  if (u.duration_s) j["duration_s"] = *u.duration_s;
  return j;
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "id", "audio_path", "text", "origin", "speaker_id",
      "age", "gender", "lang", "source_id", "duration_s"};
  return keys;
}

[[noreturn]] void field_error(std::size_t line, const std::string& field,
                              const std::string& what) {
  throw DataError("line " + std::to_string(line) + ": field `" + field + "` " + what);
}

std::string required_string(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) field_error(line, key, "is missing");
  if (!it->is_string()) field_error(line, key, "must be a string");
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& j, const char* key,
                                           std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) field_error(line, key, "must be a string");
  return it->get<std::string>();
}

}  // namespace

Utterance utterance_from_json(const json& j, std::size_t line) {
  if (!j.is_object()) {
    throw DataError("line " + std::to_string(line) + ": record is not an object");
  }
  Utterance u;
  u.id = required_string(j, "id", line);
  u.audio_path = required_string(j, "audio_path", line);
  u.text = required_string(j, "text", line);
  const std::string origin = required_string(j, "origin", line);
  try {
    u.origin = parse_origin(origin);
  } catch (const DataError& e) {
    field_error(line, "origin", e.what());
  }
  u.speaker_id = optional_string(j, "speaker_id", line);
  if (auto it = j.find("age"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) field_error(line, "age", "must be an integer");
    u.age = it->get<int>();
  }
  if (auto g = optional_string(j, "gender", line)) {
    try {
      u.gender = parse_gender(*g);
    } catch (const DataError& e) {
      field_error(line, "gender", e.what());
    }
  }
  u.lang = optional_string(j, "lang", line);
  u.source_id = optional_string(j, "source_id", line);
  if (auto it = j.find("duration_s"); it != j.end() && !it->is_null()) {
    if (!it->is_number()) field_error(line, "duration_s", "must be a number");
    const double d = it->get<double>();
    if (!(d >= 0.0) || !std::isfinite(d)) field_error(line, "duration_s", "must be >= 0");
    u.duration_s = d;
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known_keys().count(it.key())) u.extra[it.key()] = it.value();
  }

  if (u.id.empty()) field_error(line, "id", "is empty");
  if (trim(u.text).empty()) field_error(line, "text", "is empty");
  if (u.origin == Origin::kSynthetic && !u.source_id) {
    field_error(line, "source_id", "is required for synthetic records");
  }
  if (u.origin == Origin::kOriginal && u.source_id) {
    field_error(line, "source_id", "must be absent for original records");
  }
  return u;
}

Manifest parse_manifest(std::istream& in, const std::string& name,
                        const fs::path& base_dir, Split split) {
  Manifest m;
  m.split = split;
  m.base_dir = base_dir;
  std::unordered_map<std::string, std::size_t> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(name + ": line " + std::to_string(lineno) +
                      ": malformed record: " + e.what());
    }
    Utterance u;
    try {
      u = utterance_from_json(j, lineno);
    } catch (const DataError& e) {
      throw DataError(name + ": " + e.what());
    }
    auto [it, inserted] = seen.emplace(u.id, lineno);
    if (!inserted) {
      throw DataError(name + ": line " + std::to_string(lineno) + ": duplicate id '" +
                      u.id + "' (first seen on line " + std::to_string(it->second) + ")");
    }
    m.entries.push_back(std::move(u));
  }
  return m;
}

Manifest load_manifest(const fs::path& path, Split split) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open manifest: " + path.string());
  fs::path base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_manifest(in, path.string(), base, split);
}

std::string rebase_audio_path(const std::string& audio_path, const fs::path& from_dir,
                              const fs::path& to_dir) {
  const fs::path p(audio_path);
  if (p.is_absolute()) return audio_path;
  const fs::path from = fs::absolute(from_dir.empty() ? fs::path(".") : from_dir).lexically_normal();
  const fs::path to = fs::absolute(to_dir.empty() ? fs::path(".") : to_dir).lexically_normal();
  if (from == to) return audio_path;
  const fs::path full = (from / p).lexically_normal();
  const fs::path rel = full.lexically_relative(to);
  if (rel.empty()) return full.generic_string();
  return rel.generic_string();
}

std::string serialize_manifest(const Manifest& m, const fs::path& target_dir) {
  std::string out;
  for (const auto& u : m.entries) {
    json j = utterance_to_json(u);
    j["audio_path"] = rebase_audio_path(u.audio_path, m.base_dir, target_dir);
    if (auto it = j.find("features_path"); it != j.end() && it->is_string()) {
      *it = rebase_audio_path(it->get<std::string>(), m.base_dir, target_dir);
    }
    out += j.dump(-1, ' ', false, json::error_handler_t::strict);
    out += '\n';
  }
  return out;
}

void save_manifest(const Manifest& m, const fs::path& path) {
  fs::path dir = path.parent_path();
  if (dir.empty()) dir = ".";
  atomic_write_file(path, serialize_manifest(m, dir));
}

fs::path resolve_audio_path(const Manifest& m, const Utterance& u) {
  const fs::path p(u.audio_path);
  if (p.is_absolute()) return p;
  return (m.base_dir / p).lexically_normal();
}

std::vector<Violation> validate_manifest(const Manifest& m, const ValidationPolicy& policy) {
  std::vector<Violation> out;
  auto add = [&](const std::string& id, const std::string& rule, const std::string& msg,
                 Violation::Severity sev = Violation::Severity::kError) {
    out.push_back({id, rule, msg, sev});
  };
  std::unordered_set<std::string> ids;
  for (const auto& u : m.entries) {
    if (u.id.empty()) add(u.id, "id-empty", "id is empty");
    if (!ids.insert(u.id).second) add(u.id, "id-unique", "duplicate id '" + u.id + "'");
    if (trim(u.text).empty()) add(u.id, "text-empty", "text is empty after trimming");
    if (u.is_synthetic() && !u.source_id) {
      add(u.id, "source-required", "synthetic entry has no source_id");
    }
    if (!u.is_synthetic() && u.source_id) {
      add(u.id, "source-forbidden", "original entry carries a source_id");
    }
    if (policy.min_age) {
      if (u.age && *u.age < *policy.min_age) {
        add(u.id, "min-age",
            "age " + std::to_string(*u.age) + " is below " + std::to_string(*policy.min_age));
      }
    }
    if (policy.require_age && !u.age) add(u.id, "age-missing", "age is not recorded");
    if (policy.check_audio || policy.required_sample_rate || policy.require_mono) {
      WavInfo info;
      try {
        info = probe_wav(resolve_audio_path(m, u));
      } catch (const Error& e) {
        add(u.id, "audio-readable", e.what());
        continue;
      }
      if (policy.required_sample_rate && info.sample_rate != *policy.required_sample_rate) {
        add(u.id, "sample-rate",
            "sample rate " + std::to_string(info.sample_rate) + " Hz, expected " +
                std::to_string(*policy.required_sample_rate));
      }
      if (policy.require_mono && info.channels != 1) {
        add(u.id, "mono", std::to_string(info.channels) + " channels, expected 1");
      }
      if (u.duration_s && info.duration_s() > 0 &&
          std::abs(*u.duration_s - info.duration_s()) > 0.01 * info.duration_s()) {
        std::ostringstream ss;
        ss << "recorded duration " << *u.duration_s << " s differs from audio "
           << info.duration_s() << " s by more than 1%";
        add(u.id, "duration-mismatch", ss.str(), Violation::Severity::kWarning);
      }
    }
  }
  return out;
}

bool has_errors(const std::vector<Violation>& violations) {
  for (const auto& v : violations) {
    if (v.severity == Violation::Severity::kError) return true;
  }
  return false;
}

std::size_t AgeHistogram::total() const {
  std::size_t n = unknown;
  for (const auto& [k, c] : buckets) n += c;
  return n;
}

std::vector<std::pair<std::string, std::size_t>> AgeHistogram::labeled() const {
  std::vector<std::pair<std::string, std::size_t>> out;
  for (const auto& [lo, c] : buckets) {
    out.emplace_back(std::to_string(lo) + "-" + std::to_string(lo + bucket_width - 1), c);
  }
  if (unknown > 0) out.emplace_back("unknown", unknown);
  return out;
}

AgeHistogram age_histogram(const Manifest& m, int bucket_width) {
  if (bucket_width < 1) throw std::invalid_argument("age_histogram: bucket width must be >= 1");
  AgeHistogram h;
  h.bucket_width = bucket_width;
  for (const auto& u : m.entries) {
    if (!u.age) {
      ++h.unknown;
      continue;
    }
    // Floor division so negative ages (bad data) still land in a bucket.
    int a = *u.age;
    int lo = (a >= 0 ? a / bucket_width : -((-a + bucket_width - 1) / bucket_width)) * bucket_width;
    ++h.buckets[lo];
  }
  return h;
}

CorpusStats corpus_stats(const Manifest& m) {
  CorpusStats s;
  std::unordered_set<std::string> speakers;
  for (const auto& u : m.entries) {
    ++s.utterances;
    if (u.is_synthetic()) ++s.synthetic; else ++s.original;
    if (u.speaker_id) speakers.insert(*u.speaker_id);
    if (!u.gender) {
      ++s.gender_unknown;
    } else if (*u.gender == Gender::kFemale) {
      ++s.female;
    } else if (*u.gender == Gender::kMale) {
      ++s.male;
    } else {
      ++s.gender_unknown;
    }
    if (u.duration_s) {
      s.total_duration_s += *u.duration_s;
      ++s.with_duration;
    }
  }
  s.speakers = speakers.size();
  return s;
}

std::vector<Violation> fill_durations(Manifest& m) {
  std::vector<Violation> warnings;
  for (auto& u : m.entries) {
    WavInfo info;
    try {
      info = probe_wav(resolve_audio_path(m, u));
    } catch (const Error& e) {
      warnings.push_back({u.id, "audio-readable", e.what(), Violation::Severity::kWarning});
      continue;
    }
    const double actual = info.duration_s();
    if (!u.duration_s) {
      u.duration_s = actual;
    } else if (std::abs(*u.duration_s - actual) > 0.01 * actual) {
      std::ostringstream ss;
      ss << "recorded duration " << *u.duration_s << " s differs from audio " << actual
         << " s by more than 1%";
      warnings.push_back({u.id, "duration-mismatch", ss.str(), Violation::Severity::kWarning});
    }
  }
  return warnings;
}

}  // namespace easr
