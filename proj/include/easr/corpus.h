// include/easr/corpus.h

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

// Manifest data model. A manifest is a JSON Lines file, one utterance per
// line. Required keys: id, audio_path, text, origin. Optional keys:
// speaker_id, age, gender, lang, source_id, duration_s. Any other key is
// kept verbatim and written back on save. Keys are serialized in
// alphabetical order, so save(load(f)) == f for canonical files.

#ifndef EASR_CORPUS_H_
#define EASR_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace easr {

enum class Origin { kOriginal, kSynthetic };
enum class Gender { kFemale, kMale, kOther };
enum class Split { kTrain, kValidation, kTest, kUnsplit };

std::string to_string(Origin o);
std::string to_string(Gender g);
std::string to_string(Split s);
Origin parse_origin(const std::string& s);
Gender parse_gender(const std::string& s);
Split parse_split(const std::string& s);

struct Utterance {
  std::string id;
  std::string audio_path;  // as stored; relative to the manifest directory
  std::string text;
  Origin origin = Origin::kOriginal;
  std::optional<std::string> speaker_id;
  std::optional<int> age;
  std::optional<Gender> gender;
  std::optional<std::string> lang;  // "en", "ko" or any other BCP-47-ish tag
  std::optional<std::string> source_id;
  std::optional<double> duration_s;
  nlohmann::json extra = nlohmann::json::object();  // unknown keys

  bool is_synthetic() const { return origin == Origin::kSynthetic; }
};

struct Manifest {
  std::vector<Utterance> entries;
  Split split = Split::kUnsplit;
  // Directory that relative audio paths are resolved against.
  std::filesystem::path base_dir;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

nlohmann::json utterance_to_json(const Utterance& u);

/// Parses one record. `line` is only used in error messages.
Utterance utterance_from_json(const nlohmann::json& j, std::size_t line);

/// Throws DataError on a missing file, malformed line (with line number and
/// field), duplicate id, or a violated origin/source_id invariant.
Manifest load_manifest(const std::filesystem::path& path,
                       Split split = Split::kUnsplit);

Manifest parse_manifest(std::istream& in, const std::string& name,
                        const std::filesystem::path& base_dir,
                        Split split = Split::kUnsplit);

/// Canonical JSON Lines text with audio paths rebased onto `target_dir`.
std::string serialize_manifest(const Manifest& m,
                               const std::filesystem::path& target_dir);

/// Atomic write of serialize_manifest(m, path.parent_path()).
void save_manifest(const Manifest& m, const std::filesystem::path& path);

std::filesystem::path resolve_audio_path(const Manifest& m,
                                         const Utterance& u);

/// Re-expresses a relative audio path stored against `from_dir` as one
/// relative to `to_dir`. Absolute paths are returned unchanged.
std::string rebase_audio_path(const std::string& audio_path,
                              const std::filesystem::path& from_dir,
                              const std::filesystem::path& to_dir);

struct ValidationPolicy {
  std::optional<int> min_age;
  bool require_age = false;
  // Open every audio file and compare its header against the record.
  bool check_audio = false;
  std::optional<int> required_sample_rate;
  bool require_mono = false;
};

struct Violation {
  enum class Severity { kError, kWarning };
  std::string id;
  std::string rule;
  std::string message;
  Severity severity = Severity::kError;
};

/// Violations are data, never exceptions. The result holds no kError
/// entries iff the manifest satisfies every invariant and policy rule.
std::vector<Violation> validate_manifest(const Manifest& m,
                                         const ValidationPolicy& policy);

bool has_errors(const std::vector<Violation>& violations);

struct AgeHistogram {
  int bucket_width = 10;
  std::map<int, std::size_t> buckets;  // keyed by bucket lower bound
  std::size_t unknown = 0;

  std::size_t total() const;
  /// "70-79" style labels in ascending order, then "unknown" if nonzero.
  std::vector<std::pair<std::string, std::size_t>> labeled() const;
};

AgeHistogram age_histogram(const Manifest& m, int bucket_width);

struct CorpusStats {
  std::size_t utterances = 0;
  std::size_t original = 0;
  std::size_t synthetic = 0;
  std::size_t speakers = 0;
  std::size_t female = 0;
  std::size_t male = 0;
  std::size_t gender_unknown = 0;
  double total_duration_s = 0.0;  // over entries that carry a duration
  std::size_t with_duration = 0;
};

CorpusStats corpus_stats(const Manifest& m);

/// Fills absent duration_s values from the WAV headers. Present values are
/// compared against the header and a warning is returned when they differ
/// by more than 1%.
std::vector<Violation> fill_durations(Manifest& m);

}  // namespace easr

#endif  // EASR_CORPUS_H_
