// include/easr/synth.h

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

// Reference-speaker pools, balanced speaker assignment and batch TTS.

#ifndef EASR_SYNTH_H_
#define EASR_SYNTH_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "easr/corpus.h"
#include "easr/dsp.h"
#include "easr/paraphrase.h"

namespace easr {

struct ReferenceSpeaker {
  std::string speaker_id;
  Gender gender = Gender::kFemale;  // F or M
  std::filesystem::path reference_audio;  // resolved
  std::optional<int> age;
};

struct SpeakerPool {
  std::vector<ReferenceSpeaker> speakers;
  std::optional<std::string> preset_name;

  std::size_t size() const { return speakers.size(); }
};

/// JSON Lines with speaker_id, gender (F|M), reference_audio (relative to
/// the pool file) and optional age. Every reference clip must exist and
/// decode; otherwise DataError before any synthesis happens.
SpeakerPool load_speaker_pool(const std::filesystem::path& path);

struct GenderCounts {
  int female = 0;
  int male = 0;
  int total() const { return female + male; }
};

/// Warnings (rule "pool-overlap") for reference speakers whose speaker_id
/// or reference clip also appears in `eval`. Overlap is allowed, only
/// reported.
std::vector<Violation> check_pool_overlap(const SpeakerPool& pool, const Manifest& eval);

/// Gender composition presets: 8F0M, 6F2M, 4F4M, 2F6M, 0F8M.
/// Throws ConfigError for any other name.
GenderCounts gender_preset(const std::string& name);

/// Splits k speakers between genders in the preset's proportion (largest
/// remainder, ties to female), e.g. 4F4M with k=2 gives 1F1M.
GenderCounts scale_preset(const GenderCounts& preset, int k);

/// Picks the first `counts.female` female and `counts.male` male speakers
/// in file order. Throws DataError when the pool cannot satisfy the counts.
SpeakerPool select_pool(const SpeakerPool& candidates, const GenderCounts& counts,
                        std::optional<std::string> preset_name = std::nullopt);

/// Default pool size for an augmentation ratio: up to 10% -> 2 speakers,
/// up to 30% -> 4, above that 8.
int default_pool_size(double ratio);

struct AssignmentPlan {
  std::vector<std::pair<std::size_t, std::string>> assignments;  // (sample, speaker)

  std::size_t size() const { return assignments.size(); }
};

/// Round-robin over the pool starting at a seed-chosen speaker, so the
/// per-speaker counts are floor(n/K) or ceil(n/K). Throws DataError for an
/// empty pool with n > 0.
AssignmentPlan plan_assignments(std::size_t n, const SpeakerPool& pool, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Backends.

struct TtsRequest {
  std::string text;
  const ReferenceSpeaker* speaker = nullptr;
};

class TtsBackend {
 public:
  virtual ~TtsBackend() = default;
  virtual std::string backend_id() const = 0;

  AudioClip synthesize(const TtsRequest& request) {
    ++calls_;
    return do_synthesize(request);
  }
  std::size_t call_count() const { return calls_.load(); }

 protected:
  virtual AudioClip do_synthesize(const TtsRequest& request) = 0;

 private:
  std::atomic<std::size_t> calls_{0};
};

/// Offline mock: a speaker-dependent tone (or silence) whose length grows
/// with the word count, at a configurable native rate.
class MockTtsBackend : public TtsBackend {
 public:
  struct Options {
    int sample_rate = 22050;
    double seconds_per_word = 0.12;
    double min_seconds = 0.3;
    bool silence = false;
    // When set, every clip has exactly this duration.
    std::optional<double> fixed_seconds;
  };
  MockTtsBackend() = default;
  explicit MockTtsBackend(Options options) : options_(options) {}
  std::string backend_id() const override { return "mock-tone"; }

 protected:
  AudioClip do_synthesize(const TtsRequest& request) override;

 private:
  Options options_;
};

class FunctionTtsBackend : public TtsBackend {
 public:
  using Fn = std::function<AudioClip(const TtsRequest&)>;
  FunctionTtsBackend(std::string id, Fn fn) : id_(std::move(id)), fn_(std::move(fn)) {}
  std::string backend_id() const override { return id_; }

 protected:
  AudioClip do_synthesize(const TtsRequest& request) override { return fn_(request); }

 private:
  std::string id_;
  Fn fn_;
};

struct HttpTtsConfig {
  std::string url;
  // "upload": multipart form with `text` and the reference clip as
  // `reference_audio`. "speaker_id": JSON {"text", "speaker_id"}.
  std::string mode = "upload";
  int timeout_s = 300;
};

class HttpTtsBackend : public TtsBackend {
 public:
  explicit HttpTtsBackend(HttpTtsConfig config);
  std::string backend_id() const override { return "http:" + config_.url; }

 protected:
  AudioClip do_synthesize(const TtsRequest& request) override;

 private:
  HttpTtsConfig config_;
};

/// Shell command template with {text_file}, {ref_audio}, {out_wav} and
/// {speaker_id} placeholders; substitutions are shell-quoted.
class CommandTtsBackend : public TtsBackend {
 public:
  explicit CommandTtsBackend(std::string command_template);
  std::string backend_id() const override { return "command"; }

  std::string render(const std::string& text_file, const std::string& ref_audio,
                     const std::string& out_wav, const std::string& speaker_id) const;

 protected:
  AudioClip do_synthesize(const TtsRequest& request) override;

 private:
  std::string template_;
};

// ---------------------------------------------------------------------------

struct SynthOptions {
  int retries = 2;
  std::chrono::milliseconds backoff{500};
  int workers = 0;
  // Directory the returned manifest's relative audio paths are based on;
  // defaults to the output directory.
  std::optional<std::filesystem::path> manifest_dir;
};

/// "{source_id}~ect~{speaker_id}", or "~ect{k}~" for fan-out variant k > 0.
std::string synthetic_id(const std::string& source_id, const std::string& speaker_id,
                         int variant = 0);

/// Synthesizes `text` with `speaker`, converts to mono 16 kHz PCM16 and
/// writes out_path atomically. The returned utterance is synthetic with
/// the given source id and the duration of the written file.
Utterance synthesize_clip(TtsBackend& backend, const std::string& text,
                          const ReferenceSpeaker& speaker, const std::filesystem::path& out_path,
                          const std::string& source_id, const SynthOptions& options = {});

/// Pairs record i with the i-th planned speaker and synthesizes each clip
/// into out_dir. Existing valid outputs are reused without calling the
/// backend. The manifest is in record order.
Manifest run_batch(TtsBackend& backend, std::span<const ParaphraseRecord> records,
                   const AssignmentPlan& plan, const SpeakerPool& pool,
                   const std::filesystem::path& out_dir, const SynthOptions& options = {});

}  // namespace easr

#endif  // EASR_SYNTH_H_
