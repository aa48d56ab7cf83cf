// include/easr/pipeline.h

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

// End-to-end augmentation: pick a fraction of the training set, paraphrase
// each transcript, synthesize it with a balanced reference-speaker pool and
// merge the synthetic set back into the original one.

#ifndef EASR_PIPELINE_H_
#define EASR_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "easr/corpus.h"
#include "easr/dsp.h"
#include "easr/paraphrase.h"
#include "easr/synth.h"
#include "json.hpp"

namespace easr {

enum class Ordering { kAppend, kInterleave };
Ordering parse_ordering(const std::string& s);
std::string to_string(Ordering o);

struct AugmentConfig {
  double ratio = 1.0;  // fraction of N to augment, in (0, 1]
  std::string pool_preset = "4F4M";
  std::optional<int> pool_size_override;
  std::uint64_t seed = 0;
  std::string llm_profile = "default";
  std::string tts_backend = "mock";
  Ordering ordering = Ordering::kAppend;

  /// Throws ConfigError when ratio is outside (0, 1].
  void validate() const;
  /// pool_size_override, else the ratio-based default.
  int pool_size() const;
};

/// round(ratio * n), halves away from zero.
std::size_t augment_count(std::size_t n, double ratio);

/// round(ratio * N) originals drawn uniformly without replacement,
/// returned in manifest order. ratio 1 returns every entry. The manifest
/// must be a training split.
std::vector<Utterance> select_for_augmentation(const Manifest& m, double ratio,
                                               std::uint64_t seed);

struct ParaphraseStage {
  ParaphraseBackend& backend;
  PromptTemplate tmpl = PromptTemplate::standard();
  GenerationParams params;
  ParaphraseCache* cache = nullptr;
  ParaphraseOptions options;
};

struct SynthStage {
  TtsBackend& backend;
  SpeakerPool pool;
  std::filesystem::path audio_dir;
  SynthOptions options;
};

struct AugmentedSet {
  Manifest d_aug;
  std::vector<ParaphraseRecord> records;
  AssignmentPlan plan;
};

/// Paraphrase then synthesize every selected utterance. |D_aug| equals
/// |selected| (times the fan-out). Any stage error propagates naming the
/// failing source id and nothing is written besides per-clip audio.
AugmentedSet build_augmented_set(std::span<const Utterance> selected, ParaphraseStage& paraphrase,
                                 SynthStage& synth, const AugmentConfig& config);

/// D_orig followed (append) or alternated (interleave) with D_aug. Relative
/// audio paths of `aug` are rebased onto orig.base_dir. Throws DataError on
/// an id present in both inputs.
Manifest merge_train_set(const Manifest& orig, const Manifest& aug, Ordering ordering);

/// Every synthetic entry's source_id must name exactly one original entry
/// of the same manifest.
std::vector<Violation> check_lineage(const Manifest& m);

// ---------------------------------------------------------------------------
// Baselines.

/// Speed-perturbed copies of `selected`, cycling through `factors`. Clips
/// go to audio_dir; ids are "{source}~sp{factor}".
Manifest build_speed_perturbed_set(const Manifest& source, std::span<const Utterance> selected,
                                   const std::vector<double>& factors,
                                   const std::filesystem::path& audio_dir,
                                   const std::filesystem::path& manifest_dir, int workers);

struct SpecAugmentExport {
  MaskPolicy policy;
  std::size_t n_mels = 80;
  bool waveform_masking = false;  // also write time-masked WAVs
};

/// Masked log-mel copies of `selected`, exported as feature files under
/// feature_dir and recorded in each entry's `features_path` field. ids are
/// "{source}~specaug". The per-utterance mask seed derives from
/// policy.seed and the source id.
Manifest build_spec_augmented_set(const Manifest& source, std::span<const Utterance> selected,
                                  const SpecAugmentExport& options,
                                  const std::filesystem::path& feature_dir,
                                  const std::filesystem::path& manifest_dir, int workers);

// ---------------------------------------------------------------------------
// Configured runs.

struct PipelineConfig {
  std::filesystem::path config_dir;
  std::filesystem::path train_manifest;
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> cache_path;
  std::string method = "ect";  // ect | speed | specaugment
  AugmentConfig augment;
  int workers = 0;

  struct Paraphrase {
    std::string backend = "mock";  // mock | http | command
    std::string model = "gpt-5";
    std::string base_url = "https://api.openai.com/v1";
    std::string api_key_env = "OPENAI_API_KEY";
    std::string command;
    int timeout_s = 120;
    std::optional<PromptTemplate> tmpl;
    GenerationParams params;
    ParaphraseOptions options;
  } paraphrase;

  struct Synth {
    std::string backend = "mock";  // mock | http | command
    std::filesystem::path pool_file;
    std::string url;
    std::string mode = "upload";
    std::string command;
    int timeout_s = 300;
    int mock_sample_rate = 22050;
    SynthOptions options;
  } synth;

  struct Baseline {
    std::vector<double> speed_factors{0.9, 1.1};
    SpecAugmentExport spec;
  } baseline;

  // Effective configuration after overrides, echoed into the run record.
  nlohmann::json effective;
};

/// Reads a YAML run config, applies "dotted.key=value" overrides (values
/// parsed as YAML scalars) and resolves paths against the config file's
/// directory. Throws ConfigError with file and line for syntax errors and
/// with the key path for bad values.
PipelineConfig load_pipeline_config(const std::filesystem::path& path,
                                    const std::vector<std::string>& overrides = {});

/// Same, from an already parsed JSON document (used by tests and bindings).
PipelineConfig pipeline_config_from_json(nlohmann::json doc,
                                         const std::filesystem::path& config_dir,
                                         const std::vector<std::string>& overrides = {});

std::unique_ptr<ParaphraseBackend> make_paraphrase_backend(const PipelineConfig& cfg, bool mock);
std::unique_ptr<TtsBackend> make_tts_backend(const PipelineConfig& cfg, bool mock);

/// Pool for a run: the configured pool file narrowed to the preset's
/// gender split at the configured size.
SpeakerPool resolve_pool(const PipelineConfig& cfg);

struct RunRecord {
  nlohmann::json config;
  std::string input_manifest_sha256;
  std::map<std::string, std::string> output_sha256;
  std::map<std::string, double> timings_ms;
  std::map<std::string, std::size_t> backend_calls;
  std::map<std::string, std::size_t> counts;

  nlohmann::json to_json() const;
};

struct RunOutputs {
  std::filesystem::path d_aug;
  std::filesystem::path d_train;
  std::filesystem::path paraphrases;  // empty for baselines
  std::filesystem::path run_record;
  RunRecord record;
};

/// Runs the configured method end to end and writes paraphrases.jsonl,
/// d_aug.jsonl, d_train.jsonl, audio/ and run_record.json into out_dir.
/// Final manifests appear only after every stage succeeded.
RunOutputs run_augmentation(const PipelineConfig& cfg, bool mock_backends);

}  // namespace easr

#endif  // EASR_PIPELINE_H_
