// include/easr/paraphrase.h

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

// Elderly-contextual paraphrasing of transcripts through a pluggable LLM
// backend: the three-step prompt, output constraints, retries and a
// content-addressed cache.

#ifndef EASR_PARAPHRASE_H_
#define EASR_PARAPHRASE_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "easr/corpus.h"
#include "easr/errors.h"
#include "json.hpp"

namespace easr {

class PromptTemplate {
 public:
  /// Throws ConfigError when any step is empty.
  PromptTemplate(std::string preparation, std::vector<std::string> paraphrasing_rules,
                 std::string contextual_instruction);

  /// Preparation, the paraphrasing rules and the contextual instruction
  /// used for every paraphrase unless a config overrides them.
  static PromptTemplate standard();

  const std::string& preparation() const { return preparation_; }
  const std::vector<std::string>& paraphrasing_rules() const { return rules_; }
  const std::string& contextual_instruction() const { return contextual_; }

  nlohmann::json to_json() const;
  static PromptTemplate from_json(const nlohmann::json& j);

 private:
  std::string preparation_;
  std::vector<std::string> rules_;
  std::string contextual_;
};

/// Renders the three steps followed by the transcript, which appears
/// exactly once and last. Throws std::invalid_argument on an empty
/// transcript.
std::string build_prompt(const PromptTemplate& tmpl, const std::string& transcript);

struct GenerationParams {
  double temperature = 0.0;
  double top_p = 0.9;
  int max_tokens = 512;
  double frequency_penalty = 0.2;
  double presence_penalty = 0.1;
  std::map<std::string, std::string> extra;

  /// Throws ConfigError if top_p is outside [0, 1] or max_tokens < 1.
  void validate() const;
  nlohmann::json to_json() const;
  static GenerationParams from_json(const nlohmann::json& j);
};

/// Named presets: "default" (deterministic chat-completion settings) and
/// "gemini" (temperature 1.0, thinking level low).
GenerationParams generation_profile(const std::string& name);

struct ParaphraseRecord {
  std::string source_id;
  std::string source_text;
  std::string ect_text;
  std::string backend_id;
  std::string params_fingerprint;
  std::string created_at;  // UTC, ISO-8601
  int variant = 0;

  nlohmann::json to_json() const;
  static ParaphraseRecord from_json(const nlohmann::json& j, std::size_t line);
};

void save_paraphrase_records(std::span<const ParaphraseRecord> records,
                             const std::filesystem::path& path);
std::vector<ParaphraseRecord> load_paraphrase_records(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Output constraints.

struct EctBounds {
  int min_words = 3;
  int max_words = 20;
};

struct EctViolation {
  enum class Kind { kEmpty, kTooFewWords, kTooManyWords, kRepetition };
  Kind kind;
  std::string message;
};

/// Word counts use whitespace tokenization after trimming, for every
/// language. Repetition is equality after English normalization. An empty
/// result means the candidate passes.
std::vector<EctViolation> validate_ect(const std::string& original, const std::string& candidate,
                                       int min_words = 3, int max_words = 20);

std::size_t count_words(const std::string& text);

// ---------------------------------------------------------------------------
// Backends.

struct CompletionRequest {
  std::string prompt;
  GenerationParams params;
  // Not sent to remote backends; lets offline mocks see the transcript.
  std::string source_text;
};

class ParaphraseBackend {
 public:
  virtual ~ParaphraseBackend() = default;

  virtual std::string model_id() const = 0;

  /// Counts every attempt, including failed ones.
  std::string complete(const CompletionRequest& request) {
    ++calls_;
    return do_complete(request);
  }

  std::size_t call_count() const { return calls_.load(); }

 protected:
  virtual std::string do_complete(const CompletionRequest& request) = 0;

 private:
  std::atomic<std::size_t> calls_{0};
};

/// Offline mock: echoes the transcript behind a fixed prefix, truncated so
/// the result stays within the word bounds.
class MockParaphraseBackend : public ParaphraseBackend {
 public:
  explicit MockParaphraseBackend(std::string prefix = "As we used to say,",
                                 EctBounds bounds = {});
  std::string model_id() const override { return "mock-echo"; }

 protected:
  std::string do_complete(const CompletionRequest& request) override;

 private:
  std::string prefix_;
  EctBounds bounds_;
};

/// Wraps a callable; used by tests and the Python bindings.
class FunctionParaphraseBackend : public ParaphraseBackend {
 public:
  using Fn = std::function<std::string(const CompletionRequest&)>;
  FunctionParaphraseBackend(std::string model_id, Fn fn)
      : model_id_(std::move(model_id)), fn_(std::move(fn)) {}
  std::string model_id() const override { return model_id_; }

 protected:
  std::string do_complete(const CompletionRequest& request) override { return fn_(request); }

 private:
  std::string model_id_;
  Fn fn_;
};

struct HttpChatConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-5";
  std::string api_key_env = "OPENAI_API_KEY";  // variable name, never the key
  int timeout_s = 120;
};

/// Chat-completions style request body: model, a single user message and
/// the five generation parameters (plus any extras).
nlohmann::json build_chat_request(const CompletionRequest& request, const std::string& model);

/// First choice's message content. Throws BackendError on an unexpected
/// shape or an API error object.
std::string parse_chat_response(const std::string& body);

class HttpChatBackend : public ParaphraseBackend {
 public:
  explicit HttpChatBackend(HttpChatConfig config);
  std::string model_id() const override { return config_.model; }

 protected:
  std::string do_complete(const CompletionRequest& request) override;

 private:
  HttpChatConfig config_;
};

/// Runs a shell command with the prompt on stdin and reads the paraphrase
/// from stdout. A nonzero exit status is a backend failure.
class CommandParaphraseBackend : public ParaphraseBackend {
 public:
  CommandParaphraseBackend(std::string command, std::string model_id);
  std::string model_id() const override { return model_id_; }

 protected:
  std::string do_complete(const CompletionRequest& request) override;

 private:
  std::string command_;
  std::string model_id_;
};

// ---------------------------------------------------------------------------
// Cache.

struct CacheEntry {
  std::string ect_text;
  std::string created_at;
};

std::string cache_key(const std::string& model_id, const std::string& prompt,
                      const GenerationParams& params);
std::string params_fingerprint(const PromptTemplate& tmpl, const GenerationParams& params);

/// Append-only JSON Lines store keyed by cache_key(). Safe for concurrent
/// readers; writers are serialized. With an empty path it is memory-only.
class ParaphraseCache {
 public:
  ParaphraseCache() = default;
  explicit ParaphraseCache(std::filesystem::path path);

  std::optional<CacheEntry> lookup(const std::string& key) const;
  void insert(const std::string& key, const CacheEntry& entry);
  std::size_t size() const;

 private:
  std::filesystem::path path_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, CacheEntry> entries_;
};

// ---------------------------------------------------------------------------
// Generation.

/// Raised when every validation attempt produced unusable text.
class EctValidationError : public BackendError {
 public:
  EctValidationError(const std::string& source_id, std::string last_candidate,
                     std::vector<EctViolation> reasons);
  const std::string& source_id() const { return source_id_; }
  const std::string& last_candidate() const { return last_candidate_; }
  const std::vector<EctViolation>& reasons() const { return reasons_; }

 private:
  std::string source_id_;
  std::string last_candidate_;
  std::vector<EctViolation> reasons_;
};

struct ParaphraseOptions {
  EctBounds bounds;
  int validation_attempts = 3;  // V: prompts per source before giving up
  int retries = 2;              // R: transport retries per prompt
  std::chrono::milliseconds backoff{500};
  int paraphrases_per_source = 1;  // fan-out; 1 = one paraphrase per transcript
  int workers = 0;                 // 0 = hardware concurrency
  // Source of created_at for fresh generations. Defaults to wall clock
  // (honoring SOURCE_DATE_EPOCH).
  std::function<std::int64_t()> clock;
};

/// Generates (or fetches from cache) one validated paraphrase. On a cache
/// hit the backend is not called.
ParaphraseRecord generate_ect(ParaphraseBackend& backend, const PromptTemplate& tmpl,
                              const GenerationParams& params, const Utterance& u,
                              ParaphraseCache* cache, const ParaphraseOptions& options = {},
                              int variant = 0);

/// Paraphrases every utterance with bounded parallelism. Output order is
/// input order (then variant), whatever the completion order.
std::vector<ParaphraseRecord> paraphrase_all(ParaphraseBackend& backend,
                                             const PromptTemplate& tmpl,
                                             const GenerationParams& params,
                                             std::span<const Utterance> utterances,
                                             ParaphraseCache* cache,
                                             const ParaphraseOptions& options = {});

}  // namespace easr

#endif  // EASR_PARAPHRASE_H_
