// src/paraphrase.cpp

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

#include "easr/paraphrase.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "easr/metrics.h"
#include "easr/util.h"
#include "http.h"

namespace easr {

using nlohmann::json;

PromptTemplate::PromptTemplate(std::string preparation, std::vector<std::string> paraphrasing_rules,
                               std::string contextual_instruction)
    : preparation_(std::move(preparation)),
      rules_(std::move(paraphrasing_rules)),
      contextual_(std::move(contextual_instruction)) {
  if (trim(preparation_).empty()) throw ConfigError("prompt template: preparation step is empty");
  if (rules_.empty()) throw ConfigError("prompt template: no paraphrasing rules");
  for (const auto& r : rules_) {
    if (trim(r).empty()) throw ConfigError("prompt template: empty paraphrasing rule");
  }
  if (trim(contextual_).empty()) {
    throw ConfigError("prompt template: contextual instruction is empty");
  }
}

PromptTemplate PromptTemplate::standard() {
  return PromptTemplate(
      "Make a sentence into a CSV file.",
      {"Write a sentence, related to the CSV file.", "Do not repeat the original sentence.",
       "Use a minimum of 3 words and a maximum of 20 words."},
      "Change the given sentence into a sentence frequently used by elderly people.");
}

json PromptTemplate::to_json() const {
  return {{"preparation", preparation_},
          {"paraphrasing_rules", rules_},
          {"contextual_instruction", contextual_}};
}

PromptTemplate PromptTemplate::from_json(const json& j) {
  try {
    return PromptTemplate(j.at("preparation").get<std::string>(),
                          j.at("paraphrasing_rules").get<std::vector<std::string>>(),
                          j.at("contextual_instruction").get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("prompt template: ") + e.what());
  }
}

std::string build_prompt(const PromptTemplate& tmpl, const std::string& transcript) {
  if (trim(transcript).empty()) throw std::invalid_argument("build_prompt: empty transcript");
  std::string p;
  p += "Step 1 (Preparation): " + tmpl.preparation() + "\n";
  p += "Step 2 (Sentence paraphrasing):\n";
  for (const auto& r : tmpl.paraphrasing_rules()) p += "- " + r + "\n";
  p += "Step 3 (Elderly-contextual paraphrasing): " + tmpl.contextual_instruction() + "\n";
  p += "Reply with the new sentence only.\n\n";
  p += "Sentence: " + transcript;
  return p;
}

void GenerationParams::validate() const {
  if (!(top_p >= 0.0 && top_p <= 1.0)) throw ConfigError("generation params: top_p must be in [0, 1]");
  if (max_tokens < 1) throw ConfigError("generation params: max_tokens must be >= 1");
}

json GenerationParams::to_json() const {
  json j = {{"temperature", temperature},
            {"top_p", top_p},
            {"max_tokens", max_tokens},
            {"frequency_penalty", frequency_penalty},
            {"presence_penalty", presence_penalty}};
  if (!extra.empty()) j["extra"] = extra;
  return j;
}

GenerationParams GenerationParams::from_json(const json& j) {
  GenerationParams p;
  try {
    p.temperature = j.value("temperature", p.temperature);
    p.top_p = j.value("top_p", p.top_p);
    p.max_tokens = j.value("max_tokens", p.max_tokens);
    p.frequency_penalty = j.value("frequency_penalty", p.frequency_penalty);
    p.presence_penalty = j.value("presence_penalty", p.presence_penalty);
    if (j.contains("extra")) p.extra = j["extra"].get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("generation params: ") + e.what());
  }
  p.validate();
  return p;
}

GenerationParams generation_profile(const std::string& name) {
  if (name == "default" || name == "gpt" || name == "gpt-5" || name == "gpt-4o") {
    return GenerationParams{};
  }
  if (name == "gemini") {
    GenerationParams p;
    p.temperature = 1.0;
    p.top_p = 1.0;
    p.frequency_penalty = 0.0;
    p.presence_penalty = 0.0;
    p.extra["thinking_level"] = "low";
    return p;
  }
  throw ConfigError("unknown LLM profile '" + name + "' (expected default|gemini)");
}

json ParaphraseRecord::to_json() const {
  json j = {{"source_id", source_id},     {"source_text", source_text},
            {"ect_text", ect_text},       {"backend_id", backend_id},
            {"params_fingerprint", params_fingerprint}, {"created_at", created_at}};
  if (variant != 0) j["variant"] = variant;
  return j;
}

ParaphraseRecord ParaphraseRecord::from_json(const json& j, std::size_t line) {
  ParaphraseRecord r;
  auto need = [&](const char* key) -> std::string {
    if (!j.contains(key) || !j[key].is_string()) {
      throw DataError("line " + std::to_string(line) + ": field `" + key + "` is missing");
    }
    return j[key].get<std::string>();
  };
  r.source_id = need("source_id");
  r.source_text = need("source_text");
  r.ect_text = need("ect_text");
  r.backend_id = need("backend_id");
  r.params_fingerprint = need("params_fingerprint");
  r.created_at = need("created_at");
  r.variant = j.value("variant", 0);
  return r;
}

void save_paraphrase_records(std::span<const ParaphraseRecord> records,
                             const std::filesystem::path& path) {
  std::string out;
  for (const auto& r : records) out += r.to_json().dump() + "\n";
  atomic_write_file(path, out);
}

std::vector<ParaphraseRecord> load_paraphrase_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open paraphrase records: " + path.string());
  std::vector<ParaphraseRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      out.push_back(ParaphraseRecord::from_json(json::parse(line), lineno));
    } catch (const json::parse_error& e) {
      throw DataError(path.string() + ": line " + std::to_string(lineno) +
                      ": malformed record: " + e.what());
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::size_t count_words(const std::string& text) { return split_whitespace(text).size(); }

std::vector<EctViolation> validate_ect(const std::string& original, const std::string& candidate,
                                       int min_words, int max_words) {
  std::vector<EctViolation> out;
  const std::string_view c = trim(candidate);
  if (c.empty()) {
    out.push_back({EctViolation::Kind::kEmpty, "paraphrase is empty"});
    return out;
  }
  const auto words = static_cast<int>(count_words(std::string(c)));
  if (words < min_words) {
    out.push_back({EctViolation::Kind::kTooFewWords,
                   "word count " + std::to_string(words) + " is below the minimum of " +
                       std::to_string(min_words)});
  }
  if (words > max_words) {
    out.push_back({EctViolation::Kind::kTooManyWords,
                   "word count " + std::to_string(words) + " is above the maximum of " +
                       std::to_string(max_words)});
  }
  const NormPolicy en = NormPolicy::english();
  if (normalize_text(original, en) == normalize_text(std::string(c), en)) {
    out.push_back({EctViolation::Kind::kRepetition, "paraphrase repeats the original sentence"});
  }
  return out;
}

// ---------------------------------------------------------------------------

MockParaphraseBackend::MockParaphraseBackend(std::string prefix, EctBounds bounds)
    : prefix_(std::move(prefix)), bounds_(bounds) {}

std::string MockParaphraseBackend::do_complete(const CompletionRequest& request) {
  const auto prefix_words = split_whitespace(prefix_);
  const auto words = split_whitespace(request.source_text);
  const std::size_t room =
      static_cast<std::size_t>(std::max(0, bounds_.max_words)) > prefix_words.size()
          ? static_cast<std::size_t>(bounds_.max_words) - prefix_words.size()
          : 0;
  std::string out = prefix_;
  for (std::size_t i = 0; i < words.size() && i < room; ++i) out += " " + words[i];
  return out;
}

json build_chat_request(const CompletionRequest& request, const std::string& model) {
  json body = {{"model", model},
               {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
               {"temperature", request.params.temperature},
               {"top_p", request.params.top_p},
               {"max_tokens", request.params.max_tokens},
               {"frequency_penalty", request.params.frequency_penalty},
               {"presence_penalty", request.params.presence_penalty}};
  for (const auto& [k, v] : request.params.extra) body[k] = v;
  return body;
}

std::string parse_chat_response(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw BackendError(std::string("chat response is not JSON: ") + e.what());
  }
  if (j.contains("error")) {
    const json& err = j["error"];
    throw BackendError("chat API error: " +
                       (err.is_object() && err.contains("message") ? err["message"].dump()
                                                                   : err.dump()));
  }
  try {
    const json& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw BackendError("chat response content is not a string");
    return content.get<std::string>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("unexpected chat response shape: ") + e.what());
  }
}

HttpChatBackend::HttpChatBackend(HttpChatConfig config) : config_(std::move(config)) {}

std::string HttpChatBackend::do_complete(const CompletionRequest& request) {
  http::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
      headers.emplace_back("Authorization", std::string("Bearer ") + key);
    }
  }
  std::string url = config_.base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  url += "/chat/completions";
  const auto res = http::post(url, build_chat_request(request, config_.model).dump(),
                              "application/json", headers, config_.timeout_s);
  if (res.status < 200 || res.status >= 300) {
    throw BackendError("chat endpoint returned HTTP " + std::to_string(res.status) + ": " +
                       res.body.substr(0, 200));
  }
  return parse_chat_response(res.body);
}

CommandParaphraseBackend::CommandParaphraseBackend(std::string command, std::string model_id)
    : command_(std::move(command)), model_id_(std::move(model_id)) {
  if (trim(command_).empty()) throw ConfigError("paraphrase command is empty");
}

std::string CommandParaphraseBackend::do_complete(const CompletionRequest& request) {
  return http::run_command(command_, request.prompt);
}

// ---------------------------------------------------------------------------

std::string cache_key(const std::string& model_id, const std::string& prompt,
                      const GenerationParams& params) {
  const json j = {{"model", model_id}, {"prompt", prompt}, {"params", params.to_json()}};
  return sha256_hex(j.dump());
}

std::string params_fingerprint(const PromptTemplate& tmpl, const GenerationParams& params) {
  const json j = {{"template", tmpl.to_json()}, {"params", params.to_json()}};
  return sha256_hex(j.dump()).substr(0, 16);
}

ParaphraseCache::ParaphraseCache(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    // A torn final line from an interrupted writer is skipped.
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("key") || !j.contains("ect_text")) {
      continue;
    }
    entries_.emplace(j["key"].get<std::string>(),
                     CacheEntry{j["ect_text"].get<std::string>(), j.value("created_at", "")});
  }
}

std::optional<CacheEntry> ParaphraseCache::lookup(const std::string& key) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ParaphraseCache::insert(const std::string& key, const CacheEntry& entry) {
  std::unique_lock lock(mu_);
  if (!entries_.emplace(key, entry).second) return;
  if (path_.empty()) return;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw DataError("cannot append to paraphrase cache: " + path_.string());
  out << json{{"key", key}, {"ect_text", entry.ect_text}, {"created_at", entry.created_at}}.dump()
      << '\n';
}

std::size_t ParaphraseCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

// ---------------------------------------------------------------------------

namespace {

std::string join_reasons(const std::vector<EctViolation>& reasons) {
  std::string s;
  for (std::size_t i = 0; i < reasons.size(); ++i) s += (i ? "; " : "") + reasons[i].message;
  return s;
}

// Models like to quote their answer.
std::string clean_candidate(const std::string& raw) {
  std::string s(trim(raw));
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\''))) {
    s = std::string(trim(std::string_view(s).substr(1, s.size() - 2)));
  }
  return s;
}

}  // namespace

EctValidationError::EctValidationError(const std::string& source_id, std::string last_candidate,
                                       std::vector<EctViolation> reasons)
    : BackendError("no valid paraphrase for '" + source_id + "'; last candidate \"" +
                   last_candidate + "\" rejected: " + join_reasons(reasons)),
      source_id_(source_id),
      last_candidate_(std::move(last_candidate)),
      reasons_(std::move(reasons)) {}

ParaphraseRecord generate_ect(ParaphraseBackend& backend, const PromptTemplate& tmpl,
                              const GenerationParams& params, const Utterance& u,
                              ParaphraseCache* cache, const ParaphraseOptions& options,
                              int variant) {
  params.validate();
  std::string prompt = build_prompt(tmpl, u.text);
  if (variant > 0) {
    prompt += "\n\nThis is request " + std::to_string(variant + 1) +
              " for this sentence; use a wording different from earlier answers.";
  }
  const std::string key = cache_key(backend.model_id(), prompt, params);

  ParaphraseRecord rec;
  rec.source_id = u.id;
  rec.source_text = u.text;
  rec.backend_id = backend.model_id();
  rec.params_fingerprint = params_fingerprint(tmpl, params);
  rec.variant = variant;

  const int min_w = options.bounds.min_words, max_w = options.bounds.max_words;
  if (cache) {
    if (auto hit = cache->lookup(key)) {
      if (validate_ect(u.text, hit->ect_text, min_w, max_w).empty()) {
        rec.ect_text = hit->ect_text;
        rec.created_at = hit->created_at;
        return rec;
      }
    }
  }

  CompletionRequest req{prompt, params, u.text};
  std::string candidate;
  std::vector<EctViolation> reasons;
  const int attempts = std::max(1, options.validation_attempts);
  for (int v = 0; v < attempts; ++v) {
    if (v > 0) {
      req.prompt = prompt + "\n\nYour previous answer \"" + candidate +
                   "\" was rejected: " + join_reasons(reasons) +
                   ". Answer again and follow every rule.";
    }
    std::string raw;
    try {
      raw = with_retries(options.retries, options.backoff,
                         [&](int) { return backend.complete(req); });
    } catch (const std::exception& e) {
      throw BackendError("paraphrase backend failed for '" + u.id + "' after " +
                         std::to_string(options.retries + 1) + " attempts: " + e.what());
    }
    candidate = clean_candidate(raw);
    reasons = validate_ect(u.text, candidate, min_w, max_w);
    if (reasons.empty()) {
      rec.ect_text = candidate;
      const std::int64_t now = options.clock ? options.clock() : current_epoch_seconds();
      rec.created_at = format_utc(now);
      if (cache) cache->insert(key, {rec.ect_text, rec.created_at});
      return rec;
    }
  }
  throw EctValidationError(u.id, candidate, reasons);
}

std::vector<ParaphraseRecord> paraphrase_all(ParaphraseBackend& backend,
                                             const PromptTemplate& tmpl,
                                             const GenerationParams& params,
                                             std::span<const Utterance> utterances,
                                             ParaphraseCache* cache,
                                             const ParaphraseOptions& options) {
  const auto fan = static_cast<std::size_t>(std::max(1, options.paraphrases_per_source));
  std::vector<ParaphraseRecord> out(utterances.size() * fan);
  parallel_for(out.size(), options.workers, [&](std::size_t i) {
    out[i] = generate_ect(backend, tmpl, params, utterances[i / fan], cache, options,
                          static_cast<int>(i % fan));
  });
  return out;
}

}  // namespace easr
