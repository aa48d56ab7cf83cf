// src/pipeline.cpp

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

#include "easr/pipeline.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <unordered_map>

#include "easr/errors.h"
#include "easr/util.h"
#include "yaml-cpp/yaml.h"

namespace easr {

namespace fs = std::filesystem;
using nlohmann::json;

Ordering parse_ordering(const std::string& s) {
  if (s == "append") return Ordering::kAppend;
  if (s == "interleave") return Ordering::kInterleave;
  throw ConfigError("unknown ordering '" + s + "' (expected append|interleave)");
}

std::string to_string(Ordering o) { return o == Ordering::kAppend ? "append" : "interleave"; }

void AugmentConfig::validate() const {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw ConfigError("augmentation ratio must be in (0, 1], got " + std::to_string(ratio));
  }
  if (pool_size_override && *pool_size_override < 1) {
    throw ConfigError("pool size override must be >= 1");
  }
}

int AugmentConfig::pool_size() const {
  return pool_size_override ? *pool_size_override : default_pool_size(ratio);
}

std::size_t augment_count(std::size_t n, double ratio) {
  return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
}

std::vector<Utterance> select_for_augmentation(const Manifest& m, double ratio,
                                               std::uint64_t seed) {
  if (m.split != Split::kTrain) {
    throw DataError("select_for_augmentation: manifest split is '" + to_string(m.split) +
                    "', expected train");
  }
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw std::invalid_argument("select_for_augmentation: ratio must be in (0, 1]");
  }
  if (m.empty()) throw DataError("select_for_augmentation: manifest is empty");
  const std::size_t n = m.size();
  const std::size_t k = augment_count(n, ratio);
  if (k >= n) return m.entries;
  // Partial Fisher-Yates over indices, then restore manifest order.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  std::vector<Utterance> out;
  out.reserve(k);
  for (std::size_t i : idx) out.push_back(m.entries[i]);
  return out;
}

AugmentedSet build_augmented_set(std::span<const Utterance> selected, ParaphraseStage& paraphrase,
                                 SynthStage& synth, const AugmentConfig& config) {
  config.validate();
  AugmentedSet out;
  out.records = paraphrase_all(paraphrase.backend, paraphrase.tmpl, paraphrase.params, selected,
                               paraphrase.cache, paraphrase.options);
  out.plan = plan_assignments(out.records.size(), synth.pool, config.seed);
  out.d_aug = run_batch(synth.backend, out.records, out.plan, synth.pool, synth.audio_dir,
                        synth.options);
  std::unordered_map<std::string, const Utterance*> by_id;
  for (const auto& u : selected) by_id[u.id] = &u;
  for (auto& u : out.d_aug.entries) {
    if (auto it = by_id.find(*u.source_id); it != by_id.end()) u.lang = it->second->lang;
  }
  return out;
}

Manifest merge_train_set(const Manifest& orig, const Manifest& aug, Ordering ordering) {
  std::unordered_map<std::string, const Utterance*> ids;
  for (const auto& u : orig.entries) ids.emplace(u.id, &u);
  for (const auto& u : aug.entries) {
    if (auto it = ids.find(u.id); it != ids.end()) {
      throw DataError("merge: id '" + u.id + "' appears in both inputs (original audio " +
                      it->second->audio_path + ", augmented audio " + u.audio_path + ")");
    }
  }
  Manifest out;
  out.split = orig.split;
  out.base_dir = orig.base_dir;
  out.entries.reserve(orig.size() + aug.size());
  auto rebased = [&](Utterance u) {
    u.audio_path = rebase_audio_path(u.audio_path, aug.base_dir, orig.base_dir);
    if (auto it = u.extra.find("features_path"); it != u.extra.end() && it->is_string()) {
      *it = rebase_audio_path(it->get<std::string>(), aug.base_dir, orig.base_dir);
    }
    return u;
  };
  if (ordering == Ordering::kAppend) {
    out.entries = orig.entries;
    for (const auto& u : aug.entries) out.entries.push_back(rebased(u));
  } else {
    const std::size_t n = std::max(orig.size(), aug.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (i < orig.size()) out.entries.push_back(orig.entries[i]);
      if (i < aug.size()) out.entries.push_back(rebased(aug.entries[i]));
    }
  }
  return out;
}

std::vector<Violation> check_lineage(const Manifest& m) {
  std::unordered_map<std::string, std::size_t> originals;
  for (const auto& u : m.entries) {
    if (!u.is_synthetic()) ++originals[u.id];
  }
  std::vector<Violation> out;
  for (const auto& u : m.entries) {
    if (!u.is_synthetic()) continue;
    if (!u.source_id) {
      out.push_back({u.id, "lineage", "synthetic entry has no source_id"});
      continue;
    }
    auto it = originals.find(*u.source_id);
    if (it == originals.end() || it->second != 1) {
      out.push_back({u.id, "lineage",
                     "source_id '" + *u.source_id + "' does not resolve to exactly one original"});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Baselines.

namespace {

std::string stem_for(const std::string& id) {
  std::string s;
  bool changed = false;
  for (char c : id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' ||
                    c == '-' || c == '~';
    s += ok ? c : '_';
    changed |= !ok;
  }
  if (changed) s += "_" + sha256_hex(id).substr(0, 8);
  return s;
}

std::string relative_to(const fs::path& p, const fs::path& dir) {
  return fs::absolute(p).lexically_normal()
      .lexically_relative(fs::absolute(dir).lexically_normal())
      .generic_string();
}

std::string factor_label(double f) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", f);
  return buf;
}

Utterance derived_from(const Utterance& src, std::string id) {
  Utterance u = src;
  u.id = std::move(id);
  u.origin = Origin::kSynthetic;
  u.source_id = src.id;
  u.extra = json::object();
  return u;
}

AudioClip load_16k(const Manifest& source, const Utterance& u) {
  AudioClip clip = read_wav(resolve_audio_path(source, u));
  if (clip.sample_rate != kTargetSampleRate) clip = resample(clip, kTargetSampleRate);
  return clip;
}

}  // namespace

Manifest build_speed_perturbed_set(const Manifest& source, std::span<const Utterance> selected,
                                   const std::vector<double>& factors, const fs::path& audio_dir,
                                   const fs::path& manifest_dir, int workers) {
  if (factors.empty()) throw ConfigError("speed perturbation needs at least one factor");
  for (double f : factors) {
    if (!(f >= kMinSpeedFactor && f <= kMaxSpeedFactor) || f == 1.0) {
      throw ConfigError("speed factor " + factor_label(f) + " must be in [0.5, 2] and != 1");
    }
  }
  fs::create_directories(audio_dir);
  Manifest m;
  m.split = Split::kTrain;
  m.base_dir = manifest_dir;
  m.entries.resize(selected.size());
  parallel_for(selected.size(), workers, [&](std::size_t i) {
    const Utterance& src = selected[i];
    const double f = factors[i % factors.size()];
    Utterance u = derived_from(src, src.id + "~sp" + factor_label(f));
    const fs::path out = audio_dir / (stem_for(u.id) + ".wav");
    const AudioClip clip = speed_perturb(load_16k(source, src), f);
    write_wav(clip, out);
    u.audio_path = relative_to(out, manifest_dir);
    u.duration_s = clip.duration_s();
    m.entries[i] = std::move(u);
  });
  return m;
}

Manifest build_spec_augmented_set(const Manifest& source, std::span<const Utterance> selected,
                                  const SpecAugmentExport& options, const fs::path& feature_dir,
                                  const fs::path& manifest_dir, int workers) {
  fs::create_directories(feature_dir);
  Manifest m;
  m.split = Split::kTrain;
  m.base_dir = manifest_dir;
  m.entries.resize(selected.size());
  parallel_for(selected.size(), workers, [&](std::size_t i) {
    const Utterance& src = selected[i];
    Utterance u = derived_from(src, src.id + "~specaug");
    MaskPolicy policy = options.policy;
    policy.seed ^= std::stoull(sha256_hex(src.id).substr(0, 16), nullptr, 16);
    const AudioClip clip = load_16k(source, src);
    const MelSpectrogram masked = spec_augment(log_mel(clip, options.n_mels), policy);
    const fs::path feat = feature_dir / (stem_for(u.id) + ".feat");
    write_features(masked, feat, kFeatureFlagMasked);
    u.extra["features_path"] = relative_to(feat, manifest_dir);
    if (options.waveform_masking) {
      const fs::path wav = feature_dir / (stem_for(u.id) + ".wav");
      write_wav(mask_waveform_time(clip, policy), wav);
      u.audio_path = relative_to(wav, manifest_dir);
    } else {
      u.audio_path = rebase_audio_path(src.audio_path, source.base_dir, manifest_dir);
    }
    u.duration_s = clip.duration_s();
    m.entries[i] = std::move(u);
  });
  return m;
}

// ---------------------------------------------------------------------------
// Configured runs.

json RunRecord::to_json() const {
  return {{"config", config},
          {"input_manifest_sha256", input_manifest_sha256},
          {"output_sha256", output_sha256},
          {"timings_ms", timings_ms},
          {"backend_calls", backend_calls},
          {"counts", counts}};
}

std::unique_ptr<ParaphraseBackend> make_paraphrase_backend(const PipelineConfig& cfg, bool mock) {
  const auto& p = cfg.paraphrase;
  if (mock || p.backend == "mock") {
    return std::make_unique<MockParaphraseBackend>("As we used to say,", p.options.bounds);
  }
  if (p.backend == "http") {
    return std::make_unique<HttpChatBackend>(
        HttpChatConfig{p.base_url, p.model, p.api_key_env, p.timeout_s});
  }
  if (p.backend == "command") return std::make_unique<CommandParaphraseBackend>(p.command, p.model);
  throw ConfigError("paraphrase.backend: unknown backend '" + p.backend +
                    "' (expected mock|http|command)");
}

std::unique_ptr<TtsBackend> make_tts_backend(const PipelineConfig& cfg, bool mock) {
  const auto& s = cfg.synth;
  if (mock || s.backend == "mock") {
    MockTtsBackend::Options o;
    o.sample_rate = s.mock_sample_rate;
    return std::make_unique<MockTtsBackend>(o);
  }
  if (s.backend == "http") return std::make_unique<HttpTtsBackend>(HttpTtsConfig{s.url, s.mode, s.timeout_s});
  if (s.backend == "command") return std::make_unique<CommandTtsBackend>(s.command);
  throw ConfigError("synth.backend: unknown backend '" + s.backend +
                    "' (expected mock|http|command)");
}

SpeakerPool resolve_pool(const PipelineConfig& cfg) {
  if (cfg.synth.pool_file.empty()) throw ConfigError("synth.pool_file is required");
  const SpeakerPool all = load_speaker_pool(cfg.synth.pool_file);
  const GenderCounts preset = gender_preset(cfg.augment.pool_preset);
  const GenderCounts want = scale_preset(preset, cfg.augment.pool_size());
  return select_pool(all, want, cfg.augment.pool_preset);
}

namespace {

class Stopwatch {
 public:
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

RunOutputs run_augmentation(const PipelineConfig& cfg, bool mock_backends) {
  cfg.augment.validate();
  if (cfg.train_manifest.empty()) throw ConfigError("dataset.train_manifest is required");
  if (cfg.out_dir.empty()) throw ConfigError("dataset.out_dir is required");

  RunOutputs out;
  const fs::path dir = cfg.out_dir;
  fs::create_directories(dir);
  out.d_aug = dir / "d_aug.jsonl";
  out.d_train = dir / "d_train.jsonl";
  out.run_record = dir / "run_record.json";
  // Stale results from an earlier run must not pass for this run's output.
  for (const auto& p : {out.d_aug, out.d_train, out.run_record}) fs::remove(p);

  RunRecord& rec = out.record;
  rec.config = cfg.effective;
  Stopwatch sw;

  const Manifest orig = load_manifest(cfg.train_manifest, Split::kTrain);
  rec.input_manifest_sha256 = sha256_file(cfg.train_manifest);
  const auto selected = select_for_augmentation(orig, cfg.augment.ratio, cfg.augment.seed);
  rec.timings_ms["select"] = sw.lap_ms();

  Manifest aug;
  if (cfg.method == "ect") {
    const SpeakerPool pool = resolve_pool(cfg);
    auto llm = make_paraphrase_backend(cfg, mock_backends);
    auto tts = make_tts_backend(cfg, mock_backends);
    ParaphraseCache cache(cfg.cache_path.value_or(dir / "cache" / "paraphrase_cache.jsonl"));
    ParaphraseStage ps{*llm, cfg.paraphrase.tmpl.value_or(PromptTemplate::standard()),
                       cfg.paraphrase.params, &cache, cfg.paraphrase.options};
    SynthOptions so = cfg.synth.options;
    so.manifest_dir = dir;
    SynthStage ss{*tts, pool, dir / "audio", so};

    ps.options.workers = ps.options.workers ? ps.options.workers : cfg.workers;
    ss.options.workers = ss.options.workers ? ss.options.workers : cfg.workers;
    auto records = paraphrase_all(ps.backend, ps.tmpl, ps.params, selected, ps.cache, ps.options);
    rec.timings_ms["paraphrase"] = sw.lap_ms();
    const AssignmentPlan plan = plan_assignments(records.size(), pool, cfg.augment.seed);
    aug = run_batch(ss.backend, records, plan, pool, ss.audio_dir, ss.options);
    std::unordered_map<std::string, const Utterance*> by_id;
    for (const auto& u : selected) by_id[u.id] = &u;
    for (auto& u : aug.entries) u.lang = by_id.at(*u.source_id)->lang;
    rec.timings_ms["synth"] = sw.lap_ms();

    out.paraphrases = dir / "paraphrases.jsonl";
    save_paraphrase_records(records, out.paraphrases);
    rec.backend_calls["llm"] = llm->call_count();
    rec.backend_calls["tts"] = tts->call_count();
    rec.counts["pool_size"] = pool.size();
  } else if (cfg.method == "speed") {
    aug = build_speed_perturbed_set(orig, selected, cfg.baseline.speed_factors, dir / "audio", dir,
                                    cfg.workers);
    rec.timings_ms["speed_perturb"] = sw.lap_ms();
  } else if (cfg.method == "specaugment") {
    aug = build_spec_augmented_set(orig, selected, cfg.baseline.spec, dir / "features", dir,
                                   cfg.workers);
    rec.timings_ms["spec_augment"] = sw.lap_ms();
  } else {
    throw ConfigError("augment.method: unknown method '" + cfg.method +
                      "' (expected ect|speed|specaugment)");
  }
  aug.base_dir = dir;

  const Manifest train = merge_train_set(orig, aug, cfg.augment.ordering);
  if (auto v = check_lineage(train); !v.empty()) {
    throw DataError("lineage check failed for '" + v.front().id + "': " + v.front().message);
  }
  save_manifest(aug, out.d_aug);
  save_manifest(train, out.d_train);
  rec.timings_ms["merge"] = sw.lap_ms();

  rec.counts["original"] = orig.size();
  rec.counts["selected"] = selected.size();
  rec.counts["d_aug"] = aug.size();
  rec.counts["d_train"] = train.size();
  rec.output_sha256["d_aug"] = sha256_file(out.d_aug);
  rec.output_sha256["d_train"] = sha256_file(out.d_train);
  if (!out.paraphrases.empty()) rec.output_sha256["paraphrases"] = sha256_file(out.paraphrases);
  atomic_write_file(out.run_record, rec.to_json().dump(2) + "\n");
  return out;
}

// ---------------------------------------------------------------------------
// Config loading.

namespace {

json yaml_to_json(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Sequence: {
      json a = json::array();
      for (const auto& c : n) a.push_back(yaml_to_json(c));
      return a;
    }
    case YAML::NodeType::Map: {
      json o = json::object();
      for (const auto& kv : n) o[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return o;
    }
    case YAML::NodeType::Scalar:
      break;
  }
  const std::string s = n.Scalar();
  if (n.Tag() == "!") return s;  // quoted
  if (s == "~" || s == "null") return nullptr;
  if (s == "true" || s == "True") return true;
  if (s == "false" || s == "False") return false;
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  return s;
}

json parse_yaml(const std::string& text, const std::string& name) {
  try {
    return yaml_to_json(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(name + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
}

void apply_override(json& doc, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + spec + "' is not of the form key=value");
  }
  const std::string key = spec.substr(0, eq);
  json value = parse_yaml(spec.substr(eq + 1), "override " + key);
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) throw ConfigError("override '" + spec + "' has an empty key segment");
    if (!node->is_object()) *node = json::object();
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = std::move(value);
}

// Typed access that remembers which keys were read, so leftovers can be
// reported as unknown.
class Reader {
 public:
  explicit Reader(const json& doc) : doc_(doc) {}

  const json* find(const std::string& path) {
    const json* node = &doc_;
    std::size_t start = 0;
    while (true) {
      const auto dot = path.find('.', start);
      const std::string part = path.substr(start, dot == std::string::npos ? dot : dot - start);
      if (!node->is_object() || !node->contains(part)) return nullptr;
      node = &(*node)[part];
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    used_.insert(path);
    return node->is_null() ? nullptr : node;
  }

  template <typename T>
  void get(const std::string& path, T& out) {
    const json* v = find(path);
    if (!v) return;
    try {
      if constexpr (std::is_same_v<T, std::string>) {
        if (!v->is_string()) throw std::runtime_error("expected a string");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v->is_boolean()) throw std::runtime_error("expected true or false");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v->is_number_integer()) throw std::runtime_error("expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (v->get<long long>() < 0) throw std::runtime_error("expected a non-negative integer");
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v->is_number()) throw std::runtime_error("expected a number");
      }
      out = v->get<T>();
    } catch (const std::exception& e) {
      throw ConfigError("config key '" + path + "': " + e.what() + ", got " + v->dump());
    }
  }

  // Every leaf (or subtree) present but never read.
  std::vector<std::string> unused() const {
    std::vector<std::string> out;
    walk(doc_, "", out);
    return out;
  }

 private:
  void walk(const json& node, const std::string& prefix, std::vector<std::string>& out) const {
    for (auto it = node.begin(); it != node.end(); ++it) {
      const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
      if (used_.count(path)) continue;
      if (it->is_object() && !it->empty()) {
        walk(*it, path, out);
      } else {
        out.push_back(path);
      }
    }
  }

  const json& doc_;
  std::set<std::string> used_;
};

std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

MaskValue parse_mask_value(const std::string& s) {
  if (s == "log_floor") return MaskValue::kLogFloor;
  if (s == "mean") return MaskValue::kUtteranceMean;
  throw ConfigError("baseline.spec_augment.mask_value: expected log_floor|mean, got '" + s + "'");
}

}  // namespace

PipelineConfig pipeline_config_from_json(json doc, const fs::path& config_dir,
                                         const std::vector<std::string>& overrides) {
  if (doc.is_null()) doc = json::object();
  if (!doc.is_object()) throw ConfigError("config root must be a mapping");
  for (const auto& o : overrides) apply_override(doc, o);

  PipelineConfig cfg;
  cfg.config_dir = config_dir;
  Reader r(doc);
  std::string s;

  if (r.find("dataset.train_manifest")) {
    r.get("dataset.train_manifest", s);
    cfg.train_manifest = resolve_path(config_dir, s);
  }
  if (r.find("dataset.out_dir")) {
    r.get("dataset.out_dir", s);
    cfg.out_dir = resolve_path(config_dir, s);
  }
  if (r.find("dataset.cache")) {
    r.get("dataset.cache", s);
    cfg.cache_path = resolve_path(config_dir, s);
  }
  r.get("workers", cfg.workers);
  if (cfg.workers < 0) throw ConfigError("workers must be >= 0 (0 = hardware concurrency)");
  r.get("seed", cfg.augment.seed);

  auto& a = cfg.augment;
  r.get("augment.method", cfg.method);
  r.get("augment.ratio", a.ratio);
  r.get("augment.pool_preset", a.pool_preset);
  if (r.find("augment.pool_size")) {
    int k = 0;
    r.get("augment.pool_size", k);
    a.pool_size_override = k;
  }
  r.get("augment.llm_profile", a.llm_profile);
  if (r.find("augment.ordering")) {
    r.get("augment.ordering", s);
    a.ordering = parse_ordering(s);
  }

  auto& p = cfg.paraphrase;
  r.get("paraphrase.backend", p.backend);
  r.get("paraphrase.model", p.model);
  r.get("paraphrase.base_url", p.base_url);
  r.get("paraphrase.api_key_env", p.api_key_env);
  r.get("paraphrase.command", p.command);
  r.get("paraphrase.timeout_s", p.timeout_s);
  p.params = generation_profile(a.llm_profile);
  r.get("paraphrase.params.temperature", p.params.temperature);
  r.get("paraphrase.params.top_p", p.params.top_p);
  r.get("paraphrase.params.frequency_penalty", p.params.frequency_penalty);
  r.get("paraphrase.params.presence_penalty", p.params.presence_penalty);
  r.get("paraphrase.params.max_tokens", p.params.max_tokens);
  if (const json* extra = r.find("paraphrase.params.extra")) {
    if (!extra->is_object()) throw ConfigError("paraphrase.params.extra must be a mapping");
    for (auto it = extra->begin(); it != extra->end(); ++it) {
      p.params.extra[it.key()] = it->is_string() ? it->get<std::string>() : it->dump();
    }
  }
  p.params.validate();
  if (const json* t = r.find("paraphrase.template")) p.tmpl = PromptTemplate::from_json(*t);
  auto& po = p.options;
  r.get("paraphrase.min_words", po.bounds.min_words);
  r.get("paraphrase.max_words", po.bounds.max_words);
  r.get("paraphrase.validation_attempts", po.validation_attempts);
  r.get("paraphrase.retries", po.retries);
  int backoff_ms = static_cast<int>(po.backoff.count());
  r.get("paraphrase.backoff_ms", backoff_ms);
  po.backoff = std::chrono::milliseconds(backoff_ms);
  r.get("paraphrase.paraphrases_per_source", po.paraphrases_per_source);
  r.get("paraphrase.workers", po.workers);
  if (po.bounds.min_words < 1 || po.bounds.max_words < po.bounds.min_words) {
    throw ConfigError("paraphrase word bounds must satisfy 1 <= min_words <= max_words");
  }
  if (po.validation_attempts < 1 || po.retries < 0 || po.paraphrases_per_source < 1) {
    throw ConfigError(
        "paraphrase: validation_attempts and paraphrases_per_source must be >= 1, retries >= 0");
  }

  auto& sy = cfg.synth;
  r.get("synth.backend", sy.backend);
  if (r.find("synth.pool_file")) {
    r.get("synth.pool_file", s);
    sy.pool_file = resolve_path(config_dir, s);
  }
  r.get("synth.url", sy.url);
  r.get("synth.mode", sy.mode);
  r.get("synth.command", sy.command);
  r.get("synth.timeout_s", sy.timeout_s);
  r.get("synth.mock_sample_rate", sy.mock_sample_rate);
  r.get("synth.retries", sy.options.retries);
  backoff_ms = static_cast<int>(sy.options.backoff.count());
  r.get("synth.backoff_ms", backoff_ms);
  sy.options.backoff = std::chrono::milliseconds(backoff_ms);
  r.get("synth.workers", sy.options.workers);
  if (po.workers < 0 || sy.options.workers < 0 || po.retries < 0 || sy.options.retries < 0 ||
      backoff_ms < 0 || po.backoff.count() < 0) {
    throw ConfigError("worker counts, retries and backoff_ms must be >= 0");
  }
  if (sy.mode != "upload" && sy.mode != "speaker_id") {
    throw ConfigError("synth.mode: expected upload|speaker_id, got '" + sy.mode + "'");
  }
  if (sy.mock_sample_rate < 8000) throw ConfigError("synth.mock_sample_rate must be >= 8000");

  auto& b = cfg.baseline;
  if (r.find("baseline.speed_factors")) r.get("baseline.speed_factors", b.speed_factors);
  auto& mp = b.spec.policy;
  r.get("baseline.spec_augment.freq_mask_param", mp.freq_mask_param);
  r.get("baseline.spec_augment.n_freq_masks", mp.n_freq_masks);
  r.get("baseline.spec_augment.time_mask_param", mp.time_mask_param);
  r.get("baseline.spec_augment.n_time_masks", mp.n_time_masks);
  if (r.find("baseline.spec_augment.mask_value")) {
    r.get("baseline.spec_augment.mask_value", s);
    mp.mask_value = parse_mask_value(s);
  }
  r.get("baseline.spec_augment.n_mels", b.spec.n_mels);
  r.get("baseline.spec_augment.waveform_masking", b.spec.waveform_masking);
  mp.seed = a.seed;

  if (const auto unknown = r.unused(); !unknown.empty()) {
    throw ConfigError("unknown config key '" + unknown.front() + "'");
  }
  a.tts_backend = sy.backend;
  a.validate();

  cfg.effective = doc;
  cfg.effective["seed"] = a.seed;
  cfg.effective["augment"]["method"] = cfg.method;
  cfg.effective["augment"]["ratio"] = a.ratio;
  cfg.effective["augment"]["pool_preset"] = a.pool_preset;
  cfg.effective["augment"]["pool_size"] = a.pool_size();
  cfg.effective["augment"]["ordering"] = to_string(a.ordering);
  cfg.effective["augment"]["llm_profile"] = a.llm_profile;
  cfg.effective["paraphrase"]["backend"] = p.backend;
  cfg.effective["paraphrase"]["params"] = p.params.to_json();
  cfg.effective["paraphrase"]["template"] = p.tmpl.value_or(PromptTemplate::standard()).to_json();
  cfg.effective["synth"]["backend"] = sy.backend;
  return cfg;
}

PipelineConfig load_pipeline_config(const fs::path& path, const std::vector<std::string>& overrides) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  json doc = parse_yaml(text, path.string());
  const fs::path dir = fs::absolute(path).parent_path();
  return pipeline_config_from_json(std::move(doc), dir, overrides);
}

}  // namespace easr
