// src/synth.cpp

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

#include "easr/synth.h"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <unordered_map>

#include "easr/errors.h"
#include "easr/util.h"
#include "http.h"

namespace easr {

namespace fs = std::filesystem;
using nlohmann::json;

SpeakerPool load_speaker_pool(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open speaker pool: " + path.string());
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  SpeakerPool pool;
  std::set<std::string> ids;
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
    for (const char* key : {"speaker_id", "gender", "reference_audio"}) {
      if (!j.contains(key) || !j[key].is_string()) {
        throw DataError(where + ": field `" + key + "` is missing");
      }
    }
    ReferenceSpeaker s;
    s.speaker_id = j["speaker_id"].get<std::string>();
    const std::string g = j["gender"].get<std::string>();
    if (g == "F") {
      s.gender = Gender::kFemale;
    } else if (g == "M") {
      s.gender = Gender::kMale;
    } else {
      throw DataError(where + ": field `gender` must be F or M");
    }
    fs::path ref = j["reference_audio"].get<std::string>();
    s.reference_audio = ref.is_absolute() ? ref : (base / ref).lexically_normal();
    if (j.contains("age") && !j["age"].is_null()) {
      if (!j["age"].is_number_integer()) throw DataError(where + ": field `age` must be an integer");
      s.age = j["age"].get<int>();
    }
    if (!ids.insert(s.speaker_id).second) {
      throw DataError(where + ": duplicate speaker_id '" + s.speaker_id + "'");
    }
    try {
      read_wav(s.reference_audio);
    } catch (const Error& e) {
      throw DataError(where + ": reference audio for '" + s.speaker_id +
                      "' is unusable: " + e.what());
    }
    pool.speakers.push_back(std::move(s));
  }
  return pool;
}

std::vector<Violation> check_pool_overlap(const SpeakerPool& pool, const Manifest& eval) {
  std::map<std::string, std::string> by_speaker, by_audio;
  for (const auto& u : eval.entries) {
    if (u.speaker_id) by_speaker.emplace(*u.speaker_id, u.id);
    by_audio.emplace(fs::absolute(resolve_audio_path(eval, u)).lexically_normal().string(), u.id);
  }
  std::vector<Violation> out;
  for (const auto& s : pool.speakers) {
    if (auto it = by_speaker.find(s.speaker_id); it != by_speaker.end()) {
      out.push_back({s.speaker_id, "pool-overlap",
                     "reference speaker also speaks evaluation entry '" + it->second + "'",
                     Violation::Severity::kWarning});
    }
    const std::string ref = fs::absolute(s.reference_audio).lexically_normal().string();
    if (auto it = by_audio.find(ref); it != by_audio.end()) {
      out.push_back({s.speaker_id, "pool-overlap",
                     "reference clip is the audio of evaluation entry '" + it->second + "'",
                     Violation::Severity::kWarning});
    }
  }
  return out;
}

GenderCounts gender_preset(const std::string& name) {
  static const std::map<std::string, GenderCounts> presets = {
      {"8F0M", {8, 0}}, {"6F2M", {6, 2}}, {"4F4M", {4, 4}}, {"2F6M", {2, 6}}, {"0F8M", {0, 8}}};
  auto it = presets.find(name);
  if (it == presets.end()) {
    throw ConfigError("unknown speaker preset '" + name +
                      "' (expected 8F0M, 6F2M, 4F4M, 2F6M or 0F8M)");
  }
  return it->second;
}

GenderCounts scale_preset(const GenderCounts& preset, int k) {
  if (k < 0) throw std::invalid_argument("scale_preset: k must be >= 0");
  const int total = preset.total();
  if (total == 0 || k == total) return k == total ? preset : GenderCounts{};
  const double f_exact = static_cast<double>(preset.female) * k / total;
  const double m_exact = static_cast<double>(preset.male) * k / total;
  GenderCounts out{static_cast<int>(std::floor(f_exact)), static_cast<int>(std::floor(m_exact))};
  const int left = k - out.total();
  if (left > 0) {
    const double rf = f_exact - out.female, rm = m_exact - out.male;
    if (left >= 2) {
      out.female += 1;
      out.male += 1;
    } else if (rf >= rm) {
      out.female += 1;
    } else {
      out.male += 1;
    }
  }
  return out;
}

SpeakerPool select_pool(const SpeakerPool& candidates, const GenderCounts& counts,
                        std::optional<std::string> preset_name) {
  SpeakerPool pool;
  pool.preset_name = std::move(preset_name);
  int need_f = counts.female, need_m = counts.male;
  std::vector<const ReferenceSpeaker*> female, male;
  for (const auto& s : candidates.speakers) {
    if (s.gender == Gender::kFemale && static_cast<int>(female.size()) < need_f) female.push_back(&s);
    if (s.gender == Gender::kMale && static_cast<int>(male.size()) < need_m) male.push_back(&s);
  }
  if (static_cast<int>(female.size()) < need_f || static_cast<int>(male.size()) < need_m) {
    throw DataError("speaker pool cannot satisfy " + std::to_string(need_f) + "F + " +
                    std::to_string(need_m) + "M (has " + std::to_string(female.size()) + "F, " +
                    std::to_string(male.size()) + "M usable)");
  }
  // Keep file order among the chosen speakers.
  for (const auto& s : candidates.speakers) {
    const bool chosen = std::find(female.begin(), female.end(), &s) != female.end() ||
                        std::find(male.begin(), male.end(), &s) != male.end();
    if (chosen) pool.speakers.push_back(s);
  }
  return pool;
}

int default_pool_size(double ratio) {
  if (ratio <= 0.1 + 1e-9) return 2;
  if (ratio <= 0.3 + 1e-9) return 4;
  return 8;
}

AssignmentPlan plan_assignments(std::size_t n, const SpeakerPool& pool, std::uint64_t seed) {
  AssignmentPlan plan;
  if (n == 0) return plan;
  const std::size_t k = pool.size();
  if (k == 0) throw DataError("plan_assignments: speaker pool is empty");
  Rng rng(seed);
  const auto start = static_cast<std::size_t>(rng.uniform_below(k));
  plan.assignments.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    plan.assignments.emplace_back(i, pool.speakers[(start + i) % k].speaker_id);
  }
  return plan;
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

AudioClip MockTtsBackend::do_synthesize(const TtsRequest& request) {
  const auto words = static_cast<double>(split_whitespace(request.text).size());
  const double seconds = options_.fixed_seconds
                             ? *options_.fixed_seconds
                             : std::max(options_.min_seconds, words * options_.seconds_per_word);
  AudioClip clip;
  clip.sample_rate = options_.sample_rate;
  clip.samples.assign(static_cast<std::size_t>(std::llround(seconds * clip.sample_rate)), 0.0f);
  if (options_.silence) return clip;
  const std::string sid = request.speaker ? request.speaker->speaker_id : "";
  const double f0 = 110.0 + static_cast<double>(fnv1a(sid) % 120);
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    const double t = static_cast<double>(i) / clip.sample_rate;
    const double v = 0.25 * std::sin(2.0 * std::numbers::pi * f0 * t) +
                     0.10 * std::sin(2.0 * std::numbers::pi * 2.0 * f0 * t);
    clip.samples[i] = static_cast<float>(v);
  }
  return clip;
}

HttpTtsBackend::HttpTtsBackend(HttpTtsConfig config) : config_(std::move(config)) {
  if (config_.url.empty()) throw ConfigError("TTS backend URL is empty");
  if (config_.mode != "upload" && config_.mode != "speaker_id") {
    throw ConfigError("TTS HTTP mode must be upload or speaker_id");
  }
}

AudioClip HttpTtsBackend::do_synthesize(const TtsRequest& request) {
  if (!request.speaker) throw BackendError("TTS request has no speaker");
  http::Response res;
  if (config_.mode == "upload") {
    std::vector<http::FormField> fields = {
        {"text", request.text, "", "text/plain; charset=utf-8"},
        {"speaker_id", request.speaker->speaker_id, "", "text/plain"},
        {"reference_audio", read_file(request.speaker->reference_audio),
         request.speaker->reference_audio.filename().string(), "audio/wav"}};
    res = http::post_multipart(config_.url, fields, {}, config_.timeout_s);
  } else {
    const json body = {{"text", request.text}, {"speaker_id", request.speaker->speaker_id}};
    res = http::post(config_.url, body.dump(), "application/json", {}, config_.timeout_s);
  }
  if (res.status < 200 || res.status >= 300) {
    throw BackendError("TTS endpoint returned HTTP " + std::to_string(res.status));
  }
  return decode_wav(res.body, "TTS response");
}

CommandTtsBackend::CommandTtsBackend(std::string command_template)
    : template_(std::move(command_template)) {
  if (template_.find("{out_wav}") == std::string::npos) {
    throw ConfigError("TTS command template must contain {out_wav}");
  }
}

std::string CommandTtsBackend::render(const std::string& text_file, const std::string& ref_audio,
                                      const std::string& out_wav,
                                      const std::string& speaker_id) const {
  const std::pair<const char*, std::string> subs[] = {
      {"{text_file}", http::shell_quote(text_file)},
      {"{ref_audio}", http::shell_quote(ref_audio)},
      {"{out_wav}", http::shell_quote(out_wav)},
      {"{speaker_id}", http::shell_quote(speaker_id)}};
  std::string out;
  for (std::size_t i = 0; i < template_.size();) {
    bool replaced = false;
    for (const auto& [key, value] : subs) {
      const std::size_t len = std::char_traits<char>::length(key);
      if (template_.compare(i, len, key) == 0) {
        out += value;
        i += len;
        replaced = true;
        break;
      }
    }
    if (!replaced) out += template_[i++];
  }
  return out;
}

AudioClip CommandTtsBackend::do_synthesize(const TtsRequest& request) {
  if (!request.speaker) throw BackendError("TTS request has no speaker");
  std::string dir_tmpl = (fs::temp_directory_path() / "easr-tts-XXXXXX").string();
  if (!::mkdtemp(dir_tmpl.data())) throw BackendError("cannot create temp dir for TTS command");
  const fs::path dir = dir_tmpl;
  struct Cleanup {
    fs::path p;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(p, ec);
    }
  } cleanup{dir};
  const fs::path text_file = dir / "text.txt";
  const fs::path out_wav = dir / "out.wav";
  {
    std::ofstream f(text_file, std::ios::binary);
    f << request.text;
  }
  http::run_command(render(text_file.string(), request.speaker->reference_audio.string(),
                           out_wav.string(), request.speaker->speaker_id),
                    "");
  if (!fs::exists(out_wav)) throw BackendError("TTS command produced no output file");
  return read_wav(out_wav);
}

// ---------------------------------------------------------------------------

std::string synthetic_id(const std::string& source_id, const std::string& speaker_id,
                         int variant) {
  const std::string tag = variant > 0 ? "~ect" + std::to_string(variant) + "~" : "~ect~";
  return source_id + tag + speaker_id;
}

namespace {

std::string file_stem_for(const std::string& id) {
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

Utterance make_synthetic(const std::string& text, const ReferenceSpeaker& speaker,
                         const fs::path& out_path, const std::string& source_id, int variant,
                         double duration) {
  Utterance u;
  u.id = synthetic_id(source_id, speaker.speaker_id, variant);
  u.audio_path = out_path.generic_string();
  u.text = text;
  u.origin = Origin::kSynthetic;
  u.source_id = source_id;
  u.speaker_id = speaker.speaker_id;
  u.gender = speaker.gender;
  u.age = speaker.age;
  u.duration_s = duration;
  return u;
}

Utterance synthesize_impl(TtsBackend& backend, const std::string& text,
                          const ReferenceSpeaker& speaker, const fs::path& out_path,
                          const std::string& source_id, int variant, const SynthOptions& options) {
  if (trim(text).empty()) throw DataError("synthesize_clip: empty text for '" + source_id + "'");
  AudioClip clip;
  try {
    clip = with_retries(options.retries, options.backoff, [&](int) {
      AudioClip c = backend.synthesize({text, &speaker});
      if (c.samples.empty()) throw BackendError("backend returned zero-length audio");
      if (c.sample_rate <= 0) throw BackendError("backend returned audio without a sample rate");
      for (float s : c.samples) {
        if (!std::isfinite(s)) throw BackendError("backend returned non-finite samples");
      }
      return c;
    });
  } catch (const std::exception& e) {
    throw BackendError("TTS failed for '" + source_id + "' after " +
                       std::to_string(options.retries + 1) + " attempts: " + e.what());
  }
  if (clip.sample_rate != kTargetSampleRate) clip = resample(clip, kTargetSampleRate);
  write_wav(clip, out_path);
  return make_synthetic(text, speaker, out_path, source_id, variant, clip.duration_s());
}

bool reusable_output(const fs::path& path, double* duration) {
  std::error_code ec;
  if (!fs::exists(path, ec)) return false;
  try {
    const WavInfo info = probe_wav(path);
    if (info.sample_rate != kTargetSampleRate || info.channels != 1 || info.frames == 0 ||
        info.is_float || info.bits_per_sample != 16) {
      return false;
    }
    *duration = info.duration_s();
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

Utterance synthesize_clip(TtsBackend& backend, const std::string& text,
                          const ReferenceSpeaker& speaker, const fs::path& out_path,
                          const std::string& source_id, const SynthOptions& options) {
  return synthesize_impl(backend, text, speaker, out_path, source_id, 0, options);
}

Manifest run_batch(TtsBackend& backend, std::span<const ParaphraseRecord> records,
                   const AssignmentPlan& plan, const SpeakerPool& pool, const fs::path& out_dir,
                   const SynthOptions& options) {
  if (records.size() != plan.size()) {
    throw DataError("run_batch: " + std::to_string(records.size()) + " records but " +
                    std::to_string(plan.size()) + " planned assignments");
  }
  std::unordered_map<std::string, const ReferenceSpeaker*> by_id;
  for (const auto& s : pool.speakers) by_id[s.speaker_id] = &s;
  std::vector<const ReferenceSpeaker*> speakers(records.size());
  for (const auto& [i, sid] : plan.assignments) {
    if (i >= records.size()) throw DataError("run_batch: assignment index out of range");
    auto it = by_id.find(sid);
    if (it == by_id.end()) throw DataError("run_batch: planned speaker '" + sid + "' not in pool");
    speakers[i] = it->second;
  }
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    if (!speakers[i]) throw DataError("run_batch: record " + std::to_string(i) + " has no speaker");
  }

  fs::create_directories(out_dir);
  const fs::path manifest_dir = options.manifest_dir.value_or(out_dir);
  const fs::path manifest_abs = fs::absolute(manifest_dir).lexically_normal();

  Manifest m;
  m.split = Split::kTrain;
  m.base_dir = manifest_dir;
  m.entries.resize(records.size());
  parallel_for(records.size(), options.workers, [&](std::size_t i) {
    const auto& rec = records[i];
    const ReferenceSpeaker& spk = *speakers[i];
    const std::string id = synthetic_id(rec.source_id, spk.speaker_id, rec.variant);
    const fs::path out = out_dir / (file_stem_for(id) + ".wav");
    Utterance u;
    double duration = 0.0;
    try {
      if (reusable_output(out, &duration)) {
        u = make_synthetic(rec.ect_text, spk, out, rec.source_id, rec.variant, duration);
      } else {
        u = synthesize_impl(backend, rec.ect_text, spk, out, rec.source_id, rec.variant, options);
      }
    } catch (const BackendError& e) {
      throw BackendError("record '" + rec.source_id + "': " + e.what());
    } catch (const Error& e) {
      throw DataError("record '" + rec.source_id + "': " + e.what());
    }
    u.audio_path = fs::absolute(out).lexically_normal().lexically_relative(manifest_abs).generic_string();
    m.entries[i] = std::move(u);
  });
  return m;
}

}  // namespace easr
