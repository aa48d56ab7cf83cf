// src/toy.cpp

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

#include "easr/toy.h"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "easr/dsp.h"
#include "easr/util.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace easr {

namespace {

const std::vector<std::string> kSubjects = {
    "my knee", "the doctor", "my daughter", "the nurse", "my husband",
    "the pharmacist", "my grandson", "the neighbor", "my wife", "the bus driver"};
const std::vector<std::string> kVerbs = {
    "said", "told me", "asked whether", "reminded me that", "called because"};
const std::vector<std::string> kClauses = {
    "the blood pressure medicine is ready",
    "lunch will be served at noon",
    "the weather is cold this morning",
    "my appointment was moved to friday",
    "the television remote is broken again",
    "we should walk in the park today",
    "the glasses are on the kitchen table",
    "the hearing aid needs new batteries"};

AudioClip tone(double freq, double seconds, Rng& rng) {
  AudioClip c;
  c.sample_rate = kTargetSampleRate;
  const std::size_t n = static_cast<std::size_t>(std::lround(seconds * c.sample_rate));
  c.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / c.sample_rate;
    c.samples[i] = static_cast<float>(0.3 * std::sin(2.0 * M_PI * freq * t) +
                                      0.01 * (rng.uniform_real() - 0.5));
  }
  return c;
}

void write_lines(const fs::path& path, const std::vector<json>& lines) {
  std::string text;
  for (const auto& j : lines) text += j.dump() + "\n";
  atomic_write_file(path, text);
}

}  // namespace

void write_toy_corpus(const fs::path& dir, const ToyCorpusOptions& options) {
  const fs::path root = fs::absolute(dir);
  fs::create_directories(root / "wav");
  fs::create_directories(root / "ref");
  Rng rng(options.seed);

  auto make_split = [&](const std::string& name, int n) {
    std::vector<json> lines;
    for (int i = 0; i < n; ++i) {
      const int spk = static_cast<int>(rng.uniform_below(options.n_speakers));
      const std::string text = kSubjects[rng.uniform_below(kSubjects.size())] + " " +
                               kVerbs[rng.uniform_below(kVerbs.size())] + " " +
                               kClauses[rng.uniform_below(kClauses.size())];
      char id[32];
      std::snprintf(id, sizeof(id), "%s_%04d", name.c_str(), i);
      const std::string wav = "wav/" + std::string(id) + ".wav";
      const auto clip = tone(150.0 + 10.0 * spk, options.seconds, rng);
      write_wav(clip, root / wav);
      char sid[16];
      std::snprintf(sid, sizeof(sid), "spk%02d", spk);
      lines.push_back({{"id", id},
                       {"audio_path", wav},
                       {"text", text},
                       {"origin", "original"},
                       {"speaker_id", sid},
                       {"age", 70 + static_cast<int>(rng.uniform_below(26))},
                       {"gender", spk % 2 ? "M" : "F"},
                       {"lang", "en"},
                       {"duration_s", clip.duration_s()}});
    }
    write_lines(root / (name + ".jsonl"), lines);
  };
  make_split("train", options.n_train);
  make_split("test", options.n_test);

  std::vector<json> pool;
  for (int i = 0; i < 16; ++i) {
    const bool female = i < 8;
    char sid[16];
    std::snprintf(sid, sizeof(sid), "ref%c%d", female ? 'F' : 'M', i % 8);
    const std::string wav = "ref/" + std::string(sid) + ".wav";
    write_wav(tone(female ? 220.0 + 15.0 * i : 110.0 + 10.0 * i, 1.0, rng), root / wav);
    pool.push_back({{"speaker_id", sid},
                    {"gender", female ? "F" : "M"},
                    {"reference_audio", wav},
                    {"age", 70 + 2 * i}});
  }
  write_lines(root / "speakers.jsonl", pool);

  atomic_write_file(root / "run.yaml",
                      "dataset:\n"
                      "  train_manifest: train.jsonl\n"
                      "  out_dir: out\n"
                      "seed: 13\n"
                      "augment:\n"
                      "  method: ect\n"
                      "  ratio: 1.0\n"
                      "  pool_preset: 4F4M\n"
                      "paraphrase:\n"
                      "  backend: mock\n"
                      "synth:\n"
                      "  backend: mock\n"
                      "  pool_file: speakers.jsonl\n");
}

}  // namespace easr
