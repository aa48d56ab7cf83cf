// tests/test_pipeline.cpp

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

#include <algorithm>
#include <set>

#include "doctest.h"
#include "easr/errors.h"
#include "easr/pipeline.h"
#include "easr/toy.h"
#include "easr/util.h"
#include "test_support.h"

using namespace easr;
using easr::testing::TempDir;
using easr::testing::write_text;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

Manifest numbered(std::size_t n, const fs::path& base = "/data") {
  Manifest m;
  m.split = Split::kTrain;
  m.base_dir = base;
  for (std::size_t i = 0; i < n; ++i) {
    Utterance u;
    u.id = "o" + std::to_string(i);
    u.audio_path = "wav/" + u.id + ".wav";
    u.text = "transcript number " + std::to_string(i);
    m.entries.push_back(u);
  }
  return m;
}

Utterance synth_of(const std::string& src, const std::string& spk) {
  Utterance u;
  u.id = synthetic_id(src, spk);
  u.audio_path = "audio/" + u.id + ".wav";
  u.text = "paraphrase";
  u.origin = Origin::kSynthetic;
  u.source_id = src;
  return u;
}

PipelineConfig toy_config(const fs::path& root, const std::vector<std::string>& sets = {}) {
  return load_pipeline_config(root / "run.yaml", sets);
}

}  // namespace

TEST_CASE("augment_count rounds halves away from zero") {
  CHECK(augment_count(200, 0.1) == 20);
  CHECK(augment_count(200, 0.3) == 60);
  CHECK(augment_count(5, 0.5) == 3);
  CHECK(augment_count(3, 0.5) == 2);
  CHECK(augment_count(7, 1.0) == 7);
  CHECK(augment_count(1, 0.01) == 0);
}

TEST_CASE("ratio validation and pool size") {
  AugmentConfig c;
  for (double r : {0.0, -0.1, 1.01}) {
    c.ratio = r;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
  c.ratio = 0.1;
  CHECK(c.pool_size() == 2);
  c.ratio = 0.5;
  CHECK(c.pool_size() == 8);
  c.pool_size_override = 3;
  CHECK(c.pool_size() == 3);
  c.pool_size_override = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("selection draws round(rN) distinct entries in manifest order") {
  const Manifest m = numbered(200);
  for (double r : {0.1, 0.3, 0.5, 0.7, 1.0}) {
    const auto sel = select_for_augmentation(m, r, 42);
    CHECK(sel.size() == augment_count(200, r));
    std::set<std::string> ids;
    std::size_t last = 0;
    bool first = true;
    for (const auto& u : sel) {
      ids.insert(u.id);
      const std::size_t k = std::stoul(u.id.substr(1));
      if (!first) CHECK(k > last);
      last = k;
      first = false;
    }
    CHECK(ids.size() == sel.size());
  }
  const auto a = select_for_augmentation(m, 0.3, 1);
  const auto b = select_for_augmentation(m, 0.3, 1);
  const auto c = select_for_augmentation(m, 0.3, 2);
  auto ids = [](const std::vector<Utterance>& v) {
    std::vector<std::string> out;
    for (const auto& u : v) out.push_back(u.id);
    return out;
  };
  CHECK(ids(a) == ids(b));
  CHECK(ids(a) != ids(c));
}

TEST_CASE("selection is roughly uniform over entries") {
  const Manifest m = numbered(20);
  std::vector<int> hits(20, 0);
  for (std::uint64_t s = 0; s < 4000; ++s) {
    for (const auto& u : select_for_augmentation(m, 0.25, s)) ++hits[std::stoul(u.id.substr(1))];
  }
  // Expected 1000 each; binomial sd is about 27.
  for (int h : hits) {
    CHECK(h > 880);
    CHECK(h < 1120);
  }
}

TEST_CASE("selection rejects non-train and empty manifests") {
  Manifest m = numbered(3);
  m.split = Split::kTest;
  CHECK_THROWS_WITH_AS(select_for_augmentation(m, 0.5, 1), doctest::Contains("expected train"),
                       DataError);
  CHECK_THROWS_AS(select_for_augmentation(numbered(0), 0.5, 1), DataError);
  CHECK_THROWS(select_for_augmentation(numbered(3), 0.0, 1));
}

TEST_CASE("merge appends or interleaves and rebases paths") {
  const Manifest orig = numbered(3, "/data");
  Manifest aug;
  aug.base_dir = "/data/out";
  aug.entries = {synth_of("o0", "F0"), synth_of("o2", "M0")};
  aug.entries[1].extra["features_path"] = "features/x.feat";

  const Manifest app = merge_train_set(orig, aug, Ordering::kAppend);
  REQUIRE(app.size() == 5);
  CHECK(app.entries[2].id == "o2");
  CHECK(app.entries[3].id == "o0~ect~F0");
  CHECK(app.entries[3].audio_path == "out/audio/o0~ect~F0.wav");
  CHECK(app.entries[4].extra["features_path"] == "out/features/x.feat");
  CHECK(app.base_dir == fs::path("/data"));

  const Manifest mix = merge_train_set(orig, aug, Ordering::kInterleave);
  std::vector<std::string> order;
  for (const auto& u : mix.entries) order.push_back(u.id);
  CHECK(order == std::vector<std::string>{"o0", "o0~ect~F0", "o1", "o2~ect~M0", "o2"});
  CHECK(check_lineage(app).empty());
  CHECK(check_lineage(mix).empty());

  CHECK(parse_ordering("interleave") == Ordering::kInterleave);
  CHECK(to_string(Ordering::kAppend) == "append");
  CHECK_THROWS_AS(parse_ordering("shuffle"), ConfigError);
}

TEST_CASE("merge refuses id collisions and names both files") {
  const Manifest orig = numbered(2);
  Manifest aug;
  aug.base_dir = "/data";
  Utterance dup = synth_of("o0", "F0");
  dup.id = "o1";
  dup.audio_path = "elsewhere.wav";
  aug.entries = {dup};
  try {
    merge_train_set(orig, aug, Ordering::kAppend);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string m = e.what();
    CHECK(m.find("'o1'") != std::string::npos);
    CHECK(m.find("wav/o1.wav") != std::string::npos);
    CHECK(m.find("elsewhere.wav") != std::string::npos);
  }
}

TEST_CASE("lineage violations") {
  Manifest m = numbered(2);
  m.entries.push_back(synth_of("o9", "F0"));
  Utterance orphan = synth_of("o0", "F1");
  orphan.source_id.reset();
  m.entries.push_back(orphan);
  m.entries.push_back(m.entries[0]);  // o0 twice
  m.entries.push_back(synth_of("o0", "F2"));
  const auto v = check_lineage(m);
  REQUIRE(v.size() == 3);
  for (const auto& x : v) CHECK(x.rule == "lineage");
  CHECK(v[0].id == "o9~ect~F0");
  CHECK(v[1].message.find("no source_id") != std::string::npos);
  CHECK(v[2].id == "o0~ect~F2");
}

TEST_CASE("config from YAML with overrides, defaults and path resolution") {
  TempDir dir;
  write_text(dir / "c.yaml",
             "dataset:\n  train_manifest: data/train.jsonl\n  out_dir: /abs/out\n"
             "seed: 9\naugment:\n  ratio: 0.3\n  ordering: interleave\n"
             "paraphrase:\n  backend: mock\n  params:\n    temperature: 0.5\n"
             "synth:\n  pool_file: pool.jsonl\n");
  const PipelineConfig c = load_pipeline_config(dir / "c.yaml", {"augment.pool_preset=6F2M",
                                                                 "paraphrase.model='007'"});
  CHECK(c.train_manifest == dir.path() / "data/train.jsonl");
  CHECK(c.out_dir == fs::path("/abs/out"));
  CHECK(c.synth.pool_file == dir.path() / "pool.jsonl");
  CHECK(c.augment.seed == 9);
  CHECK(c.augment.ratio == doctest::Approx(0.3));
  CHECK(c.augment.pool_preset == "6F2M");
  CHECK(c.augment.pool_size() == 4);
  CHECK(c.augment.ordering == Ordering::kInterleave);
  CHECK(c.paraphrase.model == "007");
  CHECK(c.paraphrase.params.temperature == doctest::Approx(0.5));
  CHECK(c.paraphrase.params.top_p == doctest::Approx(0.9));
  CHECK(c.method == "ect");
  CHECK(c.baseline.spec.policy.seed == 9);
  CHECK(c.effective["augment"]["pool_size"] == 4);
  CHECK(c.effective["augment"]["pool_preset"] == "6F2M");
  CHECK(c.effective["paraphrase"]["params"]["temperature"] == 0.5);
  CHECK(c.effective["seed"] == 9);
}

TEST_CASE("gemini profile seeds generation parameters") {
  const PipelineConfig c = pipeline_config_from_json(
      json{{"augment", {{"llm_profile", "gemini"}}}}, "/cfg");
  CHECK(c.paraphrase.params.temperature == doctest::Approx(1.0));
  CHECK(c.paraphrase.params.extra.count("thinking_level") == 1);
}

TEST_CASE("config errors name the key or line") {
  TempDir dir;
  write_text(dir / "bad.yaml", "seed: 1\naugment:\n  ratio: [0.3\n");
  CHECK_THROWS_WITH_AS(load_pipeline_config(dir / "bad.yaml"), doctest::Contains("bad.yaml:"),
                       ConfigError);
  CHECK_THROWS_AS(load_pipeline_config(dir / "nope.yaml"), ConfigError);

  auto msg = [](json doc, std::vector<std::string> sets = {}) -> std::string {
    try {
      pipeline_config_from_json(std::move(doc), "/cfg", sets);
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(msg({{"augment", {{"ratio", "lots"}}}}).find("config key 'augment.ratio'") !=
        std::string::npos);
  CHECK(msg({{"augment", {{"ratio", 1.5}}}}).find("(0, 1]") != std::string::npos);
  CHECK(msg({{"augmnet", {{"ratio", 0.5}}}}).find("unknown config key 'augmnet") !=
        std::string::npos);
  CHECK(msg({{"synth", {{"mode", "stream"}}}}).find("synth.mode") != std::string::npos);
  CHECK(msg({{"paraphrase", {{"min_words", 30}}}}).find("word bounds") != std::string::npos);
  CHECK(msg({{"workers", -1}}).find("workers") != std::string::npos);
  CHECK(msg({{"seed", -1}}).find("non-negative") != std::string::npos);
  CHECK(msg({}, {"noequals"}).find("key=value") != std::string::npos);
  CHECK(msg({}, {"augment..ratio=1"}).find("empty key segment") != std::string::npos);
  CHECK(msg({}, {"augment.ordering=zigzag"}).find("zigzag") != std::string::npos);
  CHECK(msg({}, {"baseline.spec_augment.mask_value=zero"}).find("log_floor|mean") !=
        std::string::npos);
  CHECK(msg({}).empty());
}

TEST_CASE("backend factories") {
  PipelineConfig c = pipeline_config_from_json(json::object(), "/cfg");
  c.paraphrase.backend = "http";
  CHECK(make_paraphrase_backend(c, true)->model_id() == "mock-echo");
  c.paraphrase.backend = "smoke-signals";
  CHECK_THROWS_AS(make_paraphrase_backend(c, false), ConfigError);
  c.synth.backend = "mock";
  CHECK(make_tts_backend(c, false)->backend_id() == "mock-tone");
  c.synth.backend = "telepathy";
  CHECK_THROWS_AS(make_tts_backend(c, false), ConfigError);
  CHECK_THROWS_AS(resolve_pool(c), ConfigError);  // no pool file
}

TEST_CASE("build_augmented_set pairs paraphrases with a balanced pool") {
  TempDir dir;
  write_toy_corpus(dir.path(), {20, 2, 4, 0.2, 3});
  const Manifest orig = load_manifest(dir / "train.jsonl", Split::kTrain);
  const auto selected = select_for_augmentation(orig, 0.5, 4);
  MockParaphraseBackend llm;
  MockTtsBackend tts;
  ParaphraseStage ps{llm};
  ps.options.backoff = std::chrono::milliseconds(0);
  SpeakerPool pool = select_pool(load_speaker_pool(dir / "speakers.jsonl"), {2, 2});
  SynthStage ss{tts, pool, dir / "out" / "audio"};
  ss.options.manifest_dir = dir / "out";
  AugmentConfig ac;
  ac.ratio = 0.5;
  ac.seed = 4;
  const AugmentedSet set = build_augmented_set(selected, ps, ss, ac);
  REQUIRE(set.d_aug.size() == 10);
  std::map<std::string, int> per;
  for (std::size_t i = 0; i < set.d_aug.size(); ++i) {
    const auto& u = set.d_aug.entries[i];
    CHECK(u.source_id == selected[i].id);
    CHECK(u.lang == selected[i].lang);
    CHECK(u.text != selected[i].text);
    ++per[*u.speaker_id];
  }
  CHECK(per.size() == 4);
  for (const auto& [spk, n] : per) CHECK((n == 2 || n == 3));
}

TEST_CASE("run_augmentation on the toy corpus") {
  TempDir dir;
  write_toy_corpus(dir.path(), {40, 4, 6, 0.25, 11});
  const PipelineConfig cfg = toy_config(dir.path(), {"augment.ratio=0.5", "workers=2"});
  const RunOutputs out = run_augmentation(cfg, false);
  const Manifest aug = load_manifest(out.d_aug);
  const Manifest train = load_manifest(out.d_train);
  CHECK(aug.size() == 20);
  CHECK(train.size() == 60);
  CHECK(validate_manifest(train, {}).empty());
  for (const auto& u : aug.entries) {
    CHECK(u.is_synthetic());
    CHECK(probe_wav(resolve_audio_path(aug, u)).sample_rate == 16000);
  }
  const json rr = json::parse(read_file(out.run_record));
  CHECK(rr["counts"]["d_train"] == 60);
  CHECK(rr["counts"]["selected"] == 20);
  CHECK(rr["counts"]["pool_size"] == 8);
  CHECK(rr["backend_calls"]["tts"] == 20);
  CHECK(rr["config"]["augment"]["ratio"] == 0.5);
  CHECK(rr["output_sha256"]["d_train"] == sha256_file(out.d_train));
  CHECK(rr["input_manifest_sha256"] == sha256_file(dir / "train.jsonl"));
  CHECK(fs::exists(out.paraphrases));

  // A second run reuses the cache and the audio and produces identical bytes.
  const std::string first = read_file(out.d_train);
  const RunOutputs again = run_augmentation(cfg, false);
  CHECK(read_file(again.d_train) == first);
  CHECK(json::parse(read_file(again.run_record))["backend_calls"]["tts"] == 0);
  CHECK(json::parse(read_file(again.run_record))["backend_calls"]["llm"] == 0);
}

TEST_CASE("failing backend leaves no final manifests") {
  TempDir dir;
  write_toy_corpus(dir.path(), {10, 2, 2, 0.2, 1});
  const PipelineConfig cfg = toy_config(
      dir.path(), {"synth.backend=command", "synth.command=false {out_wav}", "synth.retries=0",
                   "synth.backoff_ms=0"});
  CHECK_THROWS_AS(run_augmentation(cfg, false), BackendError);
  CHECK_FALSE(fs::exists(cfg.out_dir / "d_train.jsonl"));
  CHECK_FALSE(fs::exists(cfg.out_dir / "d_aug.jsonl"));
  CHECK_FALSE(fs::exists(cfg.out_dir / "run_record.json"));
}

TEST_CASE("speed perturbation baseline") {
  TempDir dir;
  write_toy_corpus(dir.path(), {10, 2, 2, 0.5, 5});
  const PipelineConfig cfg = toy_config(dir.path(), {"augment.method=speed", "augment.ratio=1.0",
                                                     "baseline.speed_factors=[0.9, 1.1]"});
  const RunOutputs out = run_augmentation(cfg, false);
  const Manifest aug = load_manifest(out.d_aug);
  REQUIRE(aug.size() == 10);
  CHECK(aug.entries[0].id == "train_0000~sp0.9");
  CHECK(aug.entries[1].id == "train_0001~sp1.1");
  // 0.5 s at factor f lasts 0.5 / f.
  CHECK(*aug.entries[0].duration_s == doctest::Approx(0.5 / 0.9).epsilon(2e-3));
  CHECK(*aug.entries[1].duration_s == doctest::Approx(0.5 / 1.1).epsilon(2e-3));
  CHECK(probe_wav(resolve_audio_path(aug, aug.entries[0])).frames ==
        static_cast<std::size_t>(std::llround(8000 / 0.9)));
  CHECK(load_manifest(out.d_train).size() == 20);
  CHECK_THROWS_AS(
      run_augmentation(toy_config(dir.path(), {"augment.method=speed", "baseline.speed_factors=[1.0]"}),
                       false),
      ConfigError);
}

TEST_CASE("SpecAugment baseline writes masked features") {
  TempDir dir;
  write_toy_corpus(dir.path(), {6, 2, 2, 0.5, 5});
  const PipelineConfig cfg =
      toy_config(dir.path(), {"augment.method=specaugment", "baseline.spec_augment.n_mels=40",
                              "baseline.spec_augment.time_mask_param=10"});
  const RunOutputs out = run_augmentation(cfg, false);
  const Manifest train = load_manifest(out.d_train);
  REQUIRE(train.size() == 12);
  const Utterance& u = train.entries[6];
  CHECK(u.id == "train_0000~specaug");
  CHECK(u.audio_path == train.entries[0].audio_path);
  REQUIRE(u.extra.contains("features_path"));
  std::uint32_t flags = 0;
  const MelSpectrogram masked =
      read_features(train.base_dir / u.extra["features_path"].get<std::string>(), &flags);
  CHECK(flags == kFeatureFlagMasked);
  CHECK(masked.n_mels == 40);
  CHECK(masked.n_frames == mel_frame_count(8000, 400, 160));

  // The same policy and derived seed reproduce the file exactly.
  MaskPolicy p = cfg.baseline.spec.policy;
  p.seed ^= std::stoull(sha256_hex("train_0000").substr(0, 16), nullptr, 16);
  const MelSpectrogram expect =
      spec_augment(log_mel(read_wav(resolve_audio_path(train, train.entries[0])), 40), p);
  CHECK(expect.values == masked.values);
  const std::string before = read_file(out.d_aug);
  run_augmentation(cfg, false);
  CHECK(read_file(out.d_aug) == before);
}

TEST_CASE("shipped example config loads") {
  const fs::path p = fs::path(EASR_SOURCE_DIR) / "configs" / "example.yaml";
  const PipelineConfig c = load_pipeline_config(p);
  CHECK(c.augment.ratio == doctest::Approx(0.5));
  CHECK(c.augment.pool_size() == 8);
  CHECK(c.paraphrase.backend == "http");
  CHECK(c.synth.mode == "upload");
  CHECK(c.baseline.speed_factors == std::vector<double>{0.9, 1.1});
  CHECK(c.out_dir == (p.parent_path() / "../runs/ect50").lexically_normal());
}
