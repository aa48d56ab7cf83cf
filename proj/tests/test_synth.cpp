// tests/test_synth.cpp

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
#include <map>
#include <mutex>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "doctest.h"
#include "easr/errors.h"
#include "easr/synth.h"
#include "easr/util.h"
#include "httplib.h"
#include "test_support.h"

using namespace easr;
using easr::testing::TempDir;
using easr::testing::write_text;
namespace fs = std::filesystem;

namespace {

class LoopbackServer {
 public:
  explicit LoopbackServer(httplib::Server& server) : server_(server) {
    port_ = server_.bind_to_any_port("127.0.0.1");
    if (port_ > 0) thread_ = std::thread([this] { server_.listen_after_bind(); });
  }
  ~LoopbackServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }
  int port() const { return port_; }

 private:
  httplib::Server& server_;
  int port_ = -1;
  std::thread thread_;
};

// Pool file with `nf` female and `nm` male speakers, females first.
fs::path write_pool(const fs::path& dir, int nf, int nm) {
  std::string lines;
  for (int i = 0; i < nf + nm; ++i) {
    const bool f = i < nf;
    const std::string id = (f ? "F" : "M") + std::to_string(f ? i : i - nf);
    write_wav(easr::testing::sine(200.0 + i, 0.2, 16000), dir / "ref" / (id + ".wav"));
    lines += R"({"speaker_id":")" + id + R"(","gender":")" + (f ? "F" : "M") +
             R"(","reference_audio":"ref/)" + id + R"(.wav","age":)" + std::to_string(70 + i) +
             "}\n";
  }
  write_text(dir / "pool.jsonl", lines);
  return dir / "pool.jsonl";
}

SpeakerPool synthetic_pool(int nf, int nm) {
  SpeakerPool p;
  for (int i = 0; i < nf + nm; ++i) {
    ReferenceSpeaker s;
    s.speaker_id = "s" + std::to_string(i);
    s.gender = i < nf ? Gender::kFemale : Gender::kMale;
    p.speakers.push_back(s);
  }
  return p;
}

ParaphraseRecord rec(const std::string& id, const std::string& text) {
  ParaphraseRecord r;
  r.source_id = id;
  r.source_text = "orig " + text;
  r.ect_text = text;
  return r;
}

SynthOptions fast() {
  SynthOptions o;
  o.retries = 1;
  o.backoff = std::chrono::milliseconds(0);
  return o;
}

}  // namespace

TEST_CASE("gender presets and unknown names") {
  CHECK(gender_preset("8F0M").female == 8);
  CHECK(gender_preset("6F2M").male == 2);
  CHECK(gender_preset("4F4M").total() == 8);
  CHECK(gender_preset("0F8M").male == 8);
  CHECK_THROWS_AS(gender_preset("5F3M"), ConfigError);
}

TEST_CASE("scale_preset keeps proportions with largest remainder") {
  const auto p44 = gender_preset("4F4M");
  CHECK(scale_preset(p44, 2).female == 1);
  CHECK(scale_preset(p44, 2).male == 1);
  CHECK(scale_preset(p44, 4).female == 2);
  CHECK(scale_preset(p44, 8).male == 4);
  CHECK(scale_preset(p44, 1).female == 1);  // tie goes to female
  const auto p62 = gender_preset("6F2M");
  CHECK(scale_preset(p62, 4).female == 3);
  CHECK(scale_preset(p62, 4).male == 1);
  CHECK(scale_preset(gender_preset("0F8M"), 2).female == 0);
  for (const char* name : {"8F0M", "6F2M", "4F4M", "2F6M", "0F8M"}) {
    for (int k = 0; k <= 16; ++k) CHECK(scale_preset(gender_preset(name), k).total() == k);
  }
  CHECK_THROWS(scale_preset(p44, -1));
}

TEST_CASE("default pool size follows the ratio") {
  CHECK(default_pool_size(0.05) == 2);
  CHECK(default_pool_size(0.1) == 2);
  CHECK(default_pool_size(0.2) == 4);
  CHECK(default_pool_size(0.3) == 4);
  CHECK(default_pool_size(0.5) == 8);
  CHECK(default_pool_size(1.0) == 8);
}

TEST_CASE("select_pool keeps file order and reports shortfalls") {
  SpeakerPool c = synthetic_pool(3, 3);
  std::swap(c.speakers[1], c.speakers[4]);  // s0 F, s4 M, s2 F, s3 M, s1 F, s5 M
  const SpeakerPool p = select_pool(c, {2, 1}, "x");
  REQUIRE(p.size() == 3);
  CHECK(p.speakers[0].speaker_id == "s0");
  CHECK(p.speakers[1].speaker_id == "s4");
  CHECK(p.speakers[2].speaker_id == "s2");
  CHECK(p.preset_name == "x");
  try {
    select_pool(c, {4, 0});
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("cannot satisfy 4F + 0M (has 3F, 0M usable)") !=
          std::string::npos);
  }
}

TEST_CASE("plan_assignments is balanced and seed-deterministic") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform_below(3000));
    const int k = 1 + static_cast<int>(rng.uniform_below(64));
    const SpeakerPool pool = synthetic_pool(k, 0);
    const auto plan = plan_assignments(n, pool, rng.next_u64());
    REQUIRE(plan.size() == n);
    std::map<std::string, std::size_t> counts;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(plan.assignments[i].first == i);
      ++counts[plan.assignments[i].second];
    }
    const std::size_t lo = n / k, hi = (n + k - 1) / k;
    for (const auto& s : pool.speakers) {
      const std::size_t c = counts.count(s.speaker_id) ? counts[s.speaker_id] : 0;
      CHECK(c >= lo);
      CHECK(c <= hi);
    }
  }
  const SpeakerPool pool = synthetic_pool(4, 4);
  const auto a = plan_assignments(50, pool, 5);
  const auto b = plan_assignments(50, pool, 5);
  CHECK(a.assignments == b.assignments);
  CHECK(plan_assignments(0, SpeakerPool{}, 1).size() == 0);
  CHECK_THROWS_AS(plan_assignments(3, SpeakerPool{}, 1), DataError);
}

TEST_CASE("load_speaker_pool resolves paths and rejects bad records") {
  TempDir dir;
  const fs::path file = write_pool(dir.path(), 2, 1);
  const SpeakerPool p = load_speaker_pool(file);
  REQUIRE(p.size() == 3);
  CHECK(p.speakers[2].gender == Gender::kMale);
  CHECK(p.speakers[1].age == 71);
  CHECK(fs::exists(p.speakers[0].reference_audio));

  auto expect = [&](const std::string& body, const std::string& needle) {
    write_text(dir / "bad.jsonl", body);
    try {
      load_speaker_pool(dir / "bad.jsonl");
      FAIL("expected DataError for " << body);
    } catch (const DataError& e) {
      CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos, e.what());
    }
  };
  expect("{\"speaker_id\":\"a\",\"gender\":\"F\"}\n", "line 1: field `reference_audio`");
  expect("\n{\"speaker_id\":\"a\",\"gender\":\"X\",\"reference_audio\":\"ref/F0.wav\"}\n",
         "line 2: field `gender` must be F or M");
  expect("{not json\n", "line 1: malformed record");
  expect("{\"speaker_id\":\"a\",\"gender\":\"F\",\"reference_audio\":\"ref/F0.wav\"}\n"
         "{\"speaker_id\":\"a\",\"gender\":\"M\",\"reference_audio\":\"ref/F1.wav\"}\n",
         "duplicate speaker_id 'a'");
  expect("{\"speaker_id\":\"z\",\"gender\":\"F\",\"reference_audio\":\"ref/none.wav\"}\n",
         "reference audio for 'z' is unusable");
  expect("{\"speaker_id\":\"a\",\"gender\":\"F\",\"reference_audio\":\"ref/F0.wav\",\"age\":\"old\"}\n",
         "`age` must be an integer");
  CHECK_THROWS_AS(load_speaker_pool(dir / "missing.jsonl"), DataError);
}

TEST_CASE("mock TTS length, tone and silence") {
  ReferenceSpeaker s;
  s.speaker_id = "A";
  MockTtsBackend mock;
  const AudioClip c = mock.synthesize({"one two three four five", &s});
  CHECK(c.sample_rate == 22050);
  CHECK(c.duration_s() == doctest::Approx(0.6).epsilon(1e-3));
  CHECK(mock.synthesize({"hi", &s}).duration_s() == doctest::Approx(0.3).epsilon(1e-3));
  CHECK(mock.call_count() == 2);
  MockTtsBackend::Options o;
  o.silence = true;
  o.fixed_seconds = 1.0;
  o.sample_rate = 16000;
  MockTtsBackend quiet(o);
  const AudioClip q = quiet.synthesize({"a b", &s});
  CHECK(q.size() == 16000);
  CHECK(std::all_of(q.samples.begin(), q.samples.end(), [](float v) { return v == 0.0f; }));
}

TEST_CASE("synthetic ids") {
  CHECK(synthetic_id("u1", "F0") == "u1~ect~F0");
  CHECK(synthetic_id("u1", "F0", 2) == "u1~ect2~F0");
}

TEST_CASE("synthesize_clip writes mono 16 kHz PCM16") {
  TempDir dir;
  ReferenceSpeaker s;
  s.speaker_id = "F0";
  s.age = 80;
  FunctionTtsBackend fn("fn", [](const TtsRequest&) {
    AudioClip c = easr::testing::sine(440.0, 0.5, 24000);
    return c;
  });
  const Utterance u = synthesize_clip(fn, "a short line", s, dir / "x.wav", "src1", fast());
  const WavInfo info = probe_wav(dir / "x.wav");
  CHECK(info.sample_rate == 16000);
  CHECK(info.channels == 1);
  CHECK(info.bits_per_sample == 16);
  CHECK(info.frames == 8000);
  CHECK(u.id == "src1~ect~F0");
  CHECK(u.is_synthetic());
  CHECK(u.source_id == "src1");
  CHECK(u.age == 80);
  CHECK(u.duration_s == doctest::Approx(0.5));
  CHECK_THROWS_AS(synthesize_clip(fn, "  ", s, dir / "y.wav", "src1", fast()), DataError);
}

TEST_CASE("synthesize_clip retries and wraps backend failures") {
  TempDir dir;
  ReferenceSpeaker s;
  s.speaker_id = "F0";
  int calls = 0;
  FunctionTtsBackend flaky("flaky", [&](const TtsRequest&) {
    if (++calls == 1) return AudioClip{};  // zero length
    return easr::testing::sine(300.0, 0.1, 16000);
  });
  synthesize_clip(flaky, "text", s, dir / "a.wav", "u", fast());
  CHECK(calls == 2);

  FunctionTtsBackend nan_out("nan", [](const TtsRequest&) {
    AudioClip c = easr::testing::sine(300.0, 0.1, 16000);
    c.samples[3] = std::nanf("");
    return c;
  });
  try {
    synthesize_clip(nan_out, "text", s, dir / "b.wav", "u7", fast());
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    const std::string m = e.what();
    CHECK(m.find("TTS failed for 'u7' after 2 attempts") != std::string::npos);
    CHECK(m.find("non-finite") != std::string::npos);
  }
  CHECK_FALSE(fs::exists(dir / "b.wav"));
}

TEST_CASE("run_batch pairs records with planned speakers and reuses outputs") {
  TempDir dir;
  const SpeakerPool pool = load_speaker_pool(write_pool(dir.path(), 2, 2));
  std::vector<ParaphraseRecord> recs;
  for (int i = 0; i < 10; ++i) recs.push_back(rec("u" + std::to_string(i), "words for clip " + std::to_string(i)));
  const auto plan = plan_assignments(recs.size(), pool, 3);
  MockTtsBackend mock;
  SynthOptions o = fast();
  o.workers = 3;
  o.manifest_dir = dir.path();
  const Manifest m = run_batch(mock, recs, plan, pool, dir / "audio", o);
  REQUIRE(m.entries.size() == 10);
  CHECK(mock.call_count() == 10);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const Utterance& u = m.entries[i];
    CHECK(u.source_id == recs[i].source_id);
    CHECK(u.speaker_id == plan.assignments[i].second);
    CHECK(u.text == recs[i].ect_text);
    CHECK(u.audio_path.rfind("audio/", 0) == 0);
    CHECK(fs::exists(dir.path() / u.audio_path));
  }
  const std::string before = read_file(dir.path() / m.entries[4].audio_path);
  MockTtsBackend again;
  const Manifest m2 = run_batch(again, recs, plan, pool, dir / "audio", o);
  CHECK(again.call_count() == 0);
  CHECK(read_file(dir.path() / m2.entries[4].audio_path) == before);
  CHECK(m2.entries[4].duration_s == doctest::Approx(*m.entries[4].duration_s).epsilon(1e-6));

  // A truncated output is not reused.
  write_text(dir.path() / m.entries[0].audio_path, "RIFF");
  MockTtsBackend third;
  run_batch(third, recs, plan, pool, dir / "audio", o);
  CHECK(third.call_count() == 1);
}

TEST_CASE("run_batch error wrapping and plan checks") {
  TempDir dir;
  const SpeakerPool pool = synthetic_pool(1, 1);
  std::vector<ParaphraseRecord> recs = {rec("a", "x y z"), rec("b", "p q r")};
  FunctionTtsBackend broken("broken", [](const TtsRequest&) -> AudioClip {
    throw BackendError("connection refused");
  });
  const auto plan = plan_assignments(2, pool, 1);
  try {
    run_batch(broken, recs, plan, pool, dir / "o", fast());
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(std::string(e.what()).find("record 'a'") != std::string::npos);
    CHECK(std::string(e.what()).find("connection refused") != std::string::npos);
  }
  CHECK_THROWS_AS(run_batch(broken, recs, plan_assignments(1, pool, 1), pool, dir / "o"),
                  DataError);
  AssignmentPlan bogus;
  bogus.assignments = {{0, "s0"}, {1, "nobody"}};
  CHECK_THROWS_WITH_AS(run_batch(broken, recs, bogus, pool, dir / "o"),
                       doctest::Contains("'nobody' not in pool"), DataError);
}

TEST_CASE("command TTS quotes substitutions and reads the output") {
  TempDir dir;
  CommandTtsBackend cmd("tts --in {text_file} --ref {ref_audio} --out {out_wav} --spk {speaker_id}");
  CHECK(cmd.render("a b.txt", "r.wav", "o.wav", "it's") ==
        "tts --in 'a b.txt' --ref 'r.wav' --out 'o.wav' --spk 'it'\\''s'");
  CHECK_THROWS_AS(CommandTtsBackend("tts {text_file}"), ConfigError);

  const SpeakerPool pool = load_speaker_pool(write_pool(dir.path(), 1, 0));
  // Copies the reference clip and records the text next to it.
  CommandTtsBackend copy("cp {ref_audio} {out_wav} && cp {text_file} " +
                         (dir / "seen.txt").string());
  const AudioClip c = copy.synthesize({"hello there", &pool.speakers[0]});
  CHECK(c.size() == 3200);
  CHECK(read_file(dir / "seen.txt") == "hello there");

  CommandTtsBackend nothing("true {out_wav}");
  CHECK_THROWS_AS(nothing.synthesize({"x", &pool.speakers[0]}), BackendError);
}

TEST_CASE("HTTP TTS over loopback in both modes") {
  TempDir dir;
  const SpeakerPool pool = load_speaker_pool(write_pool(dir.path(), 1, 1));
  const std::string ref_bytes = read_file(pool.speakers[0].reference_audio);
  std::mutex mu;
  std::map<std::string, std::string> seen;
  httplib::Server server;
  server.Post("/tts", [&](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard<std::mutex> lock(mu);
    if (req.is_multipart_form_data()) {
      seen["text"] = req.get_file_value("text").content;
      seen["speaker_id"] = req.get_file_value("speaker_id").content;
      seen["ref"] = req.get_file_value("reference_audio").content;
      seen["ref_name"] = req.get_file_value("reference_audio").filename;
    } else {
      const auto j = nlohmann::json::parse(req.body);
      seen["json_text"] = j.at("text").get<std::string>();
      seen["json_speaker"] = j.at("speaker_id").get<std::string>();
    }
    res.set_content(encode_wav(easr::testing::sine(500.0, 0.25, 22050)), "audio/wav");
  });
  server.Post("/fail", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  LoopbackServer srv(server);
  REQUIRE(srv.port() > 0);
  const std::string base = "http://127.0.0.1:" + std::to_string(srv.port());

  HttpTtsBackend upload({base + "/tts", "upload", 10});
  const AudioClip a = upload.synthesize({"good morning", &pool.speakers[0]});
  CHECK(a.sample_rate == 22050);
  CHECK(a.size() == 5513);
  CHECK(seen["text"] == "good morning");
  CHECK(seen["speaker_id"] == "F0");
  CHECK(seen["ref"] == ref_bytes);
  CHECK(seen["ref_name"] == "F0.wav");

  HttpTtsBackend by_id({base + "/tts", "speaker_id", 10});
  by_id.synthesize({"good night", &pool.speakers[1]});
  CHECK(seen["json_text"] == "good night");
  CHECK(seen["json_speaker"] == "M0");

  HttpTtsBackend failing({base + "/fail", "upload", 10});
  CHECK_THROWS_WITH_AS(failing.synthesize({"x", &pool.speakers[0]}),
                       doctest::Contains("HTTP 503"), BackendError);
  CHECK_THROWS_AS(HttpTtsBackend({base, "stream", 10}), ConfigError);
  CHECK_THROWS_AS(HttpTtsBackend({"", "upload", 10}), ConfigError);
}

TEST_CASE("pool overlap with an evaluation set is only a warning") {
  TempDir dir;
  const SpeakerPool pool = load_speaker_pool(write_pool(dir.path(), 2, 1));
  Manifest eval;
  eval.base_dir = dir.path();
  Utterance a;
  a.id = "e1";
  a.audio_path = "ref/F1.wav";  // same clip as reference speaker F1
  a.text = "x";
  Utterance b;
  b.id = "e2";
  b.audio_path = "wav/e2.wav";
  b.text = "y";
  b.speaker_id = "M0";
  eval.entries = {a, b};
  const auto v = check_pool_overlap(pool, eval);
  REQUIRE(v.size() == 2);
  CHECK(v[0].id == "F1");
  CHECK(v[0].message.find("'e1'") != std::string::npos);
  CHECK(v[1].id == "M0");
  for (const auto& x : v) {
    CHECK(x.rule == "pool-overlap");
    CHECK(x.severity == Violation::Severity::kWarning);
  }
  eval.entries.pop_back();
  eval.entries[0].audio_path = "wav/other.wav";
  CHECK(check_pool_overlap(pool, eval).empty());
}
