// python/easraug/_core.cpp

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

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "easr/cli.h"
#include "easr/corpus.h"
#include "easr/dsp.h"
#include "easr/errors.h"
#include "easr/metrics.h"
#include "easr/paraphrase.h"
#include "easr/pipeline.h"
#include "easr/synth.h"
#include "easr/toy.h"
#include "easr/util.h"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace easr;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

AudioClip to_clip(const FloatArray& samples, int rate) {
  if (samples.ndim() != 1) throw py::value_error("audio must be a 1-D array");
  AudioClip c;
  c.sample_rate = rate;
  c.samples.assign(samples.data(), samples.data() + samples.size());
  return c;
}

FloatArray to_array(const std::vector<float>& v) {
  FloatArray a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

MelSpectrogram to_mel(const FloatArray& a) {
  if (a.ndim() != 2) throw py::value_error("spectrogram must be a 2-D array [frames, mels]");
  MelSpectrogram m;
  m.n_frames = static_cast<std::size_t>(a.shape(0));
  m.n_mels = static_cast<std::size_t>(a.shape(1));
  m.values.assign(a.data(), a.data() + a.size());
  return m;
}

FloatArray from_mel(const MelSpectrogram& m) {
  FloatArray a({static_cast<py::ssize_t>(m.n_frames), static_cast<py::ssize_t>(m.n_mels)});
  std::copy(m.values.begin(), m.values.end(), a.mutable_data());
  return a;
}

py::dict report_dict(const MetricReport& r) {
  py::list utts;
  for (const auto& u : r.utterances) {
    py::dict d;
    d["id"] = u.id;
    d["substitutions"] = u.substitutions;
    d["deletions"] = u.deletions;
    d["insertions"] = u.insertions;
    d["ref_length"] = u.ref_length;
    d["rate"] = u.rate;
    utts.append(d);
  }
  py::dict d;
  d["unit"] = to_string(r.unit);
  d["normalization"] = r.policy_label;
  d["substitutions"] = r.substitutions;
  d["deletions"] = r.deletions;
  d["insertions"] = r.insertions;
  d["ref_length"] = r.ref_length;
  d["corpus_rate"] = r.corpus_rate;
  d["mean_utterance_rate"] = r.mean_utterance_rate;
  d["utterances"] = utts;
  return d;
}

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the easraug augmentation workbench";

  // Later registrations are tried first, so subclasses map to their own type.
  auto& error = py::register_exception<Error>(m, "Error");
  py::register_exception<DataError>(m, "DataError", error.ptr());
  py::register_exception<BackendError>(m, "BackendError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());

  // Metrics.
  m.def(
      "normalize_text",
      [](const std::string& text, const std::string& lang) {
        return normalize_text(text, NormPolicy::for_language(parse_language(lang)));
      },
      py::arg("text"), py::arg("lang") = "en");
  m.def(
      "score",
      [](const std::vector<std::string>& refs, const std::vector<std::string>& hyps,
         const std::string& unit, const std::string& lang) {
        if (refs.size() != hyps.size()) throw py::value_error("refs and hyps differ in length");
        std::vector<ScoredPair> pairs;
        for (std::size_t i = 0; i < refs.size(); ++i) {
          pairs.push_back({std::to_string(i), refs[i], hyps[i]});
        }
        return report_dict(corpus_error_rate(pairs, parse_unit(unit),
                                             NormPolicy::for_language(parse_language(lang))));
      },
      py::arg("refs"), py::arg("hyps"), py::arg("unit") = "word", py::arg("lang") = "en",
      "Pooled WER/CER with per-utterance breakdown.");
  m.def(
      "wilcoxon",
      [](const std::vector<double>& diffs, double alpha) {
        const PairedTestResult r = wilcoxon_signed_rank(diffs, alpha);
        py::dict d;
        d["n_nonzero"] = r.n_nonzero;
        d["w_plus"] = r.w_plus;
        d["w_minus"] = r.w_minus;
        d["w"] = r.w_statistic;
        d["p"] = r.p_value;
        d["method"] = r.method == TestMethod::kExact ? "exact" : "normal";
        d["applicable"] = r.applicable;
        d["significant"] = r.significant;
        return d;
      },
      py::arg("diffs"), py::arg("alpha") = 0.05,
      "Two-sided Wilcoxon signed-rank test on paired differences.");

  // DSP.
  m.def(
      "resample",
      [](const FloatArray& x, int rate, int target) {
        return to_array(resample(to_clip(x, rate), target).samples);
      },
      py::arg("samples"), py::arg("rate"), py::arg("target") = kTargetSampleRate);
  m.def(
      "speed_perturb",
      [](const FloatArray& x, int rate, double factor) {
        return to_array(speed_perturb(to_clip(x, rate), factor).samples);
      },
      py::arg("samples"), py::arg("rate"), py::arg("factor"));
  m.def(
      "log_mel",
      [](const FloatArray& x, int rate, std::size_t n_mels) {
        return from_mel(log_mel(to_clip(x, rate), n_mels));
      },
      py::arg("samples"), py::arg("rate") = kTargetSampleRate, py::arg("n_mels") = 80,
      "Log-mel spectrogram as a [frames, mels] float32 array.");
  m.def(
      "spec_augment",
      [](const FloatArray& spec, int freq_mask_param, int n_freq_masks, int time_mask_param,
         int n_time_masks, const std::string& mask_value, std::uint64_t seed) {
        MaskPolicy p;
        p.freq_mask_param = freq_mask_param;
        p.n_freq_masks = n_freq_masks;
        p.time_mask_param = time_mask_param;
        p.n_time_masks = n_time_masks;
        if (mask_value == "log_floor") {
          p.mask_value = MaskValue::kLogFloor;
        } else if (mask_value == "mean") {
          p.mask_value = MaskValue::kUtteranceMean;
        } else {
          throw py::value_error("mask_value must be log_floor or mean");
        }
        p.seed = seed;
        return from_mel(spec_augment(to_mel(spec), p));
      },
      py::arg("spec"), py::arg("freq_mask_param") = 15, py::arg("n_freq_masks") = 2,
      py::arg("time_mask_param") = 50, py::arg("n_time_masks") = 2,
      py::arg("mask_value") = "log_floor", py::arg("seed") = 0);
  m.def(
      "read_wav",
      [](const fs::path& path) {
        const AudioClip c = read_wav(path);
        return py::make_tuple(to_array(c.samples), c.sample_rate);
      },
      py::arg("path"), "Mono float32 samples and the sample rate.");
  m.def(
      "write_wav", [](const FloatArray& x, int rate, const fs::path& path) {
        write_wav(to_clip(x, rate), path);
      },
      py::arg("samples"), py::arg("rate"), py::arg("path"));

  // Selection and speaker planning.
  m.def(
      "select_for_augmentation",
      [](const fs::path& manifest, double ratio, std::uint64_t seed) {
        std::vector<std::string> ids;
        for (const auto& u : select_for_augmentation(load_manifest(manifest, Split::kTrain), ratio, seed)) {
          ids.push_back(u.id);
        }
        return ids;
      },
      py::arg("manifest"), py::arg("ratio"), py::arg("seed") = 0);
  m.def("default_pool_size", &default_pool_size, py::arg("ratio"));
  m.def(
      "plan_assignments",
      [](std::size_t n, const std::vector<std::string>& speakers, std::uint64_t seed) {
        SpeakerPool pool;
        for (const auto& s : speakers) pool.speakers.push_back({s, Gender::kFemale, {}, {}});
        std::vector<std::string> out;
        for (const auto& a : plan_assignments(n, pool, seed).assignments) out.push_back(a.second);
        return out;
      },
      py::arg("n"), py::arg("speakers"), py::arg("seed") = 0,
      "Speaker id for each of n samples.");

  // Paraphrasing.
  m.def(
      "validate_ect",
      [](const std::string& original, const std::string& candidate, int min_words, int max_words) {
        std::vector<std::string> out;
        for (const auto& v : validate_ect(original, candidate, min_words, max_words)) {
          out.push_back(v.message);
        }
        return out;
      },
      py::arg("original"), py::arg("candidate"), py::arg("min_words") = 3,
      py::arg("max_words") = 20, "Reasons the candidate is rejected; empty when it passes.");
  m.def(
      "build_prompt",
      [](const std::string& transcript) {
        return build_prompt(PromptTemplate::standard(), transcript);
      },
      py::arg("transcript"));
  m.def(
      "paraphrase",
      [](const std::vector<std::pair<std::string, std::string>>& utterances,
         std::function<std::string(const std::string&, const std::string&)> complete,
         int validation_attempts) {
        std::vector<Utterance> utts;
        for (const auto& [id, text] : utterances) {
          Utterance u;
          u.id = id;
          u.audio_path = id + ".wav";
          u.text = text;
          utts.push_back(u);
        }
        FunctionParaphraseBackend backend("python", [&](const CompletionRequest& r) {
          py::gil_scoped_acquire gil;
          return complete(r.prompt, r.source_text);
        });
        ParaphraseOptions o;
        o.validation_attempts = validation_attempts;
        o.backoff = std::chrono::milliseconds(0);
        o.workers = 1;
        std::vector<ParaphraseRecord> recs;
        {
          py::gil_scoped_release release;
          recs = paraphrase_all(backend, PromptTemplate::standard(), {}, utts, nullptr, o);
        }
        std::vector<std::string> out;
        for (const auto& r : recs) out.push_back(r.ect_text);
        return out;
      },
      py::arg("utterances"), py::arg("complete"), py::arg("validation_attempts") = 3,
      "Paraphrases (id, text) pairs with complete(prompt, transcript) -> str.");

  // Synthesis with a Python TTS callable.
  m.def(
      "synthesize",
      [](const std::vector<std::tuple<std::string, std::string>>& items, const fs::path& pool_file,
         const std::string& preset, const fs::path& out_dir,
         std::function<py::tuple(const std::string&, const std::string&, const std::string&)> tts,
         std::uint64_t seed) {
        const SpeakerPool all = load_speaker_pool(pool_file);
        const SpeakerPool pool = select_pool(all, gender_preset(preset), preset);
        std::vector<ParaphraseRecord> recs;
        for (const auto& [id, text] : items) {
          ParaphraseRecord r;
          r.source_id = id;
          r.source_text = text;
          r.ect_text = text;
          recs.push_back(r);
        }
        FunctionTtsBackend backend("python", [&](const TtsRequest& req) {
          py::gil_scoped_acquire gil;
          py::tuple t = tts(req.text, req.speaker->speaker_id, req.speaker->reference_audio.string());
          if (t.size() != 2) throw BackendError("TTS callable must return (samples, rate)");
          return to_clip(t[0].cast<FloatArray>(), t[1].cast<int>());
        });
        SynthOptions o;
        o.workers = 1;
        o.backoff = std::chrono::milliseconds(0);
        Manifest out;
        {
          py::gil_scoped_release release;
          out = run_batch(backend, recs, plan_assignments(recs.size(), pool, seed), pool, out_dir, o);
        }
        py::list rows;
        for (const auto& u : out.entries) rows.append(json_to_py(utterance_to_json(u)));
        return rows;
      },
      py::arg("items"), py::arg("pool_file"), py::arg("preset"), py::arg("out_dir"),
      py::arg("tts"), py::arg("seed") = 0,
      "Synthesizes (source_id, text) pairs; tts(text, speaker_id, ref_audio) -> (samples, rate).");

  // Runs.
  m.def(
      "run_augmentation",
      [](const fs::path& config, const std::vector<std::string>& overrides, bool mock_backends) {
        const PipelineConfig cfg = load_pipeline_config(config, overrides);
        RunOutputs r;
        {
          py::gil_scoped_release release;
          r = run_augmentation(cfg, mock_backends);
        }
        return json_to_py(r.record.to_json());
      },
      py::arg("config"), py::arg("overrides") = std::vector<std::string>{},
      py::arg("mock_backends") = false, "Runs a configured augmentation; returns the run record.");
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line interface; returns (exit_code, stdout, stderr).");
  m.def(
      "write_toy_corpus",
      [](const fs::path& dir, int n_train, int n_test, int n_speakers, double seconds,
         std::uint64_t seed) {
        write_toy_corpus(dir, {n_train, n_test, n_speakers, seconds, seed});
      },
      py::arg("dir"), py::arg("n_train") = 200, py::arg("n_test") = 20, py::arg("n_speakers") = 20,
      py::arg("seconds") = 0.4, py::arg("seed") = 7);
  m.def("sha256_file", &sha256_file, py::arg("path"));
}
