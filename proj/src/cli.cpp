// src/cli.cpp

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

#include "easr/cli.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "easr/corpus.h"
#include "easr/errors.h"
#include "easr/metrics.h"
#include "easr/paraphrase.h"
#include "easr/pipeline.h"
#include "easr/synth.h"
#include "easr/util.h"
#include "json.hpp"

namespace easr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * fraction);
  return buf;
}

// Writes to `path` atomically, or to `out` when the path is empty or "-".
void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    atomic_write_file(path, text);
  }
}

// Options shared by the stages that read a run config.
struct ConfigFlags {
  std::string config;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  bool mock = false;

  void add_to(CLI::App* app) {
    app->add_option("--config", config, "YAML run config");
    app->add_option("--set", overrides, "Override a config value (dotted.key=value)");
    app->add_option("--seed", seed, "Override the run seed");
    app->add_flag("--mock-backends", mock, "Use the offline mock LLM and TTS backends");
  }

  PipelineConfig load() const {
    std::vector<std::string> all = overrides;
    if (seed) all.push_back("seed=" + std::to_string(*seed));
    if (config.empty()) return pipeline_config_from_json(json::object(), fs::current_path(), all);
    return load_pipeline_config(config, all);
  }
};

struct Verbosity {
  int level = 0;
  std::ostream* err = nullptr;
  void log(const std::string& msg) const {
    if (level > 0) *err << msg << "\n";
  }
};

int cmd_validate(const std::string& manifest, std::optional<int> min_age, bool require_age,
                 bool check_audio, bool require_16k, const std::string& pool_file,
                 std::ostream& out) {
  const Manifest m = load_manifest(manifest);
  ValidationPolicy policy;
  policy.min_age = min_age;
  policy.require_age = require_age;
  policy.check_audio = check_audio || require_16k;
  if (require_16k) {
    policy.required_sample_rate = kTargetSampleRate;
    policy.require_mono = true;
  }
  auto violations = validate_manifest(m, policy);
  if (!pool_file.empty()) {
    for (auto& v : check_pool_overlap(load_speaker_pool(pool_file), m)) violations.push_back(v);
  }
  std::size_t errors = 0;
  for (const auto& v : violations) {
    const bool is_error = v.severity == Violation::Severity::kError;
    errors += is_error;
    out << (is_error ? "error" : "warning") << "\t" << v.id << "\t" << v.rule << "\t" << v.message
        << "\n";
  }
  out << m.size() << " entries, " << errors << " errors, " << violations.size() - errors
      << " warnings\n";
  return errors ? kExitData : kExitOk;
}

int cmd_stats(const std::string& manifest, int bucket_width, bool durations, bool as_json,
              std::ostream& out) {
  Manifest m = load_manifest(manifest);
  if (durations) fill_durations(m);
  const CorpusStats s = corpus_stats(m);
  const AgeHistogram h = age_histogram(m, bucket_width);
  if (as_json) {
    json ages = json::object();
    for (const auto& [label, n] : h.labeled()) ages[label] = n;
    json j = {{"utterances", s.utterances},
              {"original", s.original},
              {"synthetic", s.synthetic},
              {"speakers", s.speakers},
              {"female", s.female},
              {"male", s.male},
              {"gender_unknown", s.gender_unknown},
              {"total_duration_s", s.total_duration_s},
              {"with_duration", s.with_duration},
              {"age_buckets", ages}};
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  out << "utterances\t" << s.utterances << "\n"
      << "original\t" << s.original << "\n"
      << "synthetic\t" << s.synthetic << "\n"
      << "speakers\t" << s.speakers << "\n"
      << "female\t" << s.female << "\n"
      << "male\t" << s.male << "\n"
      << "gender_unknown\t" << s.gender_unknown << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", s.total_duration_s / 3600.0);
  out << "hours\t" << buf << " (" << s.with_duration << " entries with duration)\n";
  out << "age buckets\n";
  for (const auto& [label, n] : h.labeled()) out << "  " << label << "\t" << n << "\n";
  return kExitOk;
}

int cmd_paraphrase(const ConfigFlags& flags, const std::string& manifest, const std::string& out_path,
                   const Verbosity& verbose) {
  const PipelineConfig cfg = flags.load();
  const Manifest m = load_manifest(manifest, Split::kTrain);
  const auto selected = select_for_augmentation(m, cfg.augment.ratio, cfg.augment.seed);
  auto backend = make_paraphrase_backend(cfg, flags.mock);
  std::optional<ParaphraseCache> cache;
  if (cfg.cache_path) cache.emplace(*cfg.cache_path);
  ParaphraseOptions options = cfg.paraphrase.options;
  if (!options.workers) options.workers = cfg.workers;
  const auto records = paraphrase_all(*backend, cfg.paraphrase.tmpl.value_or(PromptTemplate::standard()),
                                      cfg.paraphrase.params, selected, cache ? &*cache : nullptr,
                                      options);
  save_paraphrase_records(records, out_path);
  verbose.log("paraphrased " + std::to_string(records.size()) + " of " +
              std::to_string(m.size()) + " utterances (" + std::to_string(backend->call_count()) +
              " backend calls)");
  return kExitOk;
}

int cmd_synth(const ConfigFlags& flags, const std::string& paraphrases, const std::string& out_path,
              const std::string& pool_file, const Verbosity& verbose) {
  PipelineConfig cfg = flags.load();
  if (!pool_file.empty()) cfg.synth.pool_file = fs::absolute(pool_file);
  const auto records = load_paraphrase_records(paraphrases);
  const SpeakerPool pool = resolve_pool(cfg);
  auto tts = make_tts_backend(cfg, flags.mock);
  const fs::path out = fs::absolute(out_path);
  SynthOptions options = cfg.synth.options;
  options.manifest_dir = out.parent_path();
  if (!options.workers) options.workers = cfg.workers;
  const AssignmentPlan plan = plan_assignments(records.size(), pool, cfg.augment.seed);
  Manifest d_aug = run_batch(*tts, records, plan, pool, out.parent_path() / "audio", options);
  d_aug.base_dir = out.parent_path();
  save_manifest(d_aug, out);
  verbose.log("synthesized " + std::to_string(d_aug.size()) + " clips with " +
              std::to_string(pool.size()) + " speakers (" + std::to_string(tts->call_count()) +
              " backend calls)");
  return kExitOk;
}

int cmd_augment(const ConfigFlags& flags, const Verbosity& verbose, std::ostream& out) {
  const PipelineConfig cfg = flags.load();
  const RunOutputs r = run_augmentation(cfg, flags.mock);
  for (const auto& [stage, ms] : r.record.timings_ms) {
    verbose.log(stage + ": " + std::to_string(static_cast<long long>(ms)) + " ms");
  }
  for (const auto& [backend, n] : r.record.backend_calls) {
    verbose.log(backend + " backend calls: " + std::to_string(n));
  }
  out << "d_aug\t" << r.d_aug.string() << "\t" << r.record.counts.at("d_aug") << "\n";
  out << "d_train\t" << r.d_train.string() << "\t" << r.record.counts.at("d_train") << "\n";
  out << "run_record\t" << r.run_record.string() << "\n";
  return kExitOk;
}

int cmd_merge(const std::string& orig_path, const std::string& aug_path, const std::string& out_path,
              const std::string& ordering, std::ostream& out) {
  const Manifest orig = load_manifest(orig_path, Split::kTrain);
  const Manifest aug = load_manifest(aug_path, Split::kTrain);
  const Manifest merged = merge_train_set(orig, aug, parse_ordering(ordering));
  if (auto v = check_lineage(merged); !v.empty()) {
    throw DataError("lineage check failed for '" + v.front().id + "': " + v.front().message);
  }
  save_manifest(merged, out_path);
  out << merged.size() << " entries (" << orig.size() << " original, " << aug.size()
      << " synthetic)\n";
  return kExitOk;
}

MetricReport score_files(const std::string& ref, const std::string& hyp, Unit unit,
                         const NormPolicy& policy) {
  const Manifest m = load_manifest(ref);
  const auto pairs = join_hypotheses(m, load_hypotheses(hyp));
  return corpus_error_rate(pairs, unit, policy);
}

std::string metric_name(Unit u) { return u == Unit::kWord ? "WER" : "CER"; }

int cmd_score(const std::string& ref, const std::string& hyp, const std::string& unit_s,
              const std::string& lang, const std::string& format, bool per_utt,
              const std::string& out_path, std::ostream& out) {
  const Unit unit = parse_unit(unit_s);
  const MetricReport r = score_files(ref, hyp, unit, NormPolicy::for_language(parse_language(lang)));
  std::ostringstream os;
  if (format == "json") {
    json utts = json::array();
    for (const auto& u : r.utterances) {
      utts.push_back({{"id", u.id},
                      {"substitutions", u.substitutions},
                      {"deletions", u.deletions},
                      {"insertions", u.insertions},
                      {"ref_length", u.ref_length},
                      {"rate", u.rate}});
    }
    json j = {{"unit", to_string(unit)},
              {"normalization", r.policy_label},
              {"substitutions", r.substitutions},
              {"deletions", r.deletions},
              {"insertions", r.insertions},
              {"ref_length", r.ref_length},
              {"corpus_rate", r.corpus_rate},
              {"mean_utterance_rate", r.mean_utterance_rate}};
    if (per_utt) j["utterances"] = utts;
    os << j.dump(2) << "\n";
  } else if (format == "text") {
    const std::string name = metric_name(unit);
    os << "unit\t" << to_string(unit) << "\n"
       << "normalization\t" << r.policy_label << "\n"
       << "utterances\t" << r.utterances.size() << "\n"
       << "S/D/I/N\t" << r.substitutions << "/" << r.deletions << "/" << r.insertions << "/"
       << r.ref_length << "\n"
       << name << "\t" << pct(r.corpus_rate) << "\n"
       << "mean utterance " << name << "\t" << pct(r.mean_utterance_rate) << "\n";
    if (per_utt) {
      for (const auto& u : r.utterances) os << u.id << "\t" << pct(u.rate) << "\n";
    }
  } else {
    throw ConfigError("unknown format '" + format + "' (expected text|json)");
  }
  emit(os.str(), out_path, out);
  return kExitOk;
}

int cmd_sigtest(const std::string& ref, const std::string& hyp_a, const std::string& hyp_b,
                const std::string& unit_s, const std::string& lang, double alpha, bool exit_code,
                const std::string& out_path, std::ostream& out) {
  const Unit unit = parse_unit(unit_s);
  const NormPolicy policy = NormPolicy::for_language(parse_language(lang));
  const MetricReport a = score_files(ref, hyp_a, unit, policy);
  const MetricReport b = score_files(ref, hyp_b, unit, policy);
  std::vector<double> diffs;
  diffs.reserve(a.utterances.size());
  for (std::size_t i = 0; i < a.utterances.size(); ++i) {
    diffs.push_back(a.utterances[i].rate - b.utterances[i].rate);
  }
  const PairedTestResult t = wilcoxon_signed_rank(diffs, alpha);
  char p[32];
  std::snprintf(p, sizeof(p), "%.6g", t.p_value);
  std::ostringstream os;
  const std::string name = metric_name(unit);
  os << "pairing\tper-utterance " << name << " difference (A - B)\n"
     << "normalization\t" << a.policy_label << "\n"
     << name << " A/B\t" << pct(a.corpus_rate) << " / " << pct(b.corpus_rate) << "\n"
     << "n_nonzero\t" << t.n_nonzero << "\n"
     << "W+/W-\t" << t.w_plus << " / " << t.w_minus << "\n"
     << "W\t" << t.w_statistic << "\n"
     << "method\t" << (t.method == TestMethod::kExact ? "exact" : "normal") << "\n"
     << "p\t" << p << "\n"
     << "alpha\t" << alpha << "\n"
     << "significant\t"
     << (!t.applicable ? "n/a (all differences zero)" : t.significant ? "yes" : "no") << "\n";
  emit(os.str(), out_path, out);
  if (exit_code && !t.significant) return kExitNotSignificant;
  return kExitOk;
}

int cmd_report(const std::string& results, const std::string& format, const std::string& out_path,
               std::ostream& out) {
  const ReportTable table = load_report_results(results);
  emit(emit_report(table, parse_report_format(format)), out_path, out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Elderly-speech ASR data augmentation workbench", "easraug"};
  app.require_subcommand(1);
  app.fallthrough();
  Verbosity verbose{0, &err};
  app.add_flag("-v,--verbose", verbose.level, "Progress messages on stderr");

  std::string manifest, out_path, format = "text";
  std::optional<int> min_age;
  bool require_age = false, check_audio = false, require_16k = false;
  auto* validate = app.add_subcommand("validate", "Check manifest invariants and policy");
  validate->add_option("--manifest", manifest, "Manifest to check")->required();
  validate->add_option("--min-age", min_age, "Minimum speaker age");
  validate->add_flag("--require-age", require_age, "Every entry must carry an age");
  validate->add_flag("--check-audio", check_audio, "Open every audio file");
  validate->add_flag("--require-16k", require_16k, "Audio must be mono 16 kHz");
  std::string pool_file;
  validate->add_option("--pool", pool_file,
                       "Reference speaker pool; warn about speakers shared with this manifest");

  int bucket_width = 10;
  bool as_json = false, durations = false;
  auto* stats = app.add_subcommand("stats", "Corpus statistics and age histogram");
  stats->add_option("--manifest", manifest, "Manifest")->required();
  stats->add_option("--bucket-width", bucket_width, "Age bucket width in years");
  stats->add_flag("--durations", durations, "Read missing durations from the WAV headers");
  stats->add_flag("--json", as_json, "JSON output");

  ConfigFlags cflags;
  auto* paraphrase = app.add_subcommand("paraphrase", "Elderly-contextual paraphrases of a manifest");
  paraphrase->add_option("--manifest", manifest, "Training manifest")->required();
  paraphrase->add_option("--out", out_path, "Paraphrase records (JSON Lines)")->required();
  cflags.add_to(paraphrase);

  std::string paraphrases;
  auto* synth = app.add_subcommand("synth", "Synthesize paraphrase records into D_aug");
  synth->add_option("--paraphrases", paraphrases, "Paraphrase records")->required();
  synth->add_option("--out", out_path, "D_aug manifest; audio goes next to it")->required();
  synth->add_option("--pool", pool_file, "Reference speaker pool (overrides the config)");
  cflags.add_to(synth);

  auto* augment = app.add_subcommand("augment", "Select, paraphrase, synthesize and merge");
  cflags.add_to(augment);
  augment->get_option("--config")->required();

  std::string orig, aug, ordering = "append";
  auto* merge = app.add_subcommand("merge", "Merge D_orig and D_aug into D_train");
  merge->add_option("--orig", orig, "Original training manifest")->required();
  merge->add_option("--aug", aug, "Synthetic manifest")->required();
  merge->add_option("--out", out_path, "Merged manifest")->required();
  merge->add_option("--ordering", ordering, "append or interleave");

  std::string ref, hyp, hyp_a, hyp_b, unit = "word", lang = "en";
  bool per_utt = false;
  auto* score = app.add_subcommand("score", "WER or CER of hypotheses against a manifest");
  score->add_option("--ref", ref, "Reference manifest")->required();
  score->add_option("--hyp", hyp, "Hypothesis records")->required();
  score->add_option("--unit", unit, "word or char");
  score->add_option("--lang", lang, "en or ko (normalization)");
  score->add_option("--format", format, "text or json");
  score->add_flag("--per-utt", per_utt, "Include per-utterance rates");
  score->add_option("--out", out_path, "Output file (default stdout)");

  double alpha = 0.05;
  bool exit_code = false;
  auto* sigtest = app.add_subcommand("sigtest", "Wilcoxon signed-rank test of two systems");
  sigtest->add_option("--ref", ref, "Reference manifest")->required();
  sigtest->add_option("--hyp-a", hyp_a, "System A hypotheses")->required();
  sigtest->add_option("--hyp-b", hyp_b, "System B hypotheses")->required();
  sigtest->add_option("--unit", unit, "word or char");
  sigtest->add_option("--lang", lang, "en or ko (normalization)");
  sigtest->add_option("--alpha", alpha, "Significance level");
  sigtest->add_flag("--exit-code", exit_code, "Exit 3 when the difference is not significant");
  sigtest->add_option("--out", out_path, "Output file (default stdout)");

  std::string results;
  auto* report = app.add_subcommand("report", "WER / CER table from result records");
  report->add_option("--results", results, "Result records (JSON Lines)")->required();
  report->add_option("--format", format, "text or csv");
  report->add_option("--out", out_path, "Output file (default stdout)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitBackend;
  }

  try {
    if (*validate) {
      return cmd_validate(manifest, min_age, require_age, check_audio, require_16k, pool_file, out);
    }
    if (*stats) return cmd_stats(manifest, bucket_width, durations, as_json, out);
    if (*paraphrase) return cmd_paraphrase(cflags, manifest, out_path, verbose);
    if (*synth) return cmd_synth(cflags, paraphrases, out_path, pool_file, verbose);
    if (*augment) return cmd_augment(cflags, verbose, out);
    if (*merge) return cmd_merge(orig, aug, out_path, ordering, out);
    if (*score) return cmd_score(ref, hyp, unit, lang, format, per_utt, out_path, out);
    if (*sigtest) {
      return cmd_sigtest(ref, hyp_a, hyp_b, unit, lang, alpha, exit_code, out_path, out);
    }
    if (*report) return cmd_report(results, format, out_path, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const BackendError& e) {
    err << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitBackend;
}

}  // namespace easr
