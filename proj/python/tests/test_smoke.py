# python/tests/test_smoke.py

# Copyright 2026 The easraug Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABLITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.

import json
import math

import numpy as np
import pytest

import easraug


def test_wer_fixture():
    r = easraug.score(["the cat sat"], ["the hat sat on"])
    assert (r["substitutions"], r["insertions"], r["deletions"]) == (1, 1, 0)
    assert r["corpus_rate"] == 2 / 3
    assert r["utterances"][0]["ref_length"] == 3


def test_korean_cer():
    r = easraug.score(["혈압 약"], ["결합 약"], unit="char", lang="ko")
    assert r["corpus_rate"] == 2 / 3
    assert easraug.normalize_text("혈압  약.", "ko") == "혈압 약"


def test_wilcoxon():
    r = easraug.wilcoxon([1, 2, 3, 4, 5])
    assert r["p"] == pytest.approx(0.0625, abs=1e-12)
    assert r["method"] == "exact"
    assert not r["significant"]
    assert not easraug.wilcoxon([0.0, 0.0])["applicable"]


def test_dsp_roundtrip(tmp_path):
    t = np.arange(48000) / 48000.0
    x = (0.5 * np.sin(2 * math.pi * 440.0 * t)).astype(np.float32)
    y = easraug.resample(x, 48000, 16000)
    assert y.dtype == np.float32 and y.shape == (16000,)
    peak = np.argmax(np.abs(np.fft.rfft(y[:4000])))
    assert abs(peak - 110) <= 1
    assert abs(len(easraug.speed_perturb(y, 16000, 1.1)) - round(16000 / 1.1)) <= 1
    mel = easraug.log_mel(y, 16000, 40)
    assert mel.shape == (1 + (16000 - 400) // 160, 40)
    same = easraug.spec_augment(mel, n_freq_masks=0, n_time_masks=0)
    assert np.array_equal(same, mel)
    a = easraug.spec_augment(mel, seed=3)
    assert np.array_equal(a, easraug.spec_augment(mel, seed=3))
    easraug.write_wav(y, 16000, tmp_path / "a.wav")
    z, rate = easraug.read_wav(tmp_path / "a.wav")
    assert rate == 16000 and np.max(np.abs(z - y)) < 1e-4
    with pytest.raises(ValueError):
        easraug.log_mel(np.zeros((2, 2), dtype=np.float32))


def test_plan_balance():
    plan = easraug.plan_assignments(103, ["a", "b", "c", "d"], seed=5)
    counts = [plan.count(s) for s in "abcd"]
    assert max(counts) - min(counts) <= 1
    assert easraug.default_pool_size(0.3) == 4


def test_paraphrase_callable_retries():
    calls = []

    def complete(prompt, transcript):
        calls.append(prompt)
        if len(calls) == 1:
            return "too short"
        return "Back in my day, " + transcript

    out = easraug.paraphrase([("u1", "we walked to school")], complete)
    assert out == ["Back in my day, we walked to school"]
    assert len(calls) == 2
    assert calls[0].endswith("we walked to school")
    assert easraug.validate_ect("a b c", "a b c")
    with pytest.raises(easraug.BackendError):
        easraug.paraphrase([("u2", "please call my son")], lambda p, t: t)


def test_synthesize_callable(tmp_path):
    easraug.write_toy_corpus(tmp_path, n_train=4, n_test=1, n_speakers=2)
    seen = []

    def tts(text, speaker, ref):
        seen.append(speaker)
        return np.zeros(2205, dtype=np.float32) + 0.1, 22050

    rows = easraug.synthesize(
        [("s1", "one two three"), ("s2", "four five six")],
        tmp_path / "speakers.jsonl", "4F4M", tmp_path / "aug", tts)
    assert len(rows) == 2 and rows[0]["origin"] == "synthetic"
    assert rows[1]["source_id"] == "s2"
    _, rate = easraug.read_wav(tmp_path / "aug" / rows[0]["audio_path"])
    assert rate == 16000


def test_run_and_cli(tmp_path):
    easraug.write_toy_corpus(tmp_path, n_train=10, n_test=2, n_speakers=2, seconds=0.2)
    rec = easraug.run_augmentation(tmp_path / "run.yaml", ["augment.ratio=0.5"], True)
    assert rec["counts"]["d_train"] == 15
    assert rec["output_sha256"]["d_train"] == easraug.sha256_file(tmp_path / "out" / "d_train.jsonl")
    code, out, err = easraug.run_cli(["stats", "--manifest", str(tmp_path / "out" / "d_train.jsonl"), "--json"])
    assert code == 0, err
    assert json.loads(out)["synthetic"] == 5
    assert easraug.select_for_augmentation(tmp_path / "train.jsonl", 0.3, 1) == \
        easraug.select_for_augmentation(tmp_path / "train.jsonl", 0.3, 1)
    with pytest.raises(easraug.ConfigError):
        easraug.run_augmentation(tmp_path / "run.yaml", ["augment.ratio=3"], True)
    with pytest.raises(easraug.DataError):
        easraug.select_for_augmentation(tmp_path / "missing.jsonl", 0.5)
