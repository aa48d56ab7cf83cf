# python/easraug/__init__.py

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

"""Elderly-speech ASR data augmentation workbench (native core)."""

from ._core import (
    BackendError,
    ConfigError,
    DataError,
    Error,
    build_prompt,
    default_pool_size,
    log_mel,
    normalize_text,
    paraphrase,
    plan_assignments,
    read_wav,
    resample,
    run_augmentation,
    run_cli,
    score,
    select_for_augmentation,
    sha256_file,
    spec_augment,
    speed_perturb,
    synthesize,
    validate_ect,
    wilcoxon,
    write_toy_corpus,
    write_wav,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
