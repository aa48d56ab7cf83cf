// include/easr/toy.h

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

// Small deterministic corpus for offline runs: training and test manifests
// with short tone clips, a 16-speaker reference pool (8F/8M) and a run
// config that uses the mock backends.

#ifndef EASR_TOY_H_
#define EASR_TOY_H_

#include <cstdint>
#include <filesystem>

namespace easr {

struct ToyCorpusOptions {
  int n_train = 200;
  int n_test = 20;
  int n_speakers = 20;
  double seconds = 0.4;
  std::uint64_t seed = 7;
};

/// Writes train.jsonl, test.jsonl, speakers.jsonl, wav/, ref/ and run.yaml
/// under `dir`. Identical options give identical bytes.
void write_toy_corpus(const std::filesystem::path& dir, const ToyCorpusOptions& options = {});

}  // namespace easr

#endif  // EASR_TOY_H_
