// tools/make_toy_corpus.cpp

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

#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "easr/toy.h"

int main(int argc, char* argv[]) {
  CLI::App app{"Deterministic toy corpus for offline runs", "make_toy_corpus"};
  std::string out_dir;
  easr::ToyCorpusOptions o;
  app.add_option("out_dir", out_dir, "Output directory")->required();
  app.add_option("--train", o.n_train, "Training utterances");
  app.add_option("--test", o.n_test, "Test utterances");
  app.add_option("--speakers", o.n_speakers, "Distinct corpus speakers");
  app.add_option("--seconds", o.seconds, "Clip length");
  app.add_option("--seed", o.seed, "Seed");
  CLI11_PARSE(app, argc, argv);
  try {
    const auto root = std::filesystem::absolute(out_dir);
    easr::write_toy_corpus(root, o);
    std::cout << root.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "make_toy_corpus: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
