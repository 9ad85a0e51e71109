// Copyright 2026 The derivgen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "derivgen/errors.h"
#include "derivgen/manifest.h"
#include "derivgen/run_config.h"
#include "doctest.h"
#include "json.hpp"

namespace derivgen {
namespace {

TEST_CASE("defaults follow the published settings") {
  RunConfig c;
  CHECK(c.hidden_dim == 100);
  CHECK(c.num_layers == 3);
  CHECK(c.char_dim == 100);
  CHECK(c.embedding_dim == 300);
  CHECK(c.learning_rate == 0.1);
  CHECK(c.momentum == 0.9);
  CHECK(c.patience == 5);
  CHECK(c.alpha == 5.0);
  CHECK_NOTHROW(c.validate());
  ModelConfig m = c.model_config();
  CHECK(m.state_dim() == 300);
  CHECK(!m.recurrent_decoder);
}

TEST_CASE("invalid fields are named in the error") {
  auto fails_on = [](RunConfig c, const std::string &field) {
    try {
      c.validate();
    } catch (const ConfigError &e) {
      return std::string(e.what()).find(field) != std::string::npos;
    }
    return false;
  };
  RunConfig c;
  c.hidden_dim = 0;
  CHECK(fails_on(c, "hidden_dim"));
  c = {};
  c.momentum = 1.0;
  CHECK(fails_on(c, "momentum"));
  c = {};
  c.dev_ratio = 0.5;
  CHECK(fails_on(c, "ratios"));
  c = {};
  c.lexicon = "both";
  CHECK(fails_on(c, "lexicon"));
  c = {};
  c.variant = "CNN";
  CHECK(fails_on(c, "variant"));
}

TEST_CASE("config text lists every key once, reals exactly") {
  RunConfig c;
  c.learning_rate = 0.001;
  c.init_scale = 1.0 / 3.0;
  std::string text = c.to_text();
  CHECK(text.find("learning_rate=0.001\n") != std::string::npos);
  std::istringstream in(text);
  std::string line;
  std::set<std::string> keys;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    REQUIRE(eq != std::string::npos);
    CHECK(keys.insert(line.substr(0, eq)).second);
    if (line.substr(0, eq) == "init_scale") {
      CHECK(std::stod(line.substr(eq + 1)) == c.init_scale);
    }
  }
  CHECK(keys.size() == c.entries().size());
}

TEST_CASE("SHA-256 matches the standard test vectors") {
  CHECK(sha256_bytes("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_bytes("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  auto path = std::filesystem::temp_directory_path() / "derivgen_sha_test.txt";
  {
    std::ofstream out(path, std::ios::binary);
    out << "abc";
  }
  CHECK(sha256_file(path.string()) == sha256_bytes("abc"));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(sha256_file("/nonexistent/file"), PathError);
}

TEST_CASE("manifests record command, config, seed and input digests") {
  auto path = std::filesystem::temp_directory_path() / "derivgen_manifest_input.txt";
  {
    std::ofstream out(path, std::ios::binary);
    out << "hello\n";
  }
  Manifest m;
  m.command = "train";
  m.config.seed = 42;
  m.add_input("train", path.string());
  std::ostringstream a, b;
  write_manifest(a, m);
  write_manifest(b, m);
  CHECK(a.str() == b.str());
  auto j = nlohmann::json::parse(a.str());
  CHECK(j["command"] == "train");
  CHECK(j["seed"] == 42);
  CHECK(j["config"]["seed"] == "42");
  CHECK(j["config"].size() == m.config.entries().size());
  CHECK(j["inputs"][0]["sha256"] == sha256_bytes("hello\n"));
  CHECK(j["inputs"][0]["bytes"] == 6);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace derivgen
