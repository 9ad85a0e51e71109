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

#ifndef DERIVGEN_MANIFEST_H_
#define DERIVGEN_MANIFEST_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "derivgen/run_config.h"

namespace derivgen {

// Lowercase hex SHA-256 of a file's bytes. Throws PathError if unreadable.
std::string sha256_file(const std::string &path);
std::string sha256_bytes(const std::string &bytes);

struct ManifestInput {
  std::string role;  // e.g. "train", "embeddings"
  std::string path;
  std::string sha256;
  std::uint64_t bytes = 0;
};

// What a run needs to be repeated: the command, the full configuration,
// the seed, and a digest of every input file. Written as one JSON object
// with a fixed key order.
struct Manifest {
  std::string command;
  RunConfig config;
  std::vector<ManifestInput> inputs;
  std::vector<ManifestInput> outputs;

  void add_input(const std::string &role, const std::string &path);
  void add_output(const std::string &role, const std::string &path);
};

void write_manifest(std::ostream &out, const Manifest &manifest);
void save_manifest(const std::string &path, const Manifest &manifest);

}  // namespace derivgen

#endif  // DERIVGEN_MANIFEST_H_
