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

#ifndef DERIVGEN_CHECKPOINT_H_
#define DERIVGEN_CHECKPOINT_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "derivgen/model.h"

namespace derivgen {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
  std::string run_config;  // key=value text of the run that produced it
  std::size_t epoch = 0;
  double dev_accuracy = 0;
  std::uint64_t model_seed = 0;
  friend bool operator==(const CheckpointMeta &, const CheckpointMeta &) = default;
};

struct Checkpoint {
  DerivationModel model;
  CheckpointMeta meta;
};

// Layout: "DRVG", u32 version, then length-prefixed fields. Integers are
// little-endian u64, reals are IEEE-754 binary64 in little-endian byte
// order. The file holds the model config, the character and POS
// inventories, the word embeddings and every parameter by name, so
// loading needs nothing else. No timestamps are written.
void write_checkpoint(std::ostream &out, DerivationModel &model,
                      const CheckpointMeta &meta);
Checkpoint read_checkpoint(std::istream &in);

void save_checkpoint(const std::string &path, DerivationModel &model,
                     const CheckpointMeta &meta);
Checkpoint load_checkpoint(const std::string &path);

}  // namespace derivgen

#endif  // DERIVGEN_CHECKPOINT_H_
