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

#include "derivgen/encoder.h"

#include <array>

#include "derivgen/errors.h"

namespace derivgen {

void VariantConfig::validate() const {
  if (!use_context && !use_base) {
    throw ConfigError("variant must use context, base form, or both");
  }
}

std::size_t VariantConfig::num_state_slots() const {
  std::size_t n = 0;
  if (use_context) n += bidirectional_context ? 4 : 2;
  if (use_base) n += 2;
  return n;
}

std::string VariantConfig::name() const {
  std::string out = bidirectional_context ? "biLSTM" : "LSTM";
  if (use_context) out += "+CTX";
  if (use_base) out += "+BS";
  if (use_pos) out += "+POS";
  return out;
}

VariantConfig VariantConfig::Parse(const std::string &name) {
  VariantConfig v;
  v.use_context = v.use_base = v.use_pos = false;
  std::size_t start = 0;
  bool first = true;
  while (start <= name.size()) {
    std::size_t end = name.find('+', start);
    if (end == std::string::npos) end = name.size();
    std::string part = name.substr(start, end - start);
    if (first) {
      if (part == "biLSTM") {
        v.bidirectional_context = true;
      } else if (part == "LSTM") {
        v.bidirectional_context = false;
      } else {
        throw ConfigError("unknown variant '" + name +
                          "': must start with biLSTM or LSTM");
      }
      first = false;
    } else if (part == "CTX") {
      v.use_context = true;
    } else if (part == "BS") {
      v.use_base = true;
    } else if (part == "POS") {
      v.use_pos = true;
    } else {
      throw ConfigError("unknown variant component '" + part + "' in '" + name + "'");
    }
    start = end + 1;
  }
  v.validate();
  return v;
}

std::size_t fused_dim(std::size_t state_dim) { return (3 * state_dim + 1) / 2; }

EncoderParams EncoderParams::Create(const VariantConfig &variant, std::size_t state_dim,
                                    std::size_t num_pos, std::size_t pos_dim,
                                    double init_scale, std::mt19937_64 &rng) {
  variant.validate();
  std::size_t input = variant.num_state_slots() * state_dim;
  if (variant.use_pos) {
    if (num_pos == 0 || pos_dim == 0) {
      throw ConfigError("POS variant needs a non-empty tag set and d_pos > 0");
    }
    input += pos_dim;
  }
  std::size_t fused = fused_dim(state_dim);
  EncoderParams p{
      Parameter("encoder.H", Tensor({fused, input})),
      Parameter("encoder.b_h", Tensor({fused})),
      Parameter("encoder.T", Tensor({state_dim, fused})),
      Parameter("encoder.b_o", Tensor({state_dim})),
      std::nullopt,
  };
  uniform_init(p.fusion_weights, init_scale, rng);
  uniform_init(p.output_weights, init_scale, rng);
  if (variant.use_pos) {
    p.pos_table.emplace("encoder.pos", Tensor({num_pos, pos_dim}));
    uniform_init(*p.pos_table, init_scale, rng);
  }
  return p;
}

void EncoderParams::collect(std::vector<Parameter *> &out) {
  out.push_back(&fusion_weights);
  out.push_back(&fusion_bias);
  out.push_back(&output_weights);
  out.push_back(&output_bias);
  if (pos_table) out.push_back(&*pos_table);
}

Var encode(const EncoderStates &states, std::optional<std::size_t> pos,
           const VariantConfig &variant, EncoderParams &params) {
  variant.validate();
  const bool ctx = variant.use_context;
  const bool bi = variant.bidirectional_context;
  struct Slot {
    const char *name;
    const std::optional<Var> &state;
    bool wanted;
  };
  const std::array<Slot, 6> slots{{
      {"left_forward", states.left_forward, ctx},
      {"left_backward", states.left_backward, ctx && bi},
      {"right_forward", states.right_forward, ctx && bi},
      {"right_backward", states.right_backward, ctx},
      {"base_forward", states.base_forward, variant.use_base},
      {"base_backward", states.base_backward, variant.use_base},
  }};
  std::vector<Var> parts;
  for (const Slot &s : slots) {
    if (s.wanted != s.state.has_value()) {
      throw ConfigError(std::string("variant ") + variant.name() +
                        (s.wanted ? " requires" : " does not take") + " state slot " +
                        s.name);
    }
    if (s.wanted) {
      if (s.state->size() != params.state_dim()) {
        throw DimensionError(std::string("state slot ") + s.name + " has " +
                             std::to_string(s.state->size()) + " entries, expected " +
                             std::to_string(params.state_dim()));
      }
      parts.push_back(*s.state);
    }
  }
  if (variant.use_pos != pos.has_value()) {
    throw ConfigError("variant " + variant.name() +
                      (variant.use_pos ? " requires" : " does not take") + " a POS tag");
  }
  if (variant.use_pos) {
    if (!params.pos_table) throw ConfigError("encoder has no POS table");
    parts.push_back(parts.front().tape()->lookup(*params.pos_table, *pos));
  }
  Var t = relu(affine(params.fusion_weights, concat(parts), params.fusion_bias));
  return affine(params.output_weights, t, params.output_bias);
}

}  // namespace derivgen
