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

#include "derivgen/checkpoint.h"

#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>

#include "derivgen/errors.h"

namespace derivgen {
namespace {

constexpr std::array<char, 4> kMagic = {'D', 'R', 'V', 'G'};
// Guards against allocating absurd sizes from a corrupt length field.
constexpr std::uint64_t kMaxLength = std::uint64_t{1} << 34;

class Writer {
 public:
  explicit Writer(std::ostream &out) : out_(out) {}

  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.put(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.put(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string &s) {
    u64(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void strings(const std::vector<std::string> &v) {
    u64(v.size());
    for (const auto &s : v) str(s);
  }
  void reals(std::span<const double> v) {
    u64(v.size());
    for (double x : v) f64(x);
  }

 private:
  std::ostream &out_;
};

class Reader {
 public:
  explicit Reader(std::istream &in) : in_(in) {}

  std::uint8_t byte() {
    int c = in_.get();
    if (c == std::char_traits<char>::eof()) throw FormatError("truncated checkpoint");
    return static_cast<std::uint8_t>(c);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{byte()} << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{byte()} << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::uint64_t length() {
    std::uint64_t n = u64();
    if (n > kMaxLength) throw FormatError("corrupt length in checkpoint");
    return n;
  }
  std::string str() {
    std::string s(length(), '\0');
    in_.read(s.data(), static_cast<std::streamsize>(s.size()));
    if (!in_) throw FormatError("truncated checkpoint");
    return s;
  }
  std::vector<std::string> strings() {
    std::vector<std::string> v(length());
    for (auto &s : v) s = str();
    return v;
  }
  std::vector<double> reals() {
    std::vector<double> v(length());
    for (auto &x : v) x = f64();
    return v;
  }

 private:
  std::istream &in_;
};

}  // namespace

void write_checkpoint(std::ostream &out, DerivationModel &model,
                      const CheckpointMeta &meta) {
  Writer w(out);
  out.write(kMagic.data(), kMagic.size());
  w.u32(kCheckpointVersion);

  w.str(meta.run_config);
  w.u64(meta.epoch);
  w.f64(meta.dev_accuracy);
  w.u64(meta.model_seed);

  const ModelConfig &c = model.config();
  w.str(c.variant.name());
  w.u64(c.hidden_dim);
  w.u64(c.num_layers);
  w.u64(c.char_dim);
  w.u64(c.pos_dim);
  w.u64(c.recurrent_decoder ? 1 : 0);
  w.f64(c.lstm_init_scale);
  w.f64(c.init_scale);
  w.f64(c.copy_init_scale);

  w.strings(model.chars().symbols());
  w.strings(model.pos_tags().symbols());

  const EmbeddingTable &e = model.embeddings();
  w.u64(e.dim());
  w.strings(e.words().symbols());
  w.reals(e.vectors());
  w.reals(e.unk());
  w.reals(e.sentence_begin());
  w.reals(e.sentence_end());

  auto params = model.parameters();
  w.u64(params.size());
  for (const Parameter *p : params) {
    w.str(p->name);
    w.u64(p->value.rank());
    for (std::size_t d : p->value.shape()) w.u64(d);
    w.reals(p->value.data());
  }
  if (!out) throw PathError("checkpoint write failed");
}

Checkpoint read_checkpoint(std::istream &in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw FormatError("not a checkpoint file");
  Reader r(in);
  std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }

  CheckpointMeta meta;
  meta.run_config = r.str();
  meta.epoch = r.u64();
  meta.dev_accuracy = r.f64();
  meta.model_seed = r.u64();

  ModelConfig c;
  c.variant = VariantConfig::Parse(r.str());
  c.hidden_dim = r.u64();
  c.num_layers = r.u64();
  c.char_dim = r.u64();
  c.pos_dim = r.u64();
  c.recurrent_decoder = r.u64() != 0;
  c.lstm_init_scale = r.f64();
  c.init_scale = r.f64();
  c.copy_init_scale = r.f64();

  CharVocab chars(r.strings());
  Vocabulary pos_tags(r.strings());

  std::size_t dim = r.u64();
  Vocabulary words(r.strings());
  std::vector<double> vectors = r.reals();
  std::vector<double> unk = r.reals();
  std::vector<double> begin = r.reals();
  std::vector<double> end = r.reals();
  EmbeddingTable embeddings(dim, std::move(words), std::move(vectors), std::move(unk),
                            std::move(begin), std::move(end));

  DerivationModel model(c, std::move(chars), std::move(pos_tags), std::move(embeddings),
                        0);
  auto params = model.parameters();
  std::uint64_t n = r.u64();
  if (n != params.size()) {
    throw FormatError("checkpoint has " + std::to_string(n) +
                      " parameters, model expects " + std::to_string(params.size()));
  }
  for (Parameter *p : params) {
    std::string name = r.str();
    if (name != p->name) {
      throw FormatError("checkpoint parameter " + name + " where " + p->name +
                        " was expected");
    }
    std::vector<std::size_t> shape(r.length());
    for (auto &d : shape) d = r.u64();
    if (shape != p->value.shape()) {
      throw FormatError("parameter " + name + " has shape " + shape_string(shape) +
                        ", expected " + p->value.shape_string());
    }
    std::vector<double> values = r.reals();
    if (values.size() != p->value.size()) {
      throw FormatError("parameter " + name + " has the wrong number of values");
    }
    std::copy(values.begin(), values.end(), p->value.data().begin());
  }
  return Checkpoint{std::move(model), std::move(meta)};
}

void save_checkpoint(const std::string &path, DerivationModel &model,
                     const CheckpointMeta &meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PathError("cannot write " + path);
  write_checkpoint(out, model, meta);
}

Checkpoint load_checkpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PathError("cannot read " + path);
  return read_checkpoint(in);
}

}  // namespace derivgen
