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

#include "derivgen/manifest.h"

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>

#include <openssl/evp.h>

#include "json.hpp"

#include "derivgen/errors.h"

namespace derivgen {
namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error("SHA-256 initialisation failed");
    }
  }

  void update(const char *data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) throw Error("SHA-256 update failed");
  }

  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md.data(), &len) != 1) {
      throw Error("SHA-256 finalisation failed");
    }
    std::string out;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
      std::snprintf(buf, sizeof buf, "%02x", md[i]);
      out += buf;
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

ManifestInput describe(const std::string &role, const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PathError("cannot read " + path);
  Sha256 h;
  std::array<char, 1 << 16> buf;
  std::uint64_t total = 0;
  while (in) {
    in.read(buf.data(), buf.size());
    auto n = static_cast<std::size_t>(in.gcount());
    h.update(buf.data(), n);
    total += n;
  }
  return ManifestInput{role, path, h.hex(), total};
}

nlohmann::ordered_json files(const std::vector<ManifestInput> &v) {
  auto out = nlohmann::ordered_json::array();
  for (const auto &f : v) {
    nlohmann::ordered_json j;
    j["role"] = f.role;
    j["path"] = f.path;
    j["sha256"] = f.sha256;
    j["bytes"] = f.bytes;
    out.push_back(j);
  }
  return out;
}

}  // namespace

std::string sha256_file(const std::string &path) { return describe("", path).sha256; }

std::string sha256_bytes(const std::string &bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

void Manifest::add_input(const std::string &role, const std::string &path) {
  inputs.push_back(describe(role, path));
}

void Manifest::add_output(const std::string &role, const std::string &path) {
  outputs.push_back(describe(role, path));
}

void write_manifest(std::ostream &out, const Manifest &manifest) {
  nlohmann::ordered_json j;
  j["format"] = "derivgen-manifest-1";
  j["command"] = manifest.command;
  j["seed"] = manifest.config.seed;
  nlohmann::ordered_json config;
  for (const auto &[k, v] : manifest.config.entries()) config[k] = v;
  j["config"] = config;
  j["inputs"] = files(manifest.inputs);
  j["outputs"] = files(manifest.outputs);
  out << j.dump(2) << '\n';
}

void save_manifest(const std::string &path, const Manifest &manifest) {
  std::ofstream out(path);
  if (!out) throw PathError("cannot write " + path);
  write_manifest(out, manifest);
}

}  // namespace derivgen
