/*
 * Copyright 2026 The DLCM Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// manifest.json written into every output directory: the resolved flag
// values, digests of the input files, seed, tool version and timestamps.

#ifndef DLCM_TOOLS_MANIFEST_H_
#define DLCM_TOOLS_MANIFEST_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dlcm::tools {

inline constexpr const char* kToolVersion = "1.0.0";

// FNV-1a 64-bit digest of a file's bytes, as 16 hex digits. IoError if the
// file cannot be read.
std::string FileDigest(const std::string& path);

class RunManifest {
 public:
  explicit RunManifest(std::string command);

  void SetConfig(const std::string& key, const std::string& value);
  void AddInput(const std::string& path);
  void SetSeed(std::uint64_t seed) { seed_ = seed; }
  void AddOutput(const std::string& name) { outputs_.push_back(name); }

  // Stamps the finish time and writes <dir>/manifest.json.
  void Write(const std::string& dir) const;

 private:
  std::string command_;
  std::string started_;
  std::map<std::string, std::string> config_;
  std::map<std::string, std::string> inputs_;
  std::vector<std::string> outputs_;
  std::uint64_t seed_ = 0;
};

}  // namespace dlcm::tools

#endif  // DLCM_TOOLS_MANIFEST_H_
