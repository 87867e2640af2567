// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "herocluster/csv.hpp"
#include "herocluster/error.hpp"

namespace herocluster {

inline constexpr std::string_view kToolVersion = "0.3.0";

/// Lowercase hex SHA-256 of a byte string.
inline std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::InvalidArgument, "SHA-256 digest failed");
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    char buf[3];
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

inline std::string file_sha256(const std::filesystem::path& path) { return sha256_hex(csv::read_file(path)); }

/// Record of one tool invocation. Holds no timestamps or host details so a
/// re-run with the same flags and inputs writes the same bytes.
struct RunManifest {
  std::string subcommand;
  std::map<std::string, std::string> flags;
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, std::string> inputs;  // path -> sha256
  std::vector<std::string> outputs;

  void add_input(const std::filesystem::path& path) { inputs[path.generic_string()] = file_sha256(path); }
  void add_output(const std::filesystem::path& path) { outputs.push_back(path.generic_string()); }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json out;
    out["tool"] = "herocluster";
    out["version"] = kToolVersion;
    out["subcommand"] = subcommand;
    out["flags"] = flags;
    out["seeds"] = seeds;
    auto& in = out["inputs"] = nlohmann::ordered_json::array();
    for (const auto& [path, digest] : inputs) in.push_back({{"path", path}, {"sha256", digest}});
    out["outputs"] = outputs;
    return out;
  }

  void write(const std::filesystem::path& path) const { csv::write_file(path, to_json().dump(2) + "\n"); }
};

}  // namespace herocluster
