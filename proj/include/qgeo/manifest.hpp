#pragma once

// Run manifests attached to every output file. Requires OpenSSL (libcrypto).

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <unistd.h>

#include "qgeo/error.hpp"
#include "qgeo/io.hpp"

namespace qgeo {

inline constexpr std::string_view kToolVersion = "0.1.0";

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(Errc::InvalidArgument, "sha256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

struct RunManifest {
  std::vector<std::string> command_line;
  std::uint64_t seed = 0;
  std::string tool_version{kToolVersion};
  std::vector<std::pair<std::string, std::string>> input_digests;  // (name, sha256)
  double wall_seconds = 0.0;
  std::string host;

  void add_input(std::string name, std::string_view content) {
    input_digests.emplace_back(std::move(name), sha256_hex(content));
  }
};

inline std::string host_name() {
  char buf[256] = {};
  if (gethostname(buf, sizeof buf - 1) != 0) return "unknown";
  return buf;
}

inline io::Json manifest_to_json(const RunManifest& m) {
  io::Json digests = io::Json::object();
  for (const auto& [name, hex] : m.input_digests) digests[name] = hex;
  return io::Json{{"command_line", m.command_line}, {"seed", m.seed},
                  {"tool_version", m.tool_version}, {"input_digests", std::move(digests)},
                  {"wall_seconds", m.wall_seconds}, {"host", m.host}};
}

inline RunManifest manifest_from_json(const io::Json& j) {
  RunManifest m;
  m.command_line = j.at("command_line").get<std::vector<std::string>>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.tool_version = j.at("tool_version").get<std::string>();
  for (const auto& [k, v] : j.at("input_digests").items()) m.input_digests.emplace_back(k, v.get<std::string>());
  m.wall_seconds = j.at("wall_seconds").get<double>();
  m.host = j.at("host").get<std::string>();
  return m;
}

}  // namespace qgeo
