// manifest.hpp
// manifest.json: what produced an output directory and how to produce it
// again.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mtvpar::io {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();  // resolved parameters
  std::vector<std::string> argv;  // canonical command line, without --out
  std::optional<std::uint64_t> seed;
  std::vector<std::string> inputs;  // paths covered by input_digest
  std::string input_digest;
  std::string tool_version = kToolVersion;
  std::string timestamp;  // UTC, ISO 8601
};

// FNV-1a over each input's name length, name, size and bytes, in order.
std::string digest_files(const std::vector<std::filesystem::path>& paths);

std::string utc_timestamp();

nlohmann::json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& json);

// Keys sorted, two-space indent, trailing newline.
void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace mtvpar::io
