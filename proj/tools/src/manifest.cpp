#include "manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "csv.hpp"
#include "mtvpar/error.hpp"

namespace mtvpar::io {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void mix(std::uint64_t& h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
}

void mix_size(std::uint64_t& h, std::uint64_t n) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((n >> (8 * i)) & 0xff);
  mix(h, std::string_view(bytes, 8));
}

}  // namespace

std::string digest_files(const std::vector<std::filesystem::path>& paths) {
  std::uint64_t h = kFnvOffset;
  for (const auto& path : paths) {
    const std::string name = path.filename().string();
    const std::string contents = read_file(path);
    mix_size(h, name.size());
    mix(h, name);
    mix_size(h, contents.size());
    mix(h, contents);
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + hex;
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["config"] = m.config;
  j["argv"] = m.argv;
  j["seed"] = m.seed ? nlohmann::json(*m.seed) : nlohmann::json(nullptr);
  j["inputs"] = m.inputs;
  j["input_digest"] = m.input_digest;
  j["tool_version"] = m.tool_version;
  j["timestamp"] = m.timestamp;
  return j;
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  try {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config = j.at("config");
    m.argv = j.at("argv").get<std::vector<std::string>>();
    if (!j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
    m.inputs = j.at("inputs").get<std::vector<std::string>>();
    m.input_digest = j.at("input_digest").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.timestamp = j.at("timestamp").get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed manifest: ") + e.what());
  }
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest) {
  // nlohmann::json objects are std::map backed, so keys come out sorted.
  write_file(dir / "manifest.json", to_json(manifest).dump(2) + "\n");
}

RunManifest read_manifest(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::ParseError, path.string() + ": not valid JSON");
  }
  return manifest_from_json(j);
}

}  // namespace mtvpar::io
