#include "cli/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "specclip/error.hpp"

namespace specclip::cli {

std::uint64_t config_hash(const Json& config) {
  const std::string text = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void OutputSet::add(const std::string& name, std::string contents) {
  if (name == "manifest.json") fail(Errc::InvalidArgument, "manifest.json is reserved");
  files_[name] = std::move(contents);
}

void OutputSet::commit(const std::filesystem::path& dir, const std::string& command, const Json& config,
                       const std::vector<std::uint64_t>& seeds, const std::string& started_at) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(Errc::IoError, "cannot create " + dir.string() + ": " + ec.message());
  Json files = Json::array();
  for (const auto& [name, contents] : files_) {
    const auto path = dir / name;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    out << contents;
    if (!out) fail(Errc::IoError, "cannot write " + path.string());
    files.push_back(name);
  }
  Json manifest = {
      {"command", command},
      {"config", config},
      {"config_hash", hex64(config_hash(config))},
      {"tool_version", SPECCLIP_VERSION},
      {"seeds", seeds},
      {"started_at", started_at},
      {"finished_at", utc_timestamp()},
      {"files", files},
  };
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  out << manifest.dump(2) << '\n';
  if (!out) fail(Errc::IoError, "cannot write manifest");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace specclip::cli
