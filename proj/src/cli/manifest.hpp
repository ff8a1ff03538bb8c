#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace specclip::cli {

/// FNV-1a over the canonical (key-sorted, compact) JSON text.
std::uint64_t config_hash(const Json& config);
std::string hex64(std::uint64_t v);

/// Files are staged in memory and written together with the manifest, so a
/// command that fails part way leaves no partial output behind.
class OutputSet {
 public:
  void add(const std::string& name, std::string contents);
  const std::map<std::string, std::string>& files() const { return files_; }

  /// Writes every staged file plus manifest.json into dir.
  void commit(const std::filesystem::path& dir, const std::string& command, const Json& config,
              const std::vector<std::uint64_t>& seeds, const std::string& started_at) const;

 private:
  std::map<std::string, std::string> files_;
};

std::string utc_timestamp();

}  // namespace specclip::cli
