#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tennis::pipeline {

struct FileHash {
  std::string path;  // relative to out_dir (inputs may be absolute)
  std::string hash;  // fnv1a64 hex of the file bytes

  friend bool operator==(const FileHash&, const FileHash&) = default;
};

// Written next to every stage's artifacts. A stage is up to date when its
// manifest matches the current config hash, every input hash, and every
// output still hashes to what was recorded.
struct StageManifest {
  std::string stage;
  std::string profile;
  std::string config_hash;
  std::string state_order;
  std::uint64_t master_seed = 0;
  std::vector<FileHash> inputs;
  std::vector<FileHash> outputs;
};

std::string hash_file(const std::filesystem::path& path);
std::string hash_bytes(std::string_view bytes);

// Write-to-temp-then-rename in the target directory.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

void save_manifest(const std::filesystem::path& path, const StageManifest& manifest);
// Empty optional when the file is missing or unreadable.
bool load_manifest(const std::filesystem::path& path, StageManifest& out);

}  // namespace tennis::pipeline
