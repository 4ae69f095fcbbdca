#include "tennis/pipeline/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tennis/errors.hpp"
#include "tennis/rng.hpp"

namespace tennis::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::string hash_bytes(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return std::string(buf);
}

std::string hash_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file for hashing: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return hash_bytes(ss.str());
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write: " + tmp.string());
  }
  fs::rename(tmp, path);
}

void save_manifest(const fs::path& path, const StageManifest& manifest) {
  json j;
  j["stage"] = manifest.stage;
  j["profile"] = manifest.profile;
  j["config_hash"] = manifest.config_hash;
  j["state_order"] = manifest.state_order;
  j["master_seed"] = manifest.master_seed;
  auto files = [](const std::vector<FileHash>& list) {
    json arr = json::array();
    for (const auto& f : list) arr.push_back({{"path", f.path}, {"hash", f.hash}});
    return arr;
  };
  j["inputs"] = files(manifest.inputs);
  j["outputs"] = files(manifest.outputs);
  write_file_atomic(path, j.dump(2) + "\n");
}

bool load_manifest(const fs::path& path, StageManifest& out) {
  std::ifstream in(path);
  if (!in) return false;
  json j;
  try {
    in >> j;
    out.stage = j.at("stage").get<std::string>();
    out.profile = j.at("profile").get<std::string>();
    out.config_hash = j.at("config_hash").get<std::string>();
    out.state_order = j.at("state_order").get<std::string>();
    out.master_seed = j.value("master_seed", std::uint64_t{0});
    auto files = [](const json& arr) {
      std::vector<FileHash> list;
      for (const auto& f : arr) {
        list.push_back({f.at("path").get<std::string>(), f.at("hash").get<std::string>()});
      }
      return list;
    };
    out.inputs = files(j.at("inputs"));
    out.outputs = files(j.at("outputs"));
  } catch (const json::exception&) {
    return false;
  }
  return true;
}

}  // namespace tennis::pipeline
