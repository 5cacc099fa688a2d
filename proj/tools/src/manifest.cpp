#include "tebd/cli/manifest.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

namespace tebd::cli {

namespace {

std::string iso_timestamp(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("manifest: cannot checksum " + path);
  uint64_t hash = 1469598103934665603ull;
  char buf[8192];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ull;
    }
    if (!in) break;
  }
  return hash;
}

RunManifest::RunManifest(std::string out_dir, std::string command,
                         nlohmann::json resolved_config)
    : out_dir_(std::move(out_dir)), start_(std::chrono::system_clock::now()) {
  body_["command"] = std::move(command);
  body_["artifact_version"] = "0.1.0";
  body_["config"] = std::move(resolved_config);
  body_["stages"] = nlohmann::json::array();
  body_["files"] = nlohmann::json::array();
  body_["started_at"] = iso_timestamp(start_);
}

void RunManifest::add_stage(const std::string& name, double seconds) {
  body_["stages"].push_back({{"name", name}, {"seconds", seconds}});
}

void RunManifest::add_file(const std::string& name) {
  const std::filesystem::path full = std::filesystem::path(out_dir_) / name;
  char checksum[32];
  std::snprintf(checksum, sizeof checksum, "%016llx",
                static_cast<unsigned long long>(fnv1a64_file(full.string())));
  body_["files"].push_back({{"name", name},
                            {"bytes", std::filesystem::file_size(full)},
                            {"fnv1a64", checksum}});
}

void RunManifest::write() {
  body_["finished_at"] = iso_timestamp(std::chrono::system_clock::now());
  body_["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::system_clock::now() - start_).count();

  const std::filesystem::path final_path = std::filesystem::path(out_dir_) / "manifest.json";
  const std::filesystem::path tmp_path = final_path.string() + ".tmp";
  {
    std::ofstream out(tmp_path, std::ios::trunc);
    if (!out) throw std::runtime_error("manifest: cannot open " + tmp_path.string());
    out << body_.dump(2) << '\n';
  }
  std::filesystem::rename(tmp_path, final_path);
}

}  // namespace tebd::cli
