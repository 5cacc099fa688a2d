#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace tebd::cli {

/// Provenance record written at the end of every run: the resolved
/// configuration, timing per stage and a checksummed inventory of the
/// produced files. Timestamps live only here so the data files stay
/// byte-reproducible.
class RunManifest {
public:
  RunManifest(std::string out_dir, std::string command, nlohmann::json resolved_config);

  void add_stage(const std::string& name, double seconds);
  void add_file(const std::string& name);  // relative to the output directory

  /// Writes manifest.json atomically (temp file + rename).
  void write();

private:
  std::string out_dir_;
  nlohmann::json body_;
  std::chrono::system_clock::time_point start_;
};

uint64_t fnv1a64_file(const std::string& path);

}  // namespace tebd::cli
