#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace microrev::app {

/// Fixed CSV formatting: 12 significant digits.
std::string csv_number(double x);

std::string sha256_hex(std::string_view bytes);

/// Files written by one subcommand run. Every write is recorded with its
/// SHA-256 so the manifest can be emitted once at the end.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }

  void write_text(const std::string& name, const std::string& content);
  /// Numbers keep full round-trip precision.
  void write_json(const std::string& name, const nlohmann::json& j);

  /// Writes manifest.json: command, config echo, version, timestamp, seed and
  /// per-output checksums. Throws std::logic_error when called twice.
  void write_manifest(const std::string& command, const nlohmann::json& config,
                      std::uint64_t seed);

  const std::vector<std::pair<std::string, std::string>>& written() const noexcept {
    return written_;
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> written_;  // name, sha256
  bool manifest_written_ = false;
};

/// Simple row-oriented CSV builder.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  CsvTable& row(const std::vector<double>& values);
  CsvTable& row(const std::vector<std::string>& cells);
  std::string str() const;

 private:
  std::string out_;
  std::size_t width_;
};

}  // namespace microrev::app
