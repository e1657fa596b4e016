#include "microrev/io.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#ifndef MICROREV_VERSION
#define MICROREV_VERSION "0.0.0"
#endif

namespace microrev::app {

std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

OutputSet::OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

void OutputSet::write_text(const std::string& name, const std::string& content) {
  const std::filesystem::path path = dir_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
  written_.emplace_back(name, sha256_hex(content));
}

void OutputSet::write_json(const std::string& name, const nlohmann::json& j) {
  write_text(name, j.dump(2) + "\n");
}

void OutputSet::write_manifest(const std::string& command, const nlohmann::json& config,
                               std::uint64_t seed) {
  if (manifest_written_) throw std::logic_error("manifest already written");
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);

  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& [name, sha] : written_) outputs.push_back({{"path", name}, {"sha256", sha}});
  const nlohmann::json manifest = {{"tool", "microrev"},
                                   {"version", MICROREV_VERSION},
                                   {"command", command},
                                   {"timestamp", stamp},
                                   {"seed", seed},
                                   {"config", config},
                                   {"outputs", outputs}};
  std::ofstream out(dir_ / "manifest.json", std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest in " + dir_.string());
  out << manifest.dump(2) << "\n";
  manifest_written_ = true;
}

CsvTable::CsvTable(std::vector<std::string> header) : width_(header.size()) {
  row(header);
}

CsvTable& CsvTable::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(csv_number(v));
  return row(cells);
}

CsvTable& CsvTable::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw std::invalid_argument("CsvTable: row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ += ',';
    out_ += cells[i];
  }
  out_ += '\n';
  return *this;
}

std::string CsvTable::str() const { return out_; }

}  // namespace microrev::app
