#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "microrev/drive.hpp"
#include "microrev/experiment.hpp"
#include "microrev/model.hpp"
#include "microrev/noise.hpp"
#include "microrev/propagate.hpp"
#include "microrev/thermo.hpp"

namespace microrev::app {

/// Raised for malformed or out-of-contract configuration (exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class SampleMode { exact, sampled };

struct ProtocolSpec {
  CosineDrive drive = std::get<CosineDrive>(default_protocol().shape);
  std::optional<std::string> table;  // CSV path; overrides the cosine drive
  double duration = 2.0 / 3.0;
  ReversalRules reversal;
};

struct NoiseSpec {
  double bath_temperature = 0.03;  // K
  int level = 0;
  int samples = 2001;
  double t1_ns = 50.0;
  DetectorParams detector;
};

struct RunConfig {
  DeviceParams device;
  ProtocolSpec protocol;
  PropagatorConfig propagator;
  std::vector<int> subspace = {-2, -1, 0, 1, 2};
  bool full_space = false;  // "subspace": "full"
  LadderSource ladder = LadderSource::eigenstates;
  std::vector<double> temperatures = {1, 10, 20, 30, 40, 50};
  std::uint64_t events = 1'000'000;
  std::uint64_t seed = 20140523;
  SampleMode mode = SampleMode::sampled;
  int spectrum_samples = 401;
  double microrev_tolerance = 1e-3;
  NoiseSpec noise;
  std::string output = "microrev-out";

  /// Throws ConfigError on any violated invariant.
  void validate() const;

  DriveProtocol forward_protocol() const;
  DriveProtocol backward_protocol() const;
  Subspace designated_subspace() const;
};

/// Unknown keys and wrong types raise ConfigError.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace microrev::app
