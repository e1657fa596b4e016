#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "microrev/experiment.hpp"

namespace test_support {

inline const microrev::DeviceParams& defaults() {
  static const microrev::DeviceParams d;
  return d;
}

// Default forward/backward transition matrices at dt = 1e-4 ns, computed once
// per test binary because each run costs a few seconds.
inline const microrev::TransitionMatrix& forward_default() {
  static const microrev::TransitionMatrix t =
      microrev::run_protocol(defaults(), microrev::default_protocol(), {});
  return t;
}

inline const microrev::TransitionMatrix& backward_default() {
  static const microrev::TransitionMatrix t = microrev::run_protocol(
      defaults(), microrev::reverse_protocol(microrev::default_protocol()), {});
  return t;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("microrev-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace test_support
