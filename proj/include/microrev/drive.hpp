#pragma once

#include <filesystem>
#include <istream>
#include <variant>
#include <vector>

#include "microrev/model.hpp"

namespace microrev {

/// value(t) = offset + amplitude cos(2 pi frequency t + phase), t in ns.
struct Waveform {
  double offset = 0.0;
  double amplitude = 0.0;
  double frequency = 0.0;  // cycles/ns
  double phase = 0.0;      // rad

  double operator()(double t) const noexcept;
  void validate() const;
};

/// Flux and gate-charge waveforms from the offset-cosine family.
struct CosineDrive {
  Waveform flux;
  Waveform gate;
};

/// Piecewise-linear (t, flux, n_g) samples; first time must be 0 and times
/// strictly increasing.
class TabulatedDrive {
 public:
  TabulatedDrive(std::vector<double> times, std::vector<double> flux,
                 std::vector<double> gate);

  /// Reads a CSV with header "t_ns,flux_phi0,n_g".
  static TabulatedDrive from_csv(std::istream& in);
  static TabulatedDrive from_csv(const std::filesystem::path& path);

  BiasPoint at(double t) const;
  double end_time() const noexcept { return times_.back(); }
  const std::vector<double>& times() const noexcept { return times_; }

 private:
  std::vector<double> times_;
  std::vector<double> flux_;
  std::vector<double> gate_;
};

enum class Direction { forward, backward };

const char* to_string(Direction d) noexcept;

/// How the backward protocol is derived from the forward one. Both flags are
/// true for the physical motion reversal; clearing one gives a negative control.
struct ReversalRules {
  bool invert_flux = true;
  bool mirror_time = true;
};

struct DriveProtocol {
  std::variant<CosineDrive, TabulatedDrive> shape;
  double duration = 2.0 / 3.0;  // ns
  Direction direction = Direction::forward;
  ReversalRules reversal;

  void validate() const;
};

/// Flux (Phi0/2) cos(3 pi t), gate 0.05 - 2 cos(3 pi t); one full period.
DriveProtocol default_protocol();

/// Forward: the waveforms at t. Backward: (-flux(tau - t), n_g(tau - t)),
/// subject to the reversal rules. Throws std::out_of_range outside [0, tau].
BiasPoint sample_drive(const DriveProtocol& p, double t);

/// Same as sample_drive without the range check, for interior quadrature
/// nodes of callers that have already validated the window.
BiasPoint sample_drive_unchecked(const DriveProtocol& p, double t) noexcept;

/// Toggles the direction. Reversing twice samples identically to the input.
DriveProtocol reverse_protocol(const DriveProtocol& p);

/// True when bias(0) and bias(tau) agree within `tol` in both components.
bool is_cyclic(const DriveProtocol& p, double tol = 1e-12);

}  // namespace microrev
