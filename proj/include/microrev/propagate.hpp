#pragma once

#include <vector>

#include "microrev/drive.hpp"
#include "microrev/model.hpp"

namespace microrev {

/// Midpoint-frozen exact exponential integrator settings. The interval is
/// split into ceil(length / time_step) equal steps, so time_step is an upper
/// bound on the step actually taken.
struct PropagatorConfig {
  double time_step = 1e-4;  // ns

  /// dt > 0 and dt <= duration / 100.
  void validate(double duration) const;
};

class UnitaryOperator {
 public:
  static constexpr double kUnitarityTolerance = 1e-10;

  UnitaryOperator() = default;
  /// Throws std::invalid_argument if the unitarity defect exceeds tolerance.
  explicit UnitaryOperator(ComplexMatrix m);

  static UnitaryOperator identity(Eigen::Index dim);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }

 private:
  struct Unchecked {};
  UnitaryOperator(ComplexMatrix m, Unchecked) : m_(std::move(m)) {}
  friend UnitaryOperator evolve_window(const DeviceParams&, const DriveProtocol&,
                                       const PropagatorConfig&, double, double);
  friend UnitaryOperator step_unitary(const HermitianOperator&, double);

  ComplexMatrix m_;
};

struct SpectrumTrace {
  std::vector<double> times;  // ns
  Eigen::MatrixXd energies;   // row per sample, ascending, ground at 0
};

/// exp(-i H dt) via eigendecomposition.
UnitaryOperator step_unitary(const HermitianOperator& h, double dt);

/// Time-ordered U(t1, t0) of the protocol; later factors multiply on the left.
UnitaryOperator evolve_window(const DeviceParams& params, const DriveProtocol& protocol,
                              const PropagatorConfig& config, double t0, double t1);

/// U(tau, 0).
UnitaryOperator evolve(const DeviceParams& params, const DriveProtocol& protocol,
                       const PropagatorConfig& config);

/// Eigenenergies relative to the instantaneous ground state at n_samples
/// evenly spaced times including both endpoints.
SpectrumTrace spectrum_trace(const DeviceParams& params, const DriveProtocol& protocol,
                             int n_samples);

/// max |U^dagger U - I| elementwise.
double unitarity_defect(const ComplexMatrix& u);

/// Max absolute difference of transition-matrix entries between dt and dt/2.
double convergence_estimate(const DeviceParams& params, const DriveProtocol& protocol,
                            const PropagatorConfig& config);

}  // namespace microrev
