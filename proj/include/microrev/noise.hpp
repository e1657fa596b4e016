#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "microrev/drive.hpp"
#include "microrev/model.hpp"

namespace microrev {

struct DephasingRatioPoint {
  double time = 0.0;    // ns
  int level = 0;        // k; the pair is (k, k+1)
  double ratio = 0.0;   // T_phi / T_1, +inf when pure dephasing vanishes
  double t2_over_t1 = 0.0;
  double beta = 0.0;
};

struct DetectorParams {
  double charge_sensitivity = 1.7e-6;  // sqrt(S_Q), e / sqrt(Hz)
  double measurement_time = 20.0;      // ns
  double island_capacitance = 6.5;     // C_Sigma, fF
  double coupling_capacitance = 0.20;  // C_C, fF

  /// All strictly positive except C_C, which may be zero (decoupled detector).
  void validate() const;
};

struct Distinguishability {
  double charge_noise = 0.0;         // sigma_Q, e
  double charge_separation = 0.0;    // Delta Q_C, e
  double kolmogorov_distance = 0.0;  // D
  double success_probability = 0.0; // P_D = (1 + D) / 2
};

struct FidelityLoss {
  double relaxation = 0.0;  // integral of dt / T_1
  double dephasing = 0.0;   // integral of dt / T_2
};

/// x coth x, continuous at x = 0.
double thermal_factor(double x) noexcept;

/// T_phi / T_1 ~ 4 |<e_k|n|e_k+1>|^2 / |<e_k|n|e_k> - <e_k+1|n|e_k+1>|^2
///              * (de / 2 k_B T) coth(de / 2 k_B T)
/// with T_2 / T_1 = 1 / (1/2 + T_1 / T_phi).
/// Throws std::domain_error for T <= 0, std::out_of_range for a bad level.
DephasingRatioPoint dephasing_ratio(const DeviceParams& params, BiasPoint bias,
                                    double bath_temperature, int level, double time = 0.0);

/// dephasing_ratio at n_samples evenly spaced protocol times, endpoints included.
std::vector<DephasingRatioPoint> ratio_trace(const DeviceParams& params,
                                             const DriveProtocol& protocol, int n_samples,
                                             double bath_temperature, int level = 0);

/// Total time covered by trace samples that satisfy `pred`, each sample
/// standing for the half-intervals to its neighbours.
double window_width(const std::vector<DephasingRatioPoint>& trace,
                    const std::function<bool(const DephasingRatioPoint&)>& pred);

/// Trapezoidal integrals of 1/T_1 and 1/T_2 along the trace for a constant T_1.
FidelityLoss fidelity_loss(const std::vector<DephasingRatioPoint>& trace, double t1_ns = 50.0);

/// Trace distance between two equal-width Gaussian readout distributions
/// separated by the charge one Cooper pair induces on the coupling capacitor.
/// Throws std::domain_error for invalid parameters.
Distinguishability detector_distinguishability(const DetectorParams& det);

}  // namespace microrev
