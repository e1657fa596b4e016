#include "microrev/noise.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "microrev/units.hpp"

namespace microrev {

namespace {

constexpr double kNoTransverseCoupling = 1e-30;  // |<e_k|n|e_k+1>|^2
constexpr double kNoLongitudinalShift = 1e-24;   // |diagonal difference|^2

}  // namespace

double thermal_factor(double x) noexcept {
  if (std::abs(x) < 1e-4) return 1.0 + x * x / 3.0;
  return x / std::tanh(x);
}

DephasingRatioPoint dephasing_ratio(const DeviceParams& params, BiasPoint bias,
                                    double bath_temperature, int level, double time) {
  if (!(bath_temperature > 0.0)) {
    throw std::domain_error("dephasing_ratio: bath temperature must be > 0");
  }
  if (level < 0 || level + 1 >= params.truncation) {
    throw std::out_of_range("dephasing_ratio: level " + std::to_string(level) +
                            " needs a level above it in the basis");
  }
  const EigenSystem es = eigensystem(build_hamiltonian(params, bias));
  const Eigen::VectorXd n = charge_operator(params).matrix().diagonal().real();
  const auto lower = es.vectors.col(level);
  const auto upper = es.vectors.col(level + 1);

  const Complex transverse = (lower.conjugate().array() * n.array() * upper.array()).sum();
  const double shift = (lower.cwiseAbs2().array() * n.array()).sum() -
                       (upper.cwiseAbs2().array() * n.array()).sum();
  const double numerator = 4.0 * std::norm(transverse);
  const double denominator = shift * shift;
  const double gap = es.energies(level + 1) - es.energies(level);
  const double x = gap / (2.0 * units::thermal_energy(bath_temperature));

  DephasingRatioPoint p;
  p.time = time;
  p.level = level;
  p.beta = beta_ratio(params, bias.flux);
  if (numerator <= kNoTransverseCoupling) {
    p.ratio = 0.0;
    p.t2_over_t1 = 0.0;
  } else if (denominator <= kNoLongitudinalShift) {
    p.ratio = std::numeric_limits<double>::infinity();
    p.t2_over_t1 = 2.0;
  } else {
    p.ratio = numerator / denominator * thermal_factor(x);
    p.t2_over_t1 = 1.0 / (0.5 + 1.0 / p.ratio);
  }
  return p;
}

std::vector<DephasingRatioPoint> ratio_trace(const DeviceParams& params,
                                             const DriveProtocol& protocol, int n_samples,
                                             double bath_temperature, int level) {
  if (n_samples < 2) throw std::invalid_argument("ratio_trace: n_samples must be >= 2");
  protocol.validate();
  std::vector<DephasingRatioPoint> trace;
  trace.reserve(static_cast<std::size_t>(n_samples));
  for (int s = 0; s < n_samples; ++s) {
    const double t = s + 1 == n_samples ? protocol.duration
                                        : protocol.duration * s / (n_samples - 1);
    trace.push_back(dephasing_ratio(params, sample_drive(protocol, t), bath_temperature, level, t));
  }
  return trace;
}

double window_width(const std::vector<DephasingRatioPoint>& trace,
                    const std::function<bool(const DephasingRatioPoint&)>& pred) {
  double width = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (!pred(trace[i])) continue;
    const double lo = i == 0 ? trace[i].time : 0.5 * (trace[i - 1].time + trace[i].time);
    const double hi =
        i + 1 == trace.size() ? trace[i].time : 0.5 * (trace[i].time + trace[i + 1].time);
    width += hi - lo;
  }
  return width;
}

FidelityLoss fidelity_loss(const std::vector<DephasingRatioPoint>& trace, double t1_ns) {
  if (!(t1_ns > 0.0)) throw std::domain_error("fidelity_loss: T_1 must be > 0");
  FidelityLoss loss;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const double dt = trace[i].time - trace[i - 1].time;
    loss.relaxation += dt / t1_ns;
    loss.dephasing += 0.5 * dt *
                      (1.0 / trace[i - 1].t2_over_t1 + 1.0 / trace[i].t2_over_t1) / t1_ns;
  }
  return loss;
}

void DetectorParams::validate() const {
  if (!(charge_sensitivity > 0.0) || !(measurement_time > 0.0) || !(island_capacitance > 0.0)) {
    throw std::domain_error(
        "DetectorParams: sensitivity, measurement time and island capacitance must be > 0");
  }
  if (!(coupling_capacitance >= 0.0)) {
    throw std::domain_error("DetectorParams: coupling capacitance must be >= 0");
  }
}

Distinguishability detector_distinguishability(const DetectorParams& det) {
  det.validate();
  Distinguishability d;
  d.charge_noise = det.charge_sensitivity / std::sqrt(det.measurement_time * 1e-9);
  d.charge_separation = 2.0 * det.coupling_capacitance / det.island_capacitance;
  d.kolmogorov_distance =
      std::erf(d.charge_separation / (2.0 * std::numbers::sqrt2 * d.charge_noise));
  d.success_probability = 0.5 * (1.0 + d.kolmogorov_distance);
  return d;
}

}  // namespace microrev
