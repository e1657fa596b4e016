#pragma once

#include <Eigen/Dense>

#include <complex>

#include "microrev/units.hpp"

namespace microrev {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Cooper-pair-box constants and charge-basis truncation.
///
/// The basis holds the charge labels n = -(N-1)/2 ... (N-1)/2 in ascending
/// order; basis index i corresponds to label i - (N-1)/2.
struct DeviceParams {
  double charging_energy = units::ghz(3.0);         // E_C, rad/ns
  double total_josephson_energy = units::ghz(10.0); // E_J sum, rad/ns
  double asymmetry = 0.05;                          // (E_J1 - E_J2) / E_J sum
  int truncation = 51;                              // odd, >= 5

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  int max_label() const noexcept { return (truncation - 1) / 2; }
  int label_of(Eigen::Index index) const noexcept {
    return static_cast<int>(index) - max_label();
  }
  Eigen::Index index_of(int label) const;
  bool has_label(int label) const noexcept {
    return label >= -max_label() && label <= max_label();
  }
};

struct BiasPoint {
  double flux = 0.0;         // units of the flux quantum
  double gate_charge = 0.0;  // n_g
};

/// Dense Hermitian matrix in the ordered charge basis.
class HermitianOperator {
 public:
  static constexpr double kHermiticityTolerance = 1e-12;

  HermitianOperator() = default;
  /// Throws std::invalid_argument if `m` is not square or not Hermitian.
  explicit HermitianOperator(ComplexMatrix m);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }

 private:
  ComplexMatrix m_;
};

/// Ascending energies with orthonormal eigenvectors in the columns. Each
/// column is phased so that its largest-magnitude component is real-positive.
struct EigenSystem {
  Eigen::VectorXd energies;
  ComplexMatrix vectors;
};

/// E_J(flux) = E_JSum (cos(pi flux) + i alpha sin(pi flux)).
Complex josephson_energy(const DeviceParams& params, double flux) noexcept;

/// beta = |E_J(flux)| / (4 E_C).
double beta_ratio(const DeviceParams& params, double flux) noexcept;

/// Tridiagonal CPB Hamiltonian: 4E_C (n - n_g)^2 on the diagonal,
/// -E_J/2 on <n|H|n+1> and -E_J^*/2 on <n+1|H|n>.
HermitianOperator build_hamiltonian(const DeviceParams& params, BiasPoint bias);

/// Anti-unitary time reversal with Theta|n> = |n>: elementwise conjugation.
HermitianOperator time_reverse_hamiltonian(const HermitianOperator& h);

/// Throws std::runtime_error if the solver fails.
EigenSystem eigensystem(const HermitianOperator& h);

/// Diagonal operator of charge labels.
HermitianOperator charge_operator(const DeviceParams& params);

}  // namespace microrev
