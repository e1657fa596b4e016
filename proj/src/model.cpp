#include "microrev/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace microrev {

void DeviceParams::validate() const {
  if (!(charging_energy > 0.0) || !std::isfinite(charging_energy)) {
    throw std::invalid_argument("DeviceParams: charging_energy must be > 0");
  }
  if (!(total_josephson_energy >= 0.0) || !std::isfinite(total_josephson_energy)) {
    throw std::invalid_argument("DeviceParams: total_josephson_energy must be >= 0");
  }
  if (!(std::abs(asymmetry) <= 1.0)) {
    throw std::invalid_argument("DeviceParams: |asymmetry| must be <= 1");
  }
  if (truncation < 5 || truncation % 2 == 0) {
    throw std::invalid_argument("DeviceParams: truncation must be odd and >= 5, got " +
                                std::to_string(truncation));
  }
}

Eigen::Index DeviceParams::index_of(int label) const {
  if (!has_label(label)) {
    throw std::out_of_range("charge label " + std::to_string(label) + " outside the basis");
  }
  return static_cast<Eigen::Index>(label + max_label());
}

HermitianOperator::HermitianOperator(ComplexMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw std::invalid_argument("HermitianOperator: matrix must be square");
  }
  const double defect = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  if (m_.size() > 0 && !(defect <= kHermiticityTolerance)) {
    throw std::invalid_argument("HermitianOperator: matrix is not Hermitian (defect " +
                                std::to_string(defect) + ")");
  }
}

Complex josephson_energy(const DeviceParams& params, double flux) noexcept {
  // sin is odd and cos even in IEEE arithmetic, so E_J(-flux) == conj(E_J(flux)).
  const double arg = units::kPi * flux;
  return params.total_josephson_energy * Complex(std::cos(arg), params.asymmetry * std::sin(arg));
}

double beta_ratio(const DeviceParams& params, double flux) noexcept {
  return std::abs(josephson_energy(params, flux)) / (4.0 * params.charging_energy);
}

HermitianOperator build_hamiltonian(const DeviceParams& params, BiasPoint bias) {
  const Eigen::Index n = params.truncation;
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  const Complex ej = josephson_energy(params, bias.flux);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double q = params.label_of(i) - bias.gate_charge;
    h(i, i) = 4.0 * params.charging_energy * q * q;
    if (i + 1 < n) {
      h(i, i + 1) = -0.5 * ej;
      h(i + 1, i) = -0.5 * std::conj(ej);
    }
  }
  return HermitianOperator(std::move(h));
}

HermitianOperator time_reverse_hamiltonian(const HermitianOperator& h) {
  return HermitianOperator(h.matrix().conjugate());
}

EigenSystem eigensystem(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigensystem: Hermitian eigensolver did not converge (dim " +
                             std::to_string(h.dim()) + ")");
  }
  EigenSystem es{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index k = 0; k < es.vectors.cols(); ++k) {
    Eigen::Index pivot = 0;
    es.vectors.col(k).cwiseAbs2().maxCoeff(&pivot);
    const Complex c = es.vectors(pivot, k);
    es.vectors.col(k) *= std::conj(c) / std::abs(c);
    es.vectors(pivot, k) = std::abs(c);
  }
  return es;
}

HermitianOperator charge_operator(const DeviceParams& params) {
  const Eigen::Index n = params.truncation;
  ComplexMatrix q = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) q(i, i) = params.label_of(i);
  return HermitianOperator(std::move(q));
}

}  // namespace microrev
