#include "microrev/propagate.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "microrev/experiment.hpp"

namespace microrev {

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

}  // namespace

void PropagatorConfig::validate(double duration) const {
  if (!(time_step > 0.0) || !std::isfinite(time_step)) {
    throw std::invalid_argument("PropagatorConfig: time_step must be > 0");
  }
  if (time_step > duration / 100.0) {
    throw std::invalid_argument("PropagatorConfig: time_step " + std::to_string(time_step) +
                                " ns exceeds duration/100 = " + std::to_string(duration / 100.0));
  }
}

UnitaryOperator::UnitaryOperator(ComplexMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("UnitaryOperator: matrix must be square");
  const double defect = unitarity_defect(m_);
  if (!(defect <= kUnitarityTolerance)) {
    throw std::invalid_argument("UnitaryOperator: unitarity defect " + sci(defect));
  }
}

UnitaryOperator UnitaryOperator::identity(Eigen::Index dim) {
  return UnitaryOperator(ComplexMatrix::Identity(dim, dim), Unchecked{});
}

double unitarity_defect(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) throw std::invalid_argument("unitarity_defect: matrix must be square");
  if (u.size() == 0) return 0.0;
  const ComplexMatrix g = u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols());
  return g.cwiseAbs().maxCoeff();
}

UnitaryOperator step_unitary(const HermitianOperator& h, double dt) {
  if (dt == 0.0) return UnitaryOperator::identity(h.dim());
  const EigenSystem es = eigensystem(h);
  const Eigen::VectorXcd phases =
      (Complex(0.0, -dt) * es.energies.cast<Complex>()).array().exp().matrix();
  ComplexMatrix u = es.vectors * phases.asDiagonal() * es.vectors.adjoint();
  const double defect = unitarity_defect(u);
  if (!(defect <= 1e-12 * std::max<double>(1.0, static_cast<double>(u.rows()) / 10.0))) {
    throw std::runtime_error("step_unitary: unitarity defect " + sci(defect));
  }
  return UnitaryOperator(std::move(u), UnitaryOperator::Unchecked{});
}

namespace {

// exp(-i H dt) for the tridiagonal CPB Hamiltonian. With theta = arg(-E_J) and
// D = diag(exp(-i j theta)), T = D^dagger H D is real symmetric tridiagonal
// with off-diagonal |E_J|/2, so exp(-i H dt) = D Q exp(-i L dt) Q^T D^dagger.
class CpbStepper {
 public:
  explicit CpbStepper(const DeviceParams& params)
      : params_(params),
        n_(params.truncation),
        diag_(n_),
        offdiag_(n_ - 1),
        gauge_(2 * n_ - 1),
        q_(n_, n_),
        gram_(n_, n_),
        scaled_(n_, n_),
        re_(n_, n_),
        im_(n_, n_),
        step_(n_, n_) {}

  const ComplexMatrix& step(BiasPoint bias, double dt) {
    const Complex ej = josephson_energy(params_, bias.flux);
    const double theta = std::arg(-ej);
    for (Eigen::Index i = 0; i < n_; ++i) {
      const double q = params_.label_of(i) - bias.gate_charge;
      diag_(i) = 4.0 * params_.charging_energy * q * q;
    }
    offdiag_.setConstant(0.5 * std::abs(ej));
    solver_.computeFromTridiagonal(diag_, offdiag_, Eigen::ComputeEigenvectors);
    if (solver_.info() != Eigen::Success) {
      throw std::runtime_error("evolve: tridiagonal eigensolver did not converge");
    }
    // One Newton-Schulz sweep pulls Q back to orthogonal at rounding level;
    // otherwise the per-step unitarity error accumulates linearly.
    q_ = solver_.eigenvectors();
    gram_.noalias() = q_.transpose() * q_;
    scaled_.noalias() = q_ * gram_;
    q_ = 1.5 * q_ - 0.5 * scaled_;
    const Eigen::MatrixXd& q = q_;
    const Eigen::VectorXd& e = solver_.eigenvalues();

    scaled_.noalias() = q * (e * dt).array().cos().matrix().asDiagonal();
    re_.noalias() = scaled_ * q.transpose();
    scaled_.noalias() = q * (e * dt).array().sin().matrix().asDiagonal();
    im_.noalias() = scaled_ * q.transpose();
    // Exact symmetry keeps the forward and backward steps exact transposes.
    re_ = 0.5 * (re_ + re_.transpose()).eval();
    im_ = 0.5 * (im_ + im_.transpose()).eval();

    for (Eigen::Index d = -(n_ - 1); d <= n_ - 1; ++d) {
      gauge_(d + n_ - 1) = std::polar(1.0, -static_cast<double>(d) * theta);
    }
    for (Eigen::Index b = 0; b < n_; ++b) {
      for (Eigen::Index a = 0; a < n_; ++a) {
        step_(a, b) = gauge_(a - b + n_ - 1) * Complex(re_(a, b), -im_(a, b));
      }
    }
    return step_;
  }

 private:
  DeviceParams params_;
  Eigen::Index n_;
  Eigen::VectorXd diag_;
  Eigen::VectorXd offdiag_;
  Eigen::VectorXcd gauge_;
  Eigen::MatrixXd q_;
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd scaled_;
  Eigen::MatrixXd re_;
  Eigen::MatrixXd im_;
  ComplexMatrix step_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver_;
};

long step_count(double length, double dt) {
  const double x = length / dt;
  const double nearest = std::round(x);
  if (nearest >= 1.0 && std::abs(x - nearest) <= 1e-9 * nearest) return static_cast<long>(nearest);
  return std::max(1L, static_cast<long>(std::ceil(x)));
}

}  // namespace

UnitaryOperator evolve_window(const DeviceParams& params, const DriveProtocol& protocol,
                              const PropagatorConfig& config, double t0, double t1) {
  params.validate();
  protocol.validate();
  if (!(config.time_step > 0.0)) throw std::invalid_argument("evolve: time_step must be > 0");
  if (!(t0 >= 0.0 && t1 <= protocol.duration && t0 <= t1)) {
    throw std::out_of_range("evolve: window outside [0, duration]");
  }
  const Eigen::Index n = params.truncation;
  if (t1 == t0) return UnitaryOperator::identity(n);

  const long steps = step_count(t1 - t0, config.time_step);
  const double h = (t1 - t0) / static_cast<double>(steps);
  CpbStepper stepper(params);
  ComplexMatrix u = ComplexMatrix::Identity(n, n);
  ComplexMatrix next(n, n);
  for (long k = 0; k < steps; ++k) {
    const double mid = t0 + (static_cast<double>(k) + 0.5) * h;
    next.noalias() = stepper.step(sample_drive_unchecked(protocol, mid), h) * u;
    u.swap(next);
  }
  // Rounding in the step products leaves |det| and the column norms a few
  // ulps per step away from one; a final Newton-Schulz sweep projects back
  // onto the unitary group without touching anything at discretization scale.
  next.noalias() = u.adjoint() * u;
  next = 1.5 * ComplexMatrix::Identity(n, n) - 0.5 * next;
  u = (u * next).eval();
  const double defect = unitarity_defect(u);
  if (!(defect <= UnitaryOperator::kUnitarityTolerance)) {
    throw std::runtime_error("evolve: accumulated unitarity defect " + sci(defect) + " after " +
                             std::to_string(steps) + " steps");
  }
  return UnitaryOperator(std::move(u), UnitaryOperator::Unchecked{});
}

UnitaryOperator evolve(const DeviceParams& params, const DriveProtocol& protocol,
                       const PropagatorConfig& config) {
  return evolve_window(params, protocol, config, 0.0, protocol.duration);
}

SpectrumTrace spectrum_trace(const DeviceParams& params, const DriveProtocol& protocol,
                             int n_samples) {
  if (n_samples < 2) throw std::invalid_argument("spectrum_trace: n_samples must be >= 2");
  params.validate();
  protocol.validate();
  SpectrumTrace trace;
  trace.times.resize(static_cast<std::size_t>(n_samples));
  trace.energies.resize(n_samples, params.truncation);
  for (int s = 0; s < n_samples; ++s) {
    const double t = s + 1 == n_samples ? protocol.duration
                                        : protocol.duration * s / (n_samples - 1);
    const EigenSystem es = eigensystem(build_hamiltonian(params, sample_drive(protocol, t)));
    trace.times[static_cast<std::size_t>(s)] = t;
    trace.energies.row(s) = (es.energies.array() - es.energies(0)).matrix().transpose();
  }
  return trace;
}

double convergence_estimate(const DeviceParams& params, const DriveProtocol& protocol,
                            const PropagatorConfig& config) {
  const TransitionMatrix coarse = run_protocol(params, protocol, config);
  const TransitionMatrix fine =
      run_protocol(params, protocol, PropagatorConfig{.time_step = config.time_step / 2.0});
  return (coarse.probabilities - fine.probabilities).cwiseAbs().maxCoeff();
}

}  // namespace microrev
