#include "microrev/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "microrev/sampling.hpp"

namespace microrev {

Subspace Subspace::centered(int half_width) {
  if (half_width < 0) throw std::invalid_argument("Subspace: half_width must be >= 0");
  Subspace s;
  for (int n = -half_width; n <= half_width; ++n) s.labels.push_back(n);
  return s;
}

Subspace Subspace::full(const DeviceParams& params) { return centered(params.max_label()); }

bool Subspace::contains(int label) const noexcept {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

double TransitionMatrix::leakage(int initial_label, const Subspace& s) const {
  double kept = 0.0;
  for (int m : s.labels) kept += at(m, initial_label);
  return std::max(0.0, 1.0 - kept);
}

double PreparationEnsemble::subspace_mass() const {
  double mass = 0.0;
  for (int n : subspace.labels) mass += probability(n);
  return mass;
}

double PreparationEnsemble::probability(int label) const {
  const Eigen::Index max_label = (probabilities.size() - 1) / 2;
  if (label < -max_label || label > max_label) {
    throw std::out_of_range("PreparationEnsemble: label " + std::to_string(label));
  }
  return probabilities(label + max_label);
}

Eigen::MatrixXd ExperimentSample::conditional_frequencies() const {
  Eigen::MatrixXd f = counts.cast<double>();
  for (Eigen::Index n = 0; n < f.cols(); ++n) {
    const double total = f.col(n).sum();
    if (total > 0.0) f.col(n) /= total;
  }
  return f;
}

TransitionMatrix transition_matrix(const UnitaryOperator& u, Direction direction) {
  return TransitionMatrix{u.matrix().cwiseAbs2(), direction};
}

PreparationEnsemble prepare_ensemble(const DeviceParams& params, const DriveProtocol& protocol,
                                     const PropagatorConfig& config, Subspace subspace) {
  if (protocol.direction != Direction::forward) {
    throw std::invalid_argument("prepare_ensemble: preparation uses the forward protocol");
  }
  for (int n : subspace.labels) params.index_of(n);
  const EigenSystem initial = eigensystem(build_hamiltonian(params, sample_drive(protocol, 0.0)));
  const UnitaryOperator u = evolve(params, protocol, config);
  Eigen::VectorXd p = (u.matrix() * initial.vectors.col(0)).cwiseAbs2();
  p /= p.sum();
  return PreparationEnsemble{std::move(p), std::move(subspace)};
}

TransitionMatrix run_protocol(const DeviceParams& params, const DriveProtocol& protocol,
                              const PropagatorConfig& config) {
  return transition_matrix(evolve(params, protocol, config), protocol.direction);
}

ExperimentSample sample_experiment(const PreparationEnsemble& prep, const TransitionMatrix& trans,
                                   std::uint64_t n_events, std::uint64_t seed) {
  if (n_events < 1) throw std::invalid_argument("sample_experiment: n_events must be >= 1");
  const Eigen::Index dim = trans.probabilities.rows();
  if (prep.probabilities.size() != dim) {
    throw std::invalid_argument("sample_experiment: ensemble and transition matrix differ in size");
  }
  const int max_label = trans.max_label();
  const sampling::Categorical first(
      std::span<const double>(prep.probabilities.data(), static_cast<std::size_t>(dim)));
  std::vector<sampling::Categorical> second;
  second.reserve(static_cast<std::size_t>(dim));
  for (Eigen::Index n = 0; n < dim; ++n) {
    // Unreachable columns still need a valid sampler.
    if (prep.probabilities(n) > 0.0) {
      const Eigen::VectorXd col = trans.probabilities.col(n);
      second.emplace_back(std::span<const double>(col.data(), static_cast<std::size_t>(dim)));
    } else {
      std::vector<double> self(static_cast<std::size_t>(dim), 0.0);
      self[static_cast<std::size_t>(n)] = 1.0;
      second.emplace_back(self);
    }
  }

  ExperimentSample out;
  out.seed = seed;
  out.records.resize(n_events);
  sampling::for_each_partition(n_events, [&](std::uint64_t part, std::uint64_t begin,
                                             std::uint64_t count) {
    auto engine = sampling::partition_engine(seed, part);
    for (std::uint64_t e = begin; e < begin + count; ++e) {
      const std::size_t n = first(engine);
      const std::size_t m = second[n](engine);
      out.records[e] = MeasurementRecord{e, static_cast<int>(n) - max_label,
                                         static_cast<int>(m) - max_label, trans.direction};
    }
  });
  out.counts.setZero(dim, dim);
  for (const MeasurementRecord& r : out.records) {
    out.counts(r.second + max_label, r.first + max_label) += 1;
  }
  return out;
}

MicrorevDeviation microrev_deviation(const TransitionMatrix& fwd, const TransitionMatrix& bwd,
                                     const Subspace& subspace) {
  if (fwd.direction != Direction::forward || bwd.direction != Direction::backward) {
    throw std::invalid_argument(
        "microrev_deviation: expects a forward and a backward transition matrix");
  }
  if (fwd.probabilities.rows() != bwd.probabilities.rows()) {
    throw std::invalid_argument("microrev_deviation: basis size mismatch");
  }
  const auto k = static_cast<Eigen::Index>(subspace.size());
  MicrorevDeviation dev;
  dev.cells.resize(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const int m = subspace.labels[static_cast<std::size_t>(i)];
      const int n = subspace.labels[static_cast<std::size_t>(j)];
      dev.cells(i, j) = std::abs(fwd.at(m, n) - bwd.at(n, m));
    }
  }
  dev.max_abs = k > 0 ? dev.cells.maxCoeff() : 0.0;
  dev.mean_abs = k > 0 ? dev.cells.mean() : 0.0;
  return dev;
}

}  // namespace microrev
