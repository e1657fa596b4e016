#pragma once

#include <cstdint>
#include <vector>

#include "microrev/drive.hpp"
#include "microrev/model.hpp"
#include "microrev/propagate.hpp"

namespace microrev {

/// Designated charge labels for post-selection and Gibbs emulation.
struct Subspace {
  std::vector<int> labels;

  /// {-half_width, ..., half_width}; the default is the 5-state set.
  static Subspace centered(int half_width = 2);
  /// Every label of the truncated basis.
  static Subspace full(const DeviceParams& params);

  bool contains(int label) const noexcept;
  std::size_t size() const noexcept { return labels.size(); }
};

/// P[m][n] = probability of outcome m given initial charge n.
struct TransitionMatrix {
  static constexpr double kStochasticTolerance = 1e-9;

  Eigen::MatrixXd probabilities;  // row = final basis index, col = initial
  Direction direction = Direction::forward;

  int max_label() const noexcept { return static_cast<int>(probabilities.rows() - 1) / 2; }
  Eigen::Index index_of(int label) const noexcept { return label + max_label(); }
  double at(int final_label, int initial_label) const {
    return probabilities(index_of(final_label), index_of(initial_label));
  }
  /// Probability of leaving `s` when starting in `initial_label`.
  double leakage(int initial_label, const Subspace& s) const;
};

struct PreparationEnsemble {
  Eigen::VectorXd probabilities;  // over the full basis, ascending label
  Subspace subspace;

  double subspace_mass() const;
  double probability(int label) const;
};

struct MeasurementRecord {
  std::uint64_t event = 0;
  int first = 0;   // n
  int second = 0;  // m
  Direction direction = Direction::forward;
};

struct ExperimentSample {
  std::vector<MeasurementRecord> records;
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;  // [m][n]
  std::uint64_t seed = 0;

  /// counts[m][n] / sum_m counts[m][n]; columns without events are zero.
  Eigen::MatrixXd conditional_frequencies() const;
};

struct MicrorevDeviation {
  double max_abs = 0.0;
  double mean_abs = 0.0;
  Eigen::MatrixXd cells;  // |P_F[m][n] - P_B[n][m]| over the subspace, [m][n]
};

/// P[m][n] = |<m|U|n>|^2.
TransitionMatrix transition_matrix(const UnitaryOperator& u,
                                   Direction direction = Direction::forward);

/// Charge distribution after one pass of the forward protocol, starting from
/// the ground eigenstate of H(0).
PreparationEnsemble prepare_ensemble(const DeviceParams& params, const DriveProtocol& protocol,
                                     const PropagatorConfig& config,
                                     Subspace subspace = Subspace::centered());

/// evolve + transition_matrix, tagged with the protocol direction.
TransitionMatrix run_protocol(const DeviceParams& params, const DriveProtocol& protocol,
                              const PropagatorConfig& config);

/// Monte Carlo two-point charge measurements: n from the ensemble, m from
/// P[.|n]. Deterministic per seed.
ExperimentSample sample_experiment(const PreparationEnsemble& prep, const TransitionMatrix& trans,
                                   std::uint64_t n_events, std::uint64_t seed);

/// Compares P_F[m][n] with P_B[n][m] over all (m, n) in the subspace.
/// Throws std::invalid_argument unless fwd is forward and bwd is backward.
MicrorevDeviation microrev_deviation(const TransitionMatrix& fwd, const TransitionMatrix& bwd,
                                     const Subspace& subspace);

}  // namespace microrev
