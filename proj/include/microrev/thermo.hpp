#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "microrev/drive.hpp"
#include "microrev/experiment.hpp"
#include "microrev/model.hpp"

namespace microrev {

enum class LadderSource {
  eigenstates,    // H(0) eigenenergies, mapped to labels by maximum overlap
  bare_charging,  // 4 E_C (n - n_g(0))^2
};

/// Charge label -> energy of the unperturbed Hamiltonian H0 = H(t = 0).
struct EnergyLadder {
  static constexpr double kMinOverlap = 0.99;

  std::vector<int> labels;
  std::vector<double> energies;  // rad/ns, same order as labels
  std::vector<double> overlaps;  // max-overlap purity per label (1 for bare)

  /// Throws std::out_of_range for a label outside the ladder.
  double energy(int label) const;
  std::optional<std::size_t> position(int label) const noexcept;
};

/// Boltzmann weights normalized over the ladder's labels.
struct GibbsWeights {
  double temperature = 0.0;  // K
  std::vector<int> labels;
  std::vector<double> weights;
};

struct WorkPoint {
  double work = 0.0;         // rad/ns
  double probability = 0.0;  // normalized over retained events
  std::uint64_t count = 0;   // sampled mode only
};

/// Two-point-measurement work W = E_final - E_initial. Events whose final
/// label leaves the ladder's subspace are post-selected out and reported as
/// leakage; the points are normalized over the retained mass.
struct WorkDistribution {
  static constexpr double kDedupTolerance = 1e-9;  // rad/ns

  Direction direction = Direction::forward;
  bool sampled = false;
  std::vector<WorkPoint> points;  // ascending work
  double leaked = 0.0;            // discarded fraction of events / mass
  std::uint64_t events = 0;       // retained events (sampled mode)
  std::uint64_t leaked_events = 0;

  /// Point whose work is within tolerance of `w`, if any.
  const WorkPoint* find(double w, double tol = kDedupTolerance) const noexcept;
};

struct BkRatioRecord {
  double work = 0.0;
  double forward_probability = 0.0;   // P[W; forward]
  double backward_probability = 0.0;  // P[-W; backward]
  double log_ratio = 0.0;             // ln(P_F[W] / P_B[-W]); NaN if unresolved
  double scaled_work = 0.0;           // W / k_B T
  bool resolved = false;              // both sides above the floor
};

struct BkEquality {
  double mean = 0.0;            // <exp(-W / k_B T)>
  double standard_error = 0.0;  // zero in exact mode
  std::uint64_t events = 0;
};

/// Throws std::invalid_argument if the protocol is not endpoint-closed, and
/// std::runtime_error if a label's maximum overlap is below kMinOverlap or
/// two labels map to the same eigenstate.
EnergyLadder energy_ladder(const DeviceParams& params, const DriveProtocol& protocol,
                           const Subspace& subspace = Subspace::centered(),
                           LadderSource source = LadderSource::eigenstates);

/// Throws std::domain_error for T <= 0.
GibbsWeights gibbs_weights(const EnergyLadder& ladder, double temperature);

/// Exact distribution: initial label from the weights, final from P[.|initial].
WorkDistribution work_distribution_exact(const GibbsWeights& weights,
                                         const TransitionMatrix& trans,
                                         const EnergyLadder& ladder);

/// Monte Carlo version of work_distribution_exact. Deterministic per seed.
WorkDistribution sample_work(const GibbsWeights& weights, const TransitionMatrix& trans,
                             const EnergyLadder& ladder, std::uint64_t n_events,
                             std::uint64_t seed);

/// One record per forward work value. `bwd` holds backward-protocol work
/// values, so P_B[-W] is looked up at -W. A side with probability <= floor
/// leaves the record unresolved instead of inventing a ratio.
std::vector<BkRatioRecord> bk_ratio_check(const WorkDistribution& fwd,
                                          const WorkDistribution& bwd, double temperature,
                                          double floor = 0.0);

/// Throws std::domain_error for T <= 0.
BkEquality bk_equality(const WorkDistribution& dist, double temperature);

}  // namespace microrev
