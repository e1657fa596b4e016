#include "microrev/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "microrev/sampling.hpp"
#include "microrev/units.hpp"

namespace microrev {

double EnergyLadder::energy(int label) const {
  const auto pos = position(label);
  if (!pos) throw std::out_of_range("EnergyLadder: label " + std::to_string(label));
  return energies[*pos];
}

std::optional<std::size_t> EnergyLadder::position(int label) const noexcept {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels.begin());
}

const WorkPoint* WorkDistribution::find(double w, double tol) const noexcept {
  const auto it = std::lower_bound(points.begin(), points.end(), w - tol,
                                   [](const WorkPoint& p, double x) { return p.work < x; });
  const WorkPoint* best = nullptr;
  for (auto j = it; j != points.end() && j->work <= w + tol; ++j) {
    if (!best || std::abs(j->work - w) < std::abs(best->work - w)) best = &*j;
  }
  return best;
}

EnergyLadder energy_ladder(const DeviceParams& params, const DriveProtocol& protocol,
                           const Subspace& subspace, LadderSource source) {
  params.validate();
  DriveProtocol forward = protocol;
  forward.direction = Direction::forward;
  if (!is_cyclic(forward)) {
    throw std::invalid_argument(
        "energy_ladder: protocol is not endpoint-closed; exclusive and inclusive work differ");
  }
  const BiasPoint start = sample_drive(forward, 0.0);

  EnergyLadder ladder;
  ladder.labels = subspace.labels;
  if (source == LadderSource::bare_charging) {
    for (int n : subspace.labels) {
      params.index_of(n);
      const double q = n - start.gate_charge;
      ladder.energies.push_back(4.0 * params.charging_energy * q * q);
      ladder.overlaps.push_back(1.0);
    }
    return ladder;
  }

  const EigenSystem es = eigensystem(build_hamiltonian(params, start));
  std::vector<Eigen::Index> owners;
  for (int n : subspace.labels) {
    Eigen::Index k = 0;
    const double overlap = es.vectors.row(params.index_of(n)).cwiseAbs2().maxCoeff(&k);
    if (!(overlap > EnergyLadder::kMinOverlap)) {
      throw std::runtime_error("energy_ladder: charge label " + std::to_string(n) +
                               " has maximum eigenstate overlap " + std::to_string(overlap) +
                               " <= " + std::to_string(EnergyLadder::kMinOverlap));
    }
    if (std::find(owners.begin(), owners.end(), k) != owners.end()) {
      throw std::runtime_error("energy_ladder: ambiguous mapping for charge label " +
                               std::to_string(n));
    }
    owners.push_back(k);
    ladder.energies.push_back(es.energies(k));
    ladder.overlaps.push_back(overlap);
  }
  return ladder;
}

GibbsWeights gibbs_weights(const EnergyLadder& ladder, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw std::domain_error("gibbs_weights: temperature must be > 0");
  }
  if (ladder.energies.empty()) throw std::invalid_argument("gibbs_weights: empty ladder");
  const double kt = units::thermal_energy(temperature);
  const double e_min = *std::min_element(ladder.energies.begin(), ladder.energies.end());
  GibbsWeights g{temperature, ladder.labels, {}};
  double z = 0.0;
  for (double e : ladder.energies) {
    g.weights.push_back(std::exp(-(e - e_min) / kt));
    z += g.weights.back();
  }
  for (double& w : g.weights) w /= z;
  return g;
}

namespace {

struct PairMass {
  double work;
  double mass;
  std::uint64_t count;
};

// Sorts by work and merges values closer than the dedup tolerance to the
// first member of their group.
// Group masses are summed before dividing, in input order within a group, so a
// single group reproduces `total` bit for bit.
std::vector<WorkPoint> merge_pairs(std::vector<PairMass> pairs, double total) {
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const PairMass& a, const PairMass& b) { return a.work < b.work; });
  std::vector<WorkPoint> points;
  std::vector<double> mass;
  for (const PairMass& p : pairs) {
    if (p.mass <= 0.0 && p.count == 0) continue;
    if (!points.empty() &&
        p.work - points.back().work <= WorkDistribution::kDedupTolerance) {
      mass.back() += p.mass;
      points.back().count += p.count;
    } else {
      points.push_back(WorkPoint{p.work, 0.0, p.count});
      mass.push_back(p.mass);
    }
  }
  for (std::size_t i = 0; i < points.size(); ++i) points[i].probability = mass[i] / total;
  return points;
}

void check_compatible(const GibbsWeights& weights, const TransitionMatrix& trans,
                      const EnergyLadder& ladder) {
  if (weights.labels != ladder.labels || weights.weights.size() != ladder.labels.size()) {
    throw std::invalid_argument("work distribution: weights and ladder cover different labels");
  }
  for (int n : ladder.labels) {
    if (n < -trans.max_label() || n > trans.max_label()) {
      throw std::invalid_argument("work distribution: label " + std::to_string(n) +
                                  " outside the transition matrix");
    }
  }
}

}  // namespace

WorkDistribution work_distribution_exact(const GibbsWeights& weights,
                                         const TransitionMatrix& trans,
                                         const EnergyLadder& ladder) {
  check_compatible(weights, trans, ladder);
  std::vector<PairMass> pairs;
  pairs.reserve(ladder.labels.size() * ladder.labels.size());
  double retained = 0.0;
  for (std::size_t i = 0; i < ladder.labels.size(); ++i) {
    for (std::size_t f = 0; f < ladder.labels.size(); ++f) {
      const double mass = weights.weights[i] * trans.at(ladder.labels[f], ladder.labels[i]);
      pairs.push_back({ladder.energies[f] - ladder.energies[i], mass, 0});
      retained += mass;
    }
  }
  if (!(retained > 0.0)) throw std::runtime_error("work distribution: all mass leaked");
  WorkDistribution d;
  d.direction = trans.direction;
  d.sampled = false;
  d.leaked = std::max(0.0, 1.0 - retained);
  d.points = merge_pairs(std::move(pairs), retained);
  return d;
}

WorkDistribution sample_work(const GibbsWeights& weights, const TransitionMatrix& trans,
                             const EnergyLadder& ladder, std::uint64_t n_events,
                             std::uint64_t seed) {
  if (n_events < 1) throw std::invalid_argument("sample_work: n_events must be >= 1");
  check_compatible(weights, trans, ladder);
  const std::size_t k = ladder.labels.size();
  const Eigen::Index dim = trans.probabilities.rows();
  // Basis index -> ladder position, or -1 for labels outside the subspace.
  std::vector<int> slot(static_cast<std::size_t>(dim), -1);
  for (std::size_t i = 0; i < k; ++i) {
    slot[static_cast<std::size_t>(trans.index_of(ladder.labels[i]))] = static_cast<int>(i);
  }
  const sampling::Categorical initial(weights.weights);
  std::vector<sampling::Categorical> final_given;
  final_given.reserve(k);
  for (int n : ladder.labels) {
    const Eigen::VectorXd col = trans.probabilities.col(trans.index_of(n));
    final_given.emplace_back(std::span<const double>(col.data(), static_cast<std::size_t>(dim)));
  }

  const std::uint64_t n_partitions =
      (n_events + sampling::kPartitionSize - 1) / sampling::kPartitionSize;
  std::vector<std::vector<std::uint64_t>> partial(
      n_partitions, std::vector<std::uint64_t>(k * k + 1, 0));
  sampling::for_each_partition(n_events, [&](std::uint64_t part, std::uint64_t,
                                             std::uint64_t count) {
    auto engine = sampling::partition_engine(seed, part);
    auto& tally = partial[part];
    for (std::uint64_t e = 0; e < count; ++e) {
      const std::size_t i = initial(engine);
      const int f = slot[final_given[i](engine)];
      if (f < 0) {
        ++tally[k * k];
      } else {
        ++tally[i * k + static_cast<std::size_t>(f)];
      }
    }
  });
  std::vector<std::uint64_t> tally(k * k + 1, 0);
  for (const auto& p : partial) {
    for (std::size_t j = 0; j < tally.size(); ++j) tally[j] += p[j];
  }

  WorkDistribution d;
  d.direction = trans.direction;
  d.sampled = true;
  d.leaked_events = tally[k * k];
  d.events = n_events - d.leaked_events;
  d.leaked = static_cast<double>(d.leaked_events) / static_cast<double>(n_events);
  if (d.events == 0) throw std::runtime_error("sample_work: every event leaked");
  std::vector<PairMass> pairs;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t f = 0; f < k; ++f) {
      const std::uint64_t c = tally[i * k + f];
      pairs.push_back({ladder.energies[f] - ladder.energies[i], static_cast<double>(c), c});
    }
  }
  d.points = merge_pairs(std::move(pairs), static_cast<double>(d.events));
  return d;
}

std::vector<BkRatioRecord> bk_ratio_check(const WorkDistribution& fwd,
                                          const WorkDistribution& bwd, double temperature,
                                          double floor) {
  if (!(temperature > 0.0)) throw std::domain_error("bk_ratio_check: temperature must be > 0");
  if (fwd.direction != Direction::forward || bwd.direction != Direction::backward) {
    throw std::invalid_argument("bk_ratio_check: expects forward and backward distributions");
  }
  const double kt = units::thermal_energy(temperature);
  std::vector<BkRatioRecord> out;
  out.reserve(fwd.points.size());
  for (const WorkPoint& p : fwd.points) {
    BkRatioRecord r;
    r.work = p.work;
    r.scaled_work = p.work / kt;
    r.forward_probability = p.probability;
    const double tol = 2.0 * WorkDistribution::kDedupTolerance + 1e-13 * std::abs(p.work);
    if (const WorkPoint* q = bwd.find(-p.work, tol)) r.backward_probability = q->probability;
    r.resolved = r.forward_probability > floor && r.backward_probability > floor;
    r.log_ratio = r.resolved ? std::log(r.forward_probability / r.backward_probability)
                             : std::numeric_limits<double>::quiet_NaN();
    out.push_back(r);
  }
  return out;
}

BkEquality bk_equality(const WorkDistribution& dist, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw std::domain_error("bk_equality: temperature must be > 0");
  }
  const double kt = units::thermal_energy(temperature);
  BkEquality r;
  if (!dist.sampled) {
    for (const WorkPoint& p : dist.points) r.mean += p.probability * std::exp(-p.work / kt);
    return r;
  }
  r.events = dist.events;
  const double n = static_cast<double>(dist.events);
  for (const WorkPoint& p : dist.points) {
    r.mean += static_cast<double>(p.count) * std::exp(-p.work / kt);
  }
  r.mean /= n;
  if (dist.events > 1) {
    double ss = 0.0;
    for (const WorkPoint& p : dist.points) {
      const double d = std::exp(-p.work / kt) - r.mean;
      ss += static_cast<double>(p.count) * d * d;
    }
    r.standard_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return r;
}

}  // namespace microrev
