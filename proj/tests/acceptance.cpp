// Acceptance checks, one PASS/FAIL line per criterion.
//
//   microrev_acceptance            run all twelve
//   microrev_acceptance 3 7        run a selection
//
// Exit status is nonzero when any selected criterion fails.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "microrev/experiment.hpp"
#include "microrev/noise.hpp"
#include "microrev/thermo.hpp"
#include "microrev/units.hpp"

using namespace microrev;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

constexpr std::uint64_t kSeed = 20140523;
constexpr std::array<double, 6> kTemperatures = {1, 10, 20, 30, 40, 50};
// Reference standard errors at 10^6 events; ours must land within a decade.
constexpr std::array<double, 6> kReferenceStderr = {5.8e-2, 7.9e-4, 4.2e-4, 3.0e-4, 2.2e-4, 1.7e-4};

// Shared, lazily computed default runs.
class Context {
 public:
  const DeviceParams params;
  const DriveProtocol forward = default_protocol();
  const DriveProtocol backward = reverse_protocol(default_protocol());
  const PropagatorConfig config{1e-4};

  const UnitaryOperator& uf() {
    if (!uf_) {
      const auto t0 = std::chrono::steady_clock::now();
      uf_ = evolve(params, forward, config);
      forward_seconds = seconds_since(t0);
    }
    return *uf_;
  }
  const UnitaryOperator& ub() {
    if (!ub_) {
      const auto t0 = std::chrono::steady_clock::now();
      ub_ = evolve(params, backward, config);
      backward_seconds = seconds_since(t0);
    }
    return *ub_;
  }
  const TransitionMatrix& pf() {
    if (!pf_) pf_ = transition_matrix(uf(), Direction::forward);
    return *pf_;
  }
  const TransitionMatrix& pb() {
    if (!pb_) pb_ = transition_matrix(ub(), Direction::backward);
    return *pb_;
  }

  double forward_seconds = 0.0, backward_seconds = 0.0;

 private:
  std::optional<UnitaryOperator> uf_, ub_;
  std::optional<TransitionMatrix> pf_, pb_;
};

Verdict microreversibility(Context& c) {
  const double dev = microrev_deviation(c.pf(), c.pb(), Subspace::centered()).max_abs;
  const double runtime = c.forward_seconds + c.backward_seconds;
  return {dev < 1e-3 && runtime < 60.0,
          fmt("max|P_F[m][n]-P_B[n][m]| = %.3e (< 1e-3), forward+backward %.1f s (< 60 s)", dev,
              runtime)};
}

Verdict transpose_oracle(Context& c) {
  const double coarse = max_abs(c.ub().matrix() - c.uf().matrix().transpose());
  const PropagatorConfig half{c.config.time_step / 2};
  const double fine = max_abs(evolve(c.params, c.backward, half).matrix() -
                              evolve(c.params, c.forward, half).matrix().transpose());
  const double gain = coarse / fine;
  return {coarse < 1e-6 && gain >= 4.0,
          fmt("max|U_B-U_F^T| = %.3e at dt=1e-4 (< 1e-6), %.3e at dt=5e-5, tightening %.2fx "
              "(>= 4x)",
              coarse, fine, gain)};
}

Verdict preparation(Context& c) {
  const Subspace s = Subspace::centered();
  const PreparationEnsemble prep = prepare_ensemble(c.params, c.forward, c.config, s);
  double worst = 0.0;
  for (int n : s.labels) worst = std::max(worst, c.pf().leakage(n, s));
  return {prep.subspace_mass() > 0.999 && worst <= 2e-3,
          fmt("subspace mass %.6f (> 0.999), max column leakage %.3e (<= 2e-3)",
              prep.subspace_mass(), worst)};
}

Verdict purity(Context& c) {
  const EigenSystem es = eigensystem(build_hamiltonian(c.params, sample_drive(c.forward, 0.0)));
  double weakest = 1.0;
  std::string per_label;
  for (int n = -2; n <= 2; ++n) {
    // The eigenstate that owns label n.
    Eigen::Index k;
    es.vectors.row(c.params.index_of(n)).cwiseAbs2().maxCoeff(&k);
    const double p = es.vectors.col(k).cwiseAbs2().maxCoeff();
    weakest = std::min(weakest, p);
    per_label += fmt(" %d:%.5f", n, p);
  }
  return {weakest > 0.998, "single-label weight (> 0.998)" + per_label};
}

Verdict bk_full_space(Context& c) {
  const EnergyLadder l = energy_ladder(c.params, c.forward, Subspace::full(c.params));
  bool ok = true;
  std::string detail = "|1-<exp(-W/kT)>| (< 1e-9):";
  for (double t : {1.0, 10.0, 50.0}) {
    const double dev = std::abs(1.0 - bk_equality(work_distribution_exact(gibbs_weights(l, t), c.pf(), l), t).mean);
    ok = ok && dev < 1e-9;
    detail += fmt(" %gK %.2e", t, dev);
  }
  return {ok, detail};
}

Verdict table_reproduction(Context& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const TransitionMatrix pf = run_protocol(c.params, c.forward, c.config);
  const EnergyLadder l = energy_ladder(c.params, c.forward);
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < kTemperatures.size(); ++i) {
    const double t = kTemperatures[i];
    const WorkDistribution d = sample_work(gibbs_weights(l, t), pf, l, 1'000'000, kSeed + i);
    const BkEquality bk = bk_equality(d, t);
    const double residual = 1.0 - bk.mean;
    const double decade = bk.standard_error / kReferenceStderr[i];
    const bool row = std::abs(residual) <= 3.0 * bk.standard_error && decade >= 0.1 && decade <= 10.0;
    ok = ok && row;
    detail += fmt(" %gK (%.1e+-%.1e, se/ref %.2f)%s", t, residual, bk.standard_error, decade,
                  row ? "" : "!");
  }
  const double runtime = seconds_since(t0);
  ok = ok && runtime < 60.0;
  return {ok, fmt("1-mean within 3 se, se within a decade of the reference; %.1f s (< 60 s):", runtime) +
                  detail};
}

Verdict work_values(Context& c) {
  const EnergyLadder l = energy_ladder(c.params, c.forward);
  std::string detail;
  bool ok = true;
  for (double t : {1.0, 50.0}) {
    const std::size_t n = work_distribution_exact(gibbs_weights(l, t), c.pf(), l).points.size();
    ok = ok && n == 21;
    detail += fmt(" %gK: %zu", t, n);
  }
  return {ok, "distinct work values (== 21)" + detail};
}

Verdict bk_ratio(Context& c) {
  bool ok = true;
  std::string detail;
  // Full space: transition probabilities carry absolute rounding of order
  // 1e-15, so a ratio is only meaningful where both sides exceed 1e-9.
  const EnergyLadder full = energy_ladder(c.params, c.forward, Subspace::full(c.params));
  double worst_full = 0.0;
  std::size_t resolved = 0;
  for (double t : {1.0, 10.0, 50.0}) {
    const GibbsWeights w = gibbs_weights(full, t);
    for (const BkRatioRecord& r : bk_ratio_check(work_distribution_exact(w, c.pf(), full),
                                                 work_distribution_exact(w, c.pb(), full), t, 1e-9)) {
      if (!r.resolved) continue;
      ++resolved;
      worst_full = std::max(worst_full, std::abs(r.log_ratio - r.scaled_work));
    }
  }
  ok = worst_full < 1e-9 && resolved > 0;
  detail += fmt("full space %zu records max|ln ratio - W/kT| = %.2e (< 1e-9);", resolved, worst_full);

  // Five-state emulation: post-selection shifts the log ratio by
  // ln((1 - L_B) / (1 - L_F)), bounded by L / (1 - L) with L the larger leak.
  const EnergyLadder five = energy_ladder(c.params, c.forward);
  double worst_excess = -1.0;
  for (double t : kTemperatures) {
    const GibbsWeights w = gibbs_weights(five, t);
    const WorkDistribution f = work_distribution_exact(w, c.pf(), five);
    const WorkDistribution b = work_distribution_exact(w, c.pb(), five);
    const double leak = std::max(f.leaked, b.leaked);
    const double bound = leak / (1.0 - leak);
    for (const BkRatioRecord& r : bk_ratio_check(f, b, t)) {
      const double excess = r.resolved ? std::abs(r.log_ratio - r.scaled_work) - bound : 1.0;
      worst_excess = std::max(worst_excess, excess);
    }
    detail += fmt(" %gK bound %.2e", t, bound);
  }
  ok = ok && worst_excess <= 1e-12;
  detail += fmt("; worst deviation minus bound %.2e (<= 0)", worst_excess);
  return {ok, detail};
}

Verdict negative_controls(Context& c) {
  const Subspace s = Subspace::centered();
  DriveProtocol no_flip = default_protocol();
  no_flip.reversal.invert_flux = false;
  const double flux_dev =
      microrev_deviation(c.pf(), run_protocol(c.params, reverse_protocol(no_flip), c.config), s).max_abs;

  // The default drive is symmetric under t -> tau - t, so skipping the time
  // mirror changes nothing there. The control runs on tau = 1 ns instead.
  DriveProtocol longer = default_protocol();
  longer.duration = 1.0;
  const TransitionMatrix lf = run_protocol(c.params, longer, c.config);
  DriveProtocol no_mirror = longer;
  no_mirror.reversal.mirror_time = false;
  const double mirror_dev =
      microrev_deviation(lf, run_protocol(c.params, reverse_protocol(no_mirror), c.config), s).max_abs;
  const double mirror_ref =
      microrev_deviation(lf, run_protocol(c.params, reverse_protocol(longer), c.config), s).max_abs;

  return {flux_dev > 1e-2 && mirror_dev > 1e-2,
          fmt("no flux inversion %.3e, no time mirror (tau=1 ns) %.3e, both > 1e-2; "
              "proper reversal at tau=1 ns %.1e",
              flux_dev, mirror_dev, mirror_ref)};
}

Verdict detector(Context&) {
  const Distinguishability d = detector_distinguishability({});
  const double norm = 1.0 / (d.charge_noise * std::sqrt(2.0 * units::kPi));
  auto f = [&](double x) {
    const double a = (x / d.charge_noise), b = (x - d.charge_separation) / d.charge_noise;
    return std::abs(norm * std::exp(-0.5 * a * a) - norm * std::exp(-0.5 * b * b));
  };
  using boost::math::quadrature::gauss_kronrod;
  const double inf = std::numeric_limits<double>::infinity(), mid = d.charge_separation / 2;
  const double quad = 0.5 * (gauss_kronrod<double, 61>::integrate(f, -inf, mid, 15, 1e-13) +
                             gauss_kronrod<double, 61>::integrate(f, mid, inf, 15, 1e-13));
  const double gap = std::abs(quad - d.kolmogorov_distance);
  const double pd = 100.0 * d.success_probability;
  return {std::abs(pd - 99.5) <= 0.1 && gap < 1e-8,
          fmt("P_D = %.3f%% (99.5 +- 0.1), |D_closed - D_quadrature| = %.1e (< 1e-8)", pd, gap)};
}

Verdict dephasing(Context& c) {
  const auto trace = ratio_trace(c.params, c.forward, 2001, 0.03);
  const auto near_002 = [](const DephasingRatioPoint& p) {
    return p.t2_over_t1 >= 0.01 && p.t2_over_t1 <= 0.04;
  };
  const double width = window_width(trace, near_002);
  const double tau = c.forward.duration;
  const double endpoint_width = window_width(trace, [&](const DephasingRatioPoint& p) {
    return near_002(p) && (p.time < tau / 6 || p.time > 5 * tau / 6);
  });
  // Mid-protocol: the instants of largest beta, a quarter period from either end.
  double lo = 2.0, hi = 0.0;
  for (double t : {tau / 4, 3 * tau / 4}) {
    const double r = dephasing_ratio(c.params, sample_drive(c.forward, t), 0.03, 0, t).t2_over_t1;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const bool ok = width >= 0.1 && width <= 0.4 && endpoint_width > 0.0 && lo >= 1.6 && hi <= 2.0;
  return {ok, fmt("T2/T1 in [0.01, 0.04] over %.3f ns (0.1-0.4; %.3f ns of it within tau/6 of an "
                  "end), T2/T1 at max beta %.3f..%.3f (in [1.6, 2.0])",
                  width, endpoint_width, lo, hi)};
}

Verdict scaling(Context& c) {
  const EnergyLadder l = energy_ladder(c.params, c.forward);
  const GibbsWeights w = gibbs_weights(l, 10.0);
  std::array<double, 3> scaled{};
  std::string detail;
  const std::array<std::uint64_t, 3> sizes = {10'000, 100'000, 1'000'000};
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double se = bk_equality(sample_work(w, c.pf(), l, sizes[i], kSeed + 100 + i), 10.0).standard_error;
    scaled[i] = se * std::sqrt(static_cast<double>(sizes[i]));
    detail += fmt(" N=%llu se=%.3e", static_cast<unsigned long long>(sizes[i]), se);
  }
  const double ref = scaled[2];
  double worst = 0.0;
  for (double s : scaled) worst = std::max(worst, std::abs(s / ref - 1.0));
  return {worst <= 0.2, fmt("T=10 K, se*sqrt(N) spread %.1f%% (<= 20%%):", 100 * worst) + detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, std::function<Verdict(Context&)>>> criteria = {
      {1, {"microreversibility", microreversibility}},
      {2, {"transpose oracle", transpose_oracle}},
      {3, {"preparation ensemble", preparation}},
      {4, {"endpoint eigenstate purity", purity}},
      {5, {"BK equality, exact full space", bk_full_space}},
      {6, {"Gibbs emulation, 10^6 events", table_reproduction}},
      {7, {"work-value count", work_values}},
      {8, {"BK ratio", bk_ratio}},
      {9, {"negative controls", negative_controls}},
      {10, {"detector fidelity", detector}},
      {11, {"dephasing ratio", dephasing}},
      {12, {"1/sqrt(N) scaling", scaling}},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (const auto& [id, _] : criteria) selected.push_back(id);
  }

  Context ctx;
  int failures = 0;
  for (int id : selected) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::printf("[FAIL] %2d unknown criterion\n", id);
      ++failures;
      continue;
    }
    Verdict v;
    try {
      v = it->second.second(ctx);
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::printf("[%s] %2d %s: %s\n", v.pass ? "PASS" : "FAIL", id, it->second.first,
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
