#include "microrev/commands.hpp"

#include <cmath>

#include "microrev/io.hpp"
#include "microrev/sampling.hpp"
#include "microrev/units.hpp"

namespace microrev::app {

namespace {

using nlohmann::json;

std::vector<int> basis_labels(const DeviceParams& d) {
  std::vector<int> labels;
  for (int n = -d.max_label(); n <= d.max_label(); ++n) labels.push_back(n);
  return labels;
}

std::string matrix_csv(const TransitionMatrix& t) {
  std::vector<std::string> header{"m\\n"};
  const int max_label = t.max_label();
  for (int n = -max_label; n <= max_label; ++n) header.push_back(std::to_string(n));
  CsvTable csv(header);
  for (int m = -max_label; m <= max_label; ++m) {
    std::vector<std::string> cells{std::to_string(m)};
    for (int n = -max_label; n <= max_label; ++n) cells.push_back(csv_number(t.at(m, n)));
    csv.row(cells);
  }
  return csv.str();
}

json matrix_json(const TransitionMatrix& t) {
  json rows = json::array();
  for (Eigen::Index m = 0; m < t.probabilities.rows(); ++m) {
    std::vector<double> r(static_cast<std::size_t>(t.probabilities.cols()));
    for (Eigen::Index n = 0; n < t.probabilities.cols(); ++n) {
      r[static_cast<std::size_t>(n)] = t.probabilities(m, n);
    }
    rows.push_back(r);
  }
  std::vector<int> labels;
  for (int n = -t.max_label(); n <= t.max_label(); ++n) labels.push_back(n);
  return {{"direction", to_string(t.direction)},
          {"layout", "probabilities[m][n] = P(final m | initial n)"},
          {"labels", labels},
          {"probabilities", rows}};
}

std::string temperature_tag(double t) {
  std::string s = csv_number(t);
  for (char& c : s) {
    if (c == '.') c = 'p';
  }
  return "T" + s + "K";
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  auto engine = sampling::partition_engine(seed, stream);
  return engine();
}

}  // namespace

CommandResult cmd_spectrum(const RunConfig& config) {
  config.validate();
  const SpectrumTrace trace =
      spectrum_trace(config.device, config.forward_protocol(), config.spectrum_samples);
  std::vector<std::string> header{"t_ns"};
  for (Eigen::Index k = 0; k < trace.energies.cols(); ++k) header.push_back("E" + std::to_string(k));
  CsvTable csv(header);
  for (std::size_t s = 0; s < trace.times.size(); ++s) {
    std::vector<double> row{trace.times[s]};
    for (Eigen::Index k = 0; k < trace.energies.cols(); ++k) {
      row.push_back(trace.energies(static_cast<Eigen::Index>(s), k));
    }
    csv.row(row);
  }
  OutputSet out(config.output);
  out.write_text("spectrum.csv", csv.str());
  out.write_manifest("spectrum", to_json(config), config.seed);

  double min_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index s = 0; s < trace.energies.rows(); ++s) {
    min_gap = std::min(min_gap, trace.energies(s, 1));
  }
  return {kExitSuccess, {{"samples", trace.times.size()}, {"min_gap_01_rad_per_ns", min_gap}}};
}

CommandResult cmd_run(const RunConfig& config, Direction direction) {
  config.validate();
  const DriveProtocol forward = config.forward_protocol();
  const DriveProtocol protocol = direction == Direction::forward ? forward : reverse_protocol(forward);
  const Subspace subspace = config.designated_subspace();
  const TransitionMatrix trans = run_protocol(config.device, protocol, config.propagator);
  const PreparationEnsemble prep =
      prepare_ensemble(config.device, forward, config.propagator, subspace);

  const std::string dir = to_string(direction);
  OutputSet out(config.output);
  out.write_text("transition_" + dir + ".csv", matrix_csv(trans));
  out.write_json("transition_" + dir + ".json", matrix_json(trans));

  CsvTable prep_csv({"n", "probability"});
  std::vector<double> prep_values;
  for (int n : basis_labels(config.device)) {
    prep_csv.row(std::vector<std::string>{std::to_string(n), csv_number(prep.probability(n))});
    prep_values.push_back(prep.probability(n));
  }
  out.write_text("preparation.csv", prep_csv.str());
  out.write_json("preparation.json", {{"labels", basis_labels(config.device)},
                                      {"probabilities", prep_values},
                                      {"subspace", subspace.labels},
                                      {"subspace_mass", prep.subspace_mass()}});

  json per_label = json::array();
  double max_leak = 0.0;
  for (int n : subspace.labels) {
    const double leak = trans.leakage(n, subspace);
    max_leak = std::max(max_leak, leak);
    per_label.push_back({{"n", n}, {"leakage", leak}});
  }
  const json leakage = {{"direction", dir},
                        {"subspace", subspace.labels},
                        {"per_initial_label", per_label},
                        {"max_leakage", max_leak},
                        {"preparation_subspace_mass", prep.subspace_mass()}};
  out.write_json("leakage.json", leakage);
  out.write_manifest("run " + dir, to_json(config), config.seed);
  return {kExitSuccess, leakage};
}

CommandResult cmd_microrev(const RunConfig& config) {
  config.validate();
  const DriveProtocol forward = config.forward_protocol();
  const UnitaryOperator uf = evolve(config.device, forward, config.propagator);
  const UnitaryOperator ub = evolve(config.device, reverse_protocol(forward), config.propagator);
  const TransitionMatrix pf = transition_matrix(uf, Direction::forward);
  const TransitionMatrix pb = transition_matrix(ub, Direction::backward);
  const Subspace subspace = config.designated_subspace();
  const MicrorevDeviation dev = microrev_deviation(pf, pb, subspace);
  const MicrorevDeviation full = microrev_deviation(pf, pb, Subspace::full(config.device));
  const double transpose_dev = (ub.matrix() - uf.matrix().transpose()).cwiseAbs().maxCoeff();

  CsvTable cells({"m", "n", "P_forward_m_given_n", "P_backward_n_given_m", "abs_deviation"});
  for (int m : subspace.labels) {
    for (int n : subspace.labels) {
      cells.row(std::vector<std::string>{std::to_string(m), std::to_string(n),
                                         csv_number(pf.at(m, n)), csv_number(pb.at(n, m)),
                                         csv_number(std::abs(pf.at(m, n) - pb.at(n, m)))});
    }
  }
  const bool pass = dev.max_abs <= config.microrev_tolerance;
  const json report = {{"subspace", subspace.labels},
                       {"max_abs", dev.max_abs},
                       {"mean_abs", dev.mean_abs},
                       {"full_basis_max_abs", full.max_abs},
                       {"full_basis_mean_abs", full.mean_abs},
                       {"unitary_transpose_max_abs", transpose_dev},
                       {"tolerance", config.microrev_tolerance},
                       {"flux_inversion", config.protocol.reversal.invert_flux},
                       {"time_mirror", config.protocol.reversal.mirror_time},
                       {"pass", pass}};
  OutputSet out(config.output);
  out.write_text("microrev_cells.csv", cells.str());
  out.write_json("microrev.json", report);
  out.write_manifest("microrev", to_json(config), config.seed);
  return {pass ? kExitSuccess : kExitThreshold, report};
}

CommandResult cmd_gibbs(const RunConfig& config) {
  config.validate();
  const DriveProtocol forward = config.forward_protocol();
  const TransitionMatrix pf = run_protocol(config.device, forward, config.propagator);
  const TransitionMatrix pb =
      run_protocol(config.device, reverse_protocol(forward), config.propagator);
  const Subspace subspace = config.designated_subspace();
  const EnergyLadder ladder = energy_ladder(config.device, forward, subspace, config.ladder);
  const bool sampled = config.mode == SampleMode::sampled;

  OutputSet out(config.output);
  CsvTable table({"temperature_K", "one_minus_mean", "stderr", "events", "leaked_forward"});
  json per_temperature = json::array();
  for (std::size_t i = 0; i < config.temperatures.size(); ++i) {
    const double t = config.temperatures[i];
    const GibbsWeights w = gibbs_weights(ladder, t);
    const WorkDistribution df =
        sampled ? sample_work(w, pf, ladder, config.events, stream_seed(config.seed, 2 * i))
                : work_distribution_exact(w, pf, ladder);
    const WorkDistribution db =
        sampled ? sample_work(w, pb, ladder, config.events, stream_seed(config.seed, 2 * i + 1))
                : work_distribution_exact(w, pb, ladder);
    const BkEquality bk = bk_equality(df, t);
    const std::vector<BkRatioRecord> ratios = bk_ratio_check(df, db, t);
    const std::string tag = temperature_tag(t);

    for (const WorkDistribution* d : {&df, &db}) {
      CsvTable dist({"W_rad_per_ns", sampled ? "count" : "probability"});
      for (const WorkPoint& p : d->points) {
        dist.row(std::vector<std::string>{
            csv_number(p.work),
            sampled ? std::to_string(p.count) : csv_number(p.probability)});
      }
      out.write_text("work_" + tag + "_" + to_string(d->direction) + ".csv", dist.str());
    }
    CsvTable ratio_csv({"W_rad_per_ns", "P_forward_W", "P_backward_minus_W", "ln_ratio",
                        "W_over_kT", "resolved"});
    std::size_t resolved = 0;
    for (const BkRatioRecord& r : ratios) {
      resolved += r.resolved ? 1 : 0;
      ratio_csv.row(std::vector<std::string>{
          csv_number(r.work), csv_number(r.forward_probability),
          csv_number(r.backward_probability), r.resolved ? csv_number(r.log_ratio) : "nan",
          csv_number(r.scaled_work), r.resolved ? "1" : "0"});
    }
    out.write_text("bk_ratio_" + tag + ".csv", ratio_csv.str());

    table.row(std::vector<std::string>{csv_number(t), csv_number(1.0 - bk.mean),
                                       csv_number(bk.standard_error),
                                       std::to_string(sampled ? bk.events : 0),
                                       csv_number(df.leaked)});
    per_temperature.push_back({{"T", t},
                               {"N", sampled ? config.events : 0},
                               {"retained_events", bk.events},
                               {"mean", bk.mean},
                               {"one_minus_mean", 1.0 - bk.mean},
                               {"stderr", bk.standard_error},
                               {"work_values", df.points.size()},
                               {"resolved_ratio_records", resolved},
                               {"leaked_forward", df.leaked},
                               {"leaked_backward", db.leaked}});
  }
  out.write_text("bk_equality.csv", table.str());
  const json report = {{"mode", sampled ? "sampled" : "exact"},
                       {"subspace", subspace.labels},
                       {"ladder_labels", ladder.labels},
                       {"ladder_energies_rad_per_ns", ladder.energies},
                       {"temperatures", per_temperature}};
  out.write_json("bk_report.json", report);
  out.write_manifest("gibbs", to_json(config), config.seed);
  return {kExitSuccess, report};
}

CommandResult cmd_noise(const RunConfig& config) {
  config.validate();
  const auto trace = ratio_trace(config.device, config.forward_protocol(), config.noise.samples,
                                 config.noise.bath_temperature, config.noise.level);
  CsvTable csv({"t_ns", "ratio", "t2_over_t1", "beta"});
  for (const DephasingRatioPoint& p : trace) csv.row({p.time, p.ratio, p.t2_over_t1, p.beta});

  const Distinguishability det = detector_distinguishability(config.noise.detector);
  const FidelityLoss loss = fidelity_loss(trace, config.noise.t1_ns);
  const json detector = {{"charge_noise_e", det.charge_noise},
                         {"charge_separation_e", det.charge_separation},
                         {"kolmogorov_distance", det.kolmogorov_distance},
                         {"success_probability", det.success_probability},
                         {"measurement_uncertainty", 1.0 - det.success_probability}};
  const json report = {
      {"bath_temperature_K", config.noise.bath_temperature},
      {"level", config.noise.level},
      {"charge_regime_window_ns",
       window_width(trace, [](const DephasingRatioPoint& p) { return p.t2_over_t1 < 0.1; })},
      {"min_t2_over_t1",
       finite_or_null(std::min_element(trace.begin(), trace.end(),
                                       [](const auto& a, const auto& b) {
                                         return a.t2_over_t1 < b.t2_over_t1;
                                       })->t2_over_t1)},
      {"fidelity_loss",
       {{"t1_ns", config.noise.t1_ns},
        {"relaxation", loss.relaxation},
        {"dephasing", finite_or_null(loss.dephasing)}}},
      {"detector", detector}};

  OutputSet out(config.output);
  out.write_text("ratio_trace.csv", csv.str());
  out.write_json("detector.json", detector);
  out.write_json("noise_report.json", report);
  out.write_manifest("noise", to_json(config), config.seed);
  return {kExitSuccess, report};
}

}  // namespace microrev::app
