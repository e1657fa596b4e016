// microrev: forward/backward Cooper-pair-box protocols, microreversibility and
// work-fluctuation checks, dephasing and readout estimates.
//
//   microrev microrev --config run.json --out results/
//   microrev gibbs --temperatures 1,10,20 --events 1000000 --seed 7
//   microrev run --direction backward --dt 5e-5
//
// Settings are layered: built-in defaults, then --config, then flags.

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "microrev/commands.hpp"

namespace {

using namespace microrev;
using namespace microrev::app;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> events;
  std::optional<double> dt;
  std::optional<double> duration;
  std::vector<double> temperatures;
  bool no_flux_inversion = false;
  bool no_time_mirror = false;
  std::optional<std::string> out;
  bool exact = false;
  bool sampled = false;
  std::string direction = "forward";
};

void add_common_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Base RNG seed");
  cmd->add_option("--events", o.events, "Monte Carlo events per temperature and direction");
  cmd->add_option("--dt", o.dt, "Propagator time step (ns)");
  cmd->add_option("--duration", o.duration, "Protocol duration (ns)");
  cmd->add_option("--temperatures", o.temperatures, "Bath temperatures (K)")->delimiter(',');
  cmd->add_flag("--no-flux-inversion", o.no_flux_inversion,
                "Negative control: backward run keeps the flux sign");
  cmd->add_flag("--no-time-mirror", o.no_time_mirror,
                "Negative control: backward run is not time-mirrored");
  cmd->add_option("--out", o.out, "Output directory");
  auto* exact = cmd->add_flag("--exact", o.exact, "Exact work distributions");
  auto* sampled = cmd->add_flag("--sampled", o.sampled, "Monte Carlo work distributions");
  exact->excludes(sampled);
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.events) c.events = *o.events;
  if (o.dt) c.propagator.time_step = *o.dt;
  if (o.duration) c.protocol.duration = *o.duration;
  if (!o.temperatures.empty()) c.temperatures = o.temperatures;
  if (o.no_flux_inversion) c.protocol.reversal.invert_flux = false;
  if (o.no_time_mirror) c.protocol.reversal.mirror_time = false;
  if (o.out) c.output = *o.out;
  if (o.exact) c.mode = SampleMode::exact;
  if (o.sampled) c.mode = SampleMode::sampled;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Microreversibility and work statistics of a driven Cooper-pair box"};
  app.set_version_flag("--version", std::string(MICROREV_VERSION_STRING));
  app.require_subcommand(1);

  Overrides o;
  auto* spectrum = app.add_subcommand("spectrum", "Instantaneous spectrum along the protocol");
  auto* run = app.add_subcommand("run", "Transition matrix of one protocol direction");
  auto* microrev = app.add_subcommand("microrev", "Compare P_F[m|n] with P_B[n|m]");
  auto* gibbs = app.add_subcommand("gibbs", "Gibbs-emulated work statistics per temperature");
  auto* noise = app.add_subcommand("noise", "Dephasing ratio trace and detector report");
  for (auto* cmd : {spectrum, run, microrev, gibbs, noise}) add_common_options(cmd, o);
  run->add_option("--direction", o.direction, "forward or backward")
      ->check(CLI::IsMember({"forward", "backward"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitSuccess : kExitValidation;
  }

  try {
    const RunConfig config = resolve(o);
    CommandResult result;
    if (*spectrum) {
      result = cmd_spectrum(config);
    } else if (*run) {
      result = cmd_run(config, o.direction == "backward" ? Direction::backward : Direction::forward);
    } else if (*microrev) {
      result = cmd_microrev(config);
    } else if (*gibbs) {
      result = cmd_gibbs(config);
    } else {
      result = cmd_noise(config);
    }
    std::cout << result.summary.dump(2) << '\n';
    if (result.exit_code == kExitThreshold) {
      std::cerr << "microrev: acceptance threshold exceeded\n";
    }
    return result.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "microrev: invalid configuration: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "microrev: " << e.what() << '\n';
    return 1;
  }
}
