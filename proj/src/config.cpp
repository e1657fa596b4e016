#include "microrev/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace microrev::app {

namespace {

using nlohmann::json;

// Wraps one JSON object and rejects keys that no caller asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void read_waveform(const json& j, const std::string& where, Waveform& w) {
  ObjectReader r(j, where);
  r.get("offset", w.offset);
  r.get("amplitude", w.amplitude);
  r.get("frequency", w.frequency);
  r.get("phase", w.phase);
  r.finish();
}

json waveform_json(const Waveform& w) {
  return {{"offset", w.offset}, {"amplitude", w.amplitude}, {"frequency", w.frequency},
          {"phase", w.phase}};
}

template <typename Fn>
void rethrow_as_config_error(Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  rethrow_as_config_error([&] {
    device.validate();
    const DriveProtocol p = forward_protocol();
    p.validate();
    propagator.validate(p.duration);
    noise.detector.validate();
  });
  if (!full_space) {
    if (subspace.empty()) throw ConfigError("subspace: must not be empty");
    std::set<int> unique(subspace.begin(), subspace.end());
    if (unique.size() != subspace.size()) throw ConfigError("subspace: duplicate labels");
    for (int n : subspace) {
      if (!device.has_label(n)) {
        throw ConfigError("subspace: label " + std::to_string(n) + " outside the basis");
      }
    }
  }
  if (temperatures.empty()) throw ConfigError("temperatures: must not be empty");
  for (double t : temperatures) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("temperatures: must all be > 0");
  }
  if (events < 1) throw ConfigError("events: must be >= 1");
  if (spectrum_samples < 2) throw ConfigError("spectrum_samples: must be >= 2");
  if (!(microrev_tolerance > 0.0)) throw ConfigError("microrev_tolerance: must be > 0");
  if (!(noise.bath_temperature > 0.0)) throw ConfigError("noise.bath_temperature: must be > 0");
  if (noise.level < 0 || noise.level + 1 >= device.truncation) {
    throw ConfigError("noise.level: out of range");
  }
  if (noise.samples < 2) throw ConfigError("noise.samples: must be >= 2");
  if (!(noise.t1_ns > 0.0)) throw ConfigError("noise.t1_ns: must be > 0");
  if (output.empty()) throw ConfigError("output: must not be empty");
}

DriveProtocol RunConfig::forward_protocol() const {
  DriveProtocol p;
  if (protocol.table) {
    p.shape = TabulatedDrive::from_csv(std::filesystem::path(*protocol.table));
  } else {
    p.shape = protocol.drive;
  }
  p.duration = protocol.duration;
  p.reversal = protocol.reversal;
  return p;
}

DriveProtocol RunConfig::backward_protocol() const { return reverse_protocol(forward_protocol()); }

Subspace RunConfig::designated_subspace() const {
  return full_space ? Subspace::full(device) : Subspace{subspace};
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  ObjectReader root(j, "config");
  if (const json* d = root.child("device")) {
    ObjectReader r(*d, "device");
    r.get("charging_energy", c.device.charging_energy);
    r.get("total_josephson_energy", c.device.total_josephson_energy);
    r.get("asymmetry", c.device.asymmetry);
    r.get("truncation", c.device.truncation);
    r.finish();
  }
  if (const json* p = root.child("protocol")) {
    ObjectReader r(*p, "protocol");
    if (const json* w = r.child("flux")) read_waveform(*w, "protocol.flux", c.protocol.drive.flux);
    if (const json* w = r.child("gate")) read_waveform(*w, "protocol.gate", c.protocol.drive.gate);
    if (const json* t = r.child("table"); t && !t->is_null()) {
      if (!t->is_string()) throw ConfigError("protocol.table: expected a path string");
      c.protocol.table = t->get<std::string>();
    }
    r.get("duration", c.protocol.duration);
    r.get("flux_inversion", c.protocol.reversal.invert_flux);
    r.get("time_mirror", c.protocol.reversal.mirror_time);
    r.finish();
  }
  if (const json* p = root.child("propagator")) {
    ObjectReader r(*p, "propagator");
    r.get("time_step", c.propagator.time_step);
    r.finish();
  }
  if (const json* s = root.child("subspace")) {
    if (s->is_string()) {
      if (s->get<std::string>() != "full") throw ConfigError("subspace: expected a list or \"full\"");
      c.full_space = true;
    } else {
      try {
        c.subspace = s->get<std::vector<int>>();
      } catch (const json::exception& e) {
        throw ConfigError(std::string("subspace: ") + e.what());
      }
    }
  }
  if (const json* l = root.child("ladder")) {
    const std::string v = l->is_string() ? l->get<std::string>() : "";
    if (v == "eigenstates") {
      c.ladder = LadderSource::eigenstates;
    } else if (v == "bare_charging") {
      c.ladder = LadderSource::bare_charging;
    } else {
      throw ConfigError("ladder: expected \"eigenstates\" or \"bare_charging\"");
    }
  }
  root.get("temperatures", c.temperatures);
  for (const char* key : {"events", "seed"}) {
    if (j.contains(key) && !j.at(key).is_number_unsigned()) {
      throw ConfigError(std::string(key) + ": expected a nonnegative integer");
    }
  }
  root.get("events", c.events);
  root.get("seed", c.seed);
  if (const json* m = root.child("mode")) {
    const std::string v = m->is_string() ? m->get<std::string>() : "";
    if (v == "exact") {
      c.mode = SampleMode::exact;
    } else if (v == "sampled") {
      c.mode = SampleMode::sampled;
    } else {
      throw ConfigError("mode: expected \"exact\" or \"sampled\"");
    }
  }
  root.get("spectrum_samples", c.spectrum_samples);
  root.get("microrev_tolerance", c.microrev_tolerance);
  if (const json* n = root.child("noise")) {
    ObjectReader r(*n, "noise");
    r.get("bath_temperature", c.noise.bath_temperature);
    r.get("level", c.noise.level);
    r.get("samples", c.noise.samples);
    r.get("t1_ns", c.noise.t1_ns);
    if (const json* d = r.child("detector")) {
      ObjectReader dr(*d, "noise.detector");
      dr.get("charge_sensitivity", c.noise.detector.charge_sensitivity);
      dr.get("measurement_time", c.noise.detector.measurement_time);
      dr.get("island_capacitance", c.noise.detector.island_capacitance);
      dr.get("coupling_capacitance", c.noise.detector.coupling_capacitance);
      dr.finish();
    }
    r.finish();
  }
  root.get("output", c.output);
  root.finish();
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  j["device"] = {{"charging_energy", c.device.charging_energy},
                 {"total_josephson_energy", c.device.total_josephson_energy},
                 {"asymmetry", c.device.asymmetry},
                 {"truncation", c.device.truncation}};
  j["protocol"] = {{"flux", waveform_json(c.protocol.drive.flux)},
                   {"gate", waveform_json(c.protocol.drive.gate)},
                   {"table", c.protocol.table ? json(*c.protocol.table) : json(nullptr)},
                   {"duration", c.protocol.duration},
                   {"flux_inversion", c.protocol.reversal.invert_flux},
                   {"time_mirror", c.protocol.reversal.mirror_time}};
  j["propagator"] = {{"time_step", c.propagator.time_step}};
  j["subspace"] = c.full_space ? json("full") : json(c.subspace);
  j["ladder"] = c.ladder == LadderSource::eigenstates ? "eigenstates" : "bare_charging";
  j["temperatures"] = c.temperatures;
  j["events"] = c.events;
  j["seed"] = c.seed;
  j["mode"] = c.mode == SampleMode::exact ? "exact" : "sampled";
  j["spectrum_samples"] = c.spectrum_samples;
  j["microrev_tolerance"] = c.microrev_tolerance;
  j["noise"] = {{"bath_temperature", c.noise.bath_temperature},
                {"level", c.noise.level},
                {"samples", c.noise.samples},
                {"t1_ns", c.noise.t1_ns},
                {"detector",
                 {{"charge_sensitivity", c.noise.detector.charge_sensitivity},
                  {"measurement_time", c.noise.detector.measurement_time},
                  {"island_capacitance", c.noise.detector.island_capacitance},
                  {"coupling_capacitance", c.noise.detector.coupling_capacitance}}}};
  j["output"] = c.output;
  return j;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace microrev::app
