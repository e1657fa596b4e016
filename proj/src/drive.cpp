#include "microrev/drive.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "microrev/units.hpp"

namespace microrev {

double Waveform::operator()(double t) const noexcept {
  return offset + amplitude * std::cos(units::kTwoPi * frequency * t + phase);
}

void Waveform::validate() const {
  if (!std::isfinite(offset) || !std::isfinite(amplitude) || !std::isfinite(frequency) ||
      !std::isfinite(phase)) {
    throw std::invalid_argument("Waveform: all fields must be finite");
  }
  if (frequency < 0.0) throw std::invalid_argument("Waveform: frequency must be >= 0");
}

TabulatedDrive::TabulatedDrive(std::vector<double> times, std::vector<double> flux,
                               std::vector<double> gate)
    : times_(std::move(times)), flux_(std::move(flux)), gate_(std::move(gate)) {
  if (times_.size() < 2 || flux_.size() != times_.size() || gate_.size() != times_.size()) {
    throw std::invalid_argument("TabulatedDrive: need >= 2 rows with matching columns");
  }
  if (times_.front() != 0.0) throw std::invalid_argument("TabulatedDrive: first time must be 0");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || !std::isfinite(flux_[i]) || !std::isfinite(gate_[i])) {
      throw std::invalid_argument("TabulatedDrive: non-finite value in row " + std::to_string(i));
    }
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw std::invalid_argument("TabulatedDrive: times must be strictly increasing");
    }
  }
}

TabulatedDrive TabulatedDrive::from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("waveform table: empty input");
  // Header is required; a numeric first row means it is missing.
  {
    std::istringstream probe(line);
    double x = 0.0;
    if (probe >> x) throw std::invalid_argument("waveform table: header row required");
  }
  std::vector<double> t, flux, gate;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double a = 0.0, b = 0.0, c = 0.0;
    if (!(fields >> a >> b >> c)) {
      throw std::invalid_argument("waveform table: malformed row " + std::to_string(row));
    }
    t.push_back(a);
    flux.push_back(b);
    gate.push_back(c);
  }
  return TabulatedDrive(std::move(t), std::move(flux), std::move(gate));
}

TabulatedDrive TabulatedDrive::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("waveform table: cannot open " + path.string());
  return from_csv(in);
}

BiasPoint TabulatedDrive::at(double t) const {
  if (t <= times_.front()) return {flux_.front(), gate_.front()};
  if (t >= times_.back()) return {flux_.back(), gate_.back()};
  const auto hi = static_cast<std::size_t>(
      std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
  return {flux_[lo] + w * (flux_[hi] - flux_[lo]), gate_[lo] + w * (gate_[hi] - gate_[lo])};
}

const char* to_string(Direction d) noexcept {
  return d == Direction::forward ? "forward" : "backward";
}

void DriveProtocol::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw std::invalid_argument("DriveProtocol: duration must be > 0");
  }
  if (const auto* c = std::get_if<CosineDrive>(&shape)) {
    c->flux.validate();
    c->gate.validate();
  } else if (const auto* tab = std::get_if<TabulatedDrive>(&shape)) {
    if (duration > tab->end_time() * (1.0 + 1e-12)) {
      throw std::invalid_argument("DriveProtocol: duration exceeds the waveform table");
    }
  }
}

DriveProtocol default_protocol() {
  CosineDrive drive{
      .flux = {.offset = 0.0, .amplitude = 0.5, .frequency = 1.5, .phase = 0.0},
      .gate = {.offset = 0.05, .amplitude = -2.0, .frequency = 1.5, .phase = 0.0},
  };
  return DriveProtocol{
      .shape = drive, .duration = 2.0 / 3.0, .direction = Direction::forward, .reversal = {}};
}

namespace {

BiasPoint shape_at(const DriveProtocol& p, double t) {
  return std::visit(
      [t](const auto& s) -> BiasPoint {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, CosineDrive>) {
          return {s.flux(t), s.gate(t)};
        } else {
          return s.at(t);
        }
      },
      p.shape);
}

}  // namespace

BiasPoint sample_drive_unchecked(const DriveProtocol& p, double t) noexcept {
  if (p.direction == Direction::forward) return shape_at(p, t);
  BiasPoint b = shape_at(p, p.reversal.mirror_time ? p.duration - t : t);
  if (p.reversal.invert_flux) b.flux = -b.flux;
  return b;
}

BiasPoint sample_drive(const DriveProtocol& p, double t) {
  if (!(t >= 0.0 && t <= p.duration)) {
    throw std::out_of_range("sample_drive: t = " + std::to_string(t) + " outside [0, " +
                            std::to_string(p.duration) + "]");
  }
  return sample_drive_unchecked(p, t);
}

DriveProtocol reverse_protocol(const DriveProtocol& p) {
  DriveProtocol r = p;
  r.direction = p.direction == Direction::forward ? Direction::backward : Direction::forward;
  return r;
}

bool is_cyclic(const DriveProtocol& p, double tol) {
  const BiasPoint a = sample_drive(p, 0.0);
  const BiasPoint b = sample_drive(p, p.duration);
  return std::abs(a.flux - b.flux) <= tol && std::abs(a.gate_charge - b.gate_charge) <= tol;
}

}  // namespace microrev
