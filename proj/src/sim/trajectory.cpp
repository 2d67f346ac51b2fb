#include "ald/sim/trajectory.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ald::sim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<double> parse_numbers(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    const std::string field(text.substr(pos, comma - pos));
    std::size_t used = 0;
    double value = 0;
    try {
      value = std::stod(field, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("not a number: '" + field + "'");
    }
    if (used != field.size()) throw std::invalid_argument("not a number: '" + field + "'");
    out.push_back(value);
    pos = comma + 1;
  }
  return out;
}

}  // namespace

Eigen::Vector3d evaluate(const Trajectory& trajectory, double t) {
  return std::visit(
      overloaded{
          [](const StaticTarget& s) { return s.position; },
          [t](const OrbitTarget& o) {
            const double phase = 2.0 * std::numbers::pi * t / o.period;
            return Eigen::Vector3d(o.center + Eigen::Vector3d(o.radius * std::cos(phase),
                                                              o.radius * std::sin(phase), 0.0));
          },
          [t](const WaypointTarget& w) {
            if (w.samples.empty()) return Eigen::Vector3d(Eigen::Vector3d::Zero());
            if (t <= w.samples.front().first) return w.samples.front().second;
            for (std::size_t i = 1; i < w.samples.size(); ++i) {
              const auto& [t1, p1] = w.samples[i];
              if (t <= t1) {
                const auto& [t0, p0] = w.samples[i - 1];
                const double u = t1 > t0 ? (t - t0) / (t1 - t0) : 1.0;
                return Eigen::Vector3d(p0 + (p1 - p0) * u);
              }
            }
            return w.samples.back().second;
          },
      },
      trajectory);
}

WaypointTarget load_waypoints(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw std::runtime_error("cannot open waypoints file " + csv.string());
  WaypointTarget out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first && line.find_first_of("tTxX") == 0) {  // header
      first = false;
      continue;
    }
    first = false;
    const auto v = parse_numbers(line);
    if (v.size() != 4) throw std::invalid_argument("waypoint rows need t,x,y,z: " + line);
    if (!out.samples.empty() && v[0] < out.samples.back().first) {
      throw std::invalid_argument("waypoint times must be non-decreasing");
    }
    out.samples.emplace_back(v[0], Eigen::Vector3d(v[1], v[2], v[3]));
  }
  if (out.samples.empty()) throw std::invalid_argument("waypoints file is empty");
  return out;
}

Trajectory parse_trajectory(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("target needs KIND:ARGS");
  const auto kind = spec.substr(0, colon);
  const auto args = spec.substr(colon + 1);
  if (kind == "static") {
    const auto v = parse_numbers(args);
    if (v.size() != 3) throw std::invalid_argument("static target needs x,y,z");
    return StaticTarget{{v[0], v[1], v[2]}};
  }
  if (kind == "orbit") {
    const auto v = parse_numbers(args);
    if (v.size() != 2 && v.size() != 5) throw std::invalid_argument("orbit needs r,period[,cx,cy,cz]");
    if (v[1] <= 0.0) throw std::invalid_argument("orbit period must be positive");
    OrbitTarget o{{0.0, 0.0, 0.8}, v[0], v[1]};
    if (v.size() == 5) o.center = {v[2], v[3], v[4]};
    return o;
  }
  if (kind == "waypoints") return load_waypoints(std::filesystem::path(std::string(args)));
  throw std::invalid_argument("unknown target kind '" + std::string(kind) + "'");
}

}  // namespace ald::sim
