#include "kawahara/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace kawahara::io {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

nlohmann::json spec_to_json(const TorusSpec& spec) {
  return {{"lambda", spec.lambda}, {"K", spec.K}, {"beta", spec.beta}};
}

TorusSpec spec_from_json(const nlohmann::json& j) {
  return TorusSpec(j.at("lambda").get<double>(), j.at("K").get<int>(), j.at("beta").get<int>());
}

void write_field(const SpectralField& u, const std::filesystem::path& csv, const std::filesystem::path& sidecar) {
  std::ofstream out(csv);
  if (!out) throw std::runtime_error("write_field: cannot open " + csv.string());
  out << "n,re,im\n";
  for (int n = -u.K(); n <= u.K(); ++n) {
    if (n == 0) continue;
    const Complex c = u.coeff(n);
    out << n << ',' << format_double(c.real()) << ',' << format_double(c.imag()) << '\n';
  }
  std::ofstream side(sidecar);
  if (!side) throw std::runtime_error("write_field: cannot open " + sidecar.string());
  side << spec_to_json(u.spec()).dump(2) << '\n';
}

SpectralField read_field(const std::filesystem::path& csv, const std::filesystem::path& sidecar, bool is_real) {
  std::ifstream side(sidecar);
  if (!side) throw std::runtime_error("read_field: cannot open " + sidecar.string());
  const TorusSpec spec = spec_from_json(nlohmann::json::parse(side));

  std::ifstream in(csv);
  if (!in) throw std::runtime_error("read_field: cannot open " + csv.string());
  std::string line;
  std::getline(in, line);
  if (line != "n,re,im") throw std::runtime_error("read_field: expected header n,re,im");
  CoeffArray coeffs = CoeffArray::Zero(spec.slots());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b, c;
    std::getline(row, a, ',');
    std::getline(row, b, ',');
    std::getline(row, c, ',');
    const int n = std::stoi(a);
    if (n == 0 || std::abs(n) > spec.K) throw std::runtime_error("read_field: index out of range: " + a);
    coeffs(n + spec.K) = Complex(std::stod(b), std::stod(c));
  }
  SpectralField u(spec, std::move(coeffs), is_real);
  if (is_real && u.reality_defect() > 1e-12 * (1.0 + u.coeffs().abs().maxCoeff()))
    throw std::runtime_error("read_field: data flagged real but not conjugate-symmetric");
  return u;
}

std::string scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::if_rk4: return "if_rk4";
    case Scheme::etd_rk4: return "etd_rk4";
    case Scheme::if_gl4: return "if_gl4";
  }
  return "if_rk4";
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "if_rk4") return Scheme::if_rk4;
  if (name == "etd_rk4") return Scheme::etd_rk4;
  if (name == "if_gl4") return Scheme::if_gl4;
  throw std::invalid_argument("unknown scheme: " + name);
}

nlohmann::json trajectory_metadata(const Trajectory& traj) {
  const auto& p = traj.params;
  return {{"spec", spec_to_json(p.spec)},
          {"dt", p.dt},
          {"step", p.T / p.steps()},
          {"T", p.T},
          {"scheme", scheme_name(p.scheme)},
          {"record_every", p.record_every},
          {"nonlinear", p.nonlinear},
          {"blowup_factor", p.blowup_factor},
          {"samples", traj.times.size()},
          {"wall_seconds", traj.wall_seconds}};
}

void write_trajectory(const Trajectory& traj, const std::filesystem::path& csv, const std::filesystem::path& meta) {
  std::ofstream out(csv);
  if (!out) throw std::runtime_error("write_trajectory: cannot open " + csv.string());
  out << "t,n,re,im\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto& u = traj.states[i];
    const std::string t = format_double(traj.times[i]);
    for (int n = -u.K(); n <= u.K(); ++n) {
      if (n == 0) continue;
      const Complex c = u.coeff(n);
      out << t << ',' << n << ',' << format_double(c.real()) << ',' << format_double(c.imag()) << '\n';
    }
  }
  std::ofstream m(meta);
  if (!m) throw std::runtime_error("write_trajectory: cannot open " + meta.string());
  m << trajectory_metadata(traj).dump(2) << '\n';
}

}  // namespace kawahara::io
