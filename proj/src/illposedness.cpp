#include "kawahara/illposedness.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include "kawahara/io.hpp"

namespace kawahara {

void WitnessSpec::validate() const {
  if (!(t > 0.0)) throw std::invalid_argument("WitnessSpec: t must be positive");
  if (N_list.size() < 4) throw std::invalid_argument("WitnessSpec: N_list needs at least 4 values");
  if (N_list.front() < 1) throw std::invalid_argument("WitnessSpec: N values must be positive");
  if (!std::is_sorted(N_list.begin(), N_list.end()) ||
      std::adjacent_find(N_list.begin(), N_list.end()) != N_list.end())
    throw std::invalid_argument("WitnessSpec: N_list must be strictly increasing");
  if (K != 0 && K < 3 * N_list.back()) throw std::invalid_argument("WitnessSpec: K must be >= 3 max(N_list)");
  if (beta < -1 || beta > 1) throw std::invalid_argument("WitnessSpec: beta must be -1, 0 or 1");
}

int WitnessSpec::truncation() const { return K != 0 ? K : 3 * N_list.back(); }

SpectralField phi_N(int N, double s, int K, int beta) {
  if (N < 1) throw std::invalid_argument("phi_N: N must be >= 1");
  SpectralField u(TorusSpec(1.0, K, beta), true);
  u.set_coeff(N, std::pow(static_cast<double>(N), -s) / std::sqrt(2.0 * std::numbers::pi));
  return u;
}

namespace {

// (5/2) P (S + (6/5) beta) = 5 P S / 2 + 3 beta P; P is always even here.
long long resonance(long long a, long long b, long long c, int beta) {
  const long long P = a * b * c;
  const long long S = a * a + b * b + c * c;
  return 5 * (P / 2) * S + 3 * beta * P;
}

double p_int(int n, int beta) {
  const double d = n;
  return d * d * d * (d * d + beta);
}

}  // namespace

long long q0(int k1, int k2, int beta) { return resonance(k1 + k2, k1, k2, beta); }

long long q1(int k1, int k2, int k3, int beta) { return resonance(k1 + k2, k1 + k3, k2 + k3, beta); }

long long q2(int k1, int k2, int k3, int beta) { return resonance(k1, k2 + k3, k1 + k2 + k3, beta); }

Complex resonant_factor(double q, double t) {
  if (std::abs(q) < 1e-8) return Complex(q * t * t / 2.0, t - q * q * t * t * t / 6.0);
  // 1 - e^{-i x} = 2 sin^2(x/2) + i sin x, free of cancellation for small x.
  const double x = q * t;
  const double h = std::sin(x / 2.0);
  return Complex(2.0 * h * h, std::sin(x)) / q;
}

namespace {

struct Support {
  std::vector<int> n;
  std::vector<Complex> c;
};

Support support_of(const SpectralField& u) {
  Support s;
  for (int n = -u.K(); n <= u.K(); ++n)
    if (n != 0 && u.coeff(n) != Complex(0.0)) {
      s.n.push_back(n);
      s.c.push_back(u.coeff(n));
    }
  return s;
}

void require_unit_torus(const SpectralField& u0, const char* who) {
  if (u0.spec().lambda != 1.0) throw std::invalid_argument(std::string(who) + ": requires lambda = 1");
}

}  // namespace

SpectralField a2_closed(const SpectralField& u0, double t) {
  require_unit_torus(u0, "a2_closed");
  const int K = u0.K();
  const int beta = u0.spec().beta;
  const Support sup = support_of(u0);
  CoeffArray out = CoeffArray::Zero(u0.spec().slots());
  for (std::size_t i = 0; i < sup.n.size(); ++i)
    for (std::size_t j = 0; j < sup.n.size(); ++j) {
      const int n1 = sup.n[i], n2 = sup.n[j], n = n1 + n2;
      if (n == 0 || std::abs(n) > K) continue;
      const long long q = q0(n1, n2, beta);
      if (q == 0) throw InvariantViolation("q0_nonzero", "q0 vanished at nonzero integer modes");
      const Complex phase =
          std::polar(1.0, p_int(n, beta) * t) - std::polar(1.0, (p_int(n1, beta) + p_int(n2, beta)) * t);
      out(n + K) += static_cast<double>(n) * phase / static_cast<double>(q) * sup.c[i] * sup.c[j];
    }
  return SpectralField(u0.spec(), std::move(out), u0.is_real());
}

SpectralField a3_closed(const SpectralField& u0, double t) {
  require_unit_torus(u0, "a3_closed");
  const int K = u0.K();
  const int beta = u0.spec().beta;
  const Support sup = support_of(u0);
  for (int n : sup.n)
    if (3 * std::abs(n) > K) throw std::invalid_argument("a3_closed: data must be supported on |n| <= K/3");

  CoeffArray out = CoeffArray::Zero(u0.spec().slots());
  const std::size_t S = sup.n.size();
  for (std::size_t a = 0; a < S; ++a)
    for (std::size_t b = 0; b < S; ++b)
      for (std::size_t c = 0; c < S; ++c) {
        const int n1 = sup.n[a], n2 = sup.n[b], n3 = sup.n[c];
        const int m = n2 + n3, n = n1 + m;
        if (m == 0 || n == 0) continue;
        const long long r0 = q0(n2, n3, beta);
        if (r0 == 0) throw InvariantViolation("q0_nonzero", "q0 vanished at nonzero integer modes");
        const double r1 = static_cast<double>(q1(n1, n2, n3, beta));
        const double r2 = static_cast<double>(q2(n1, n2, n3, beta));
        const Complex bracket = resonant_factor(r2, t) - resonant_factor(r1, t);
        out(n + K) += 2.0 * n * static_cast<double>(m) / static_cast<double>(r0) * bracket * sup.c[a] * sup.c[b] *
                      sup.c[c];
      }
  for (int n = -K; n <= K; ++n)
    if (n != 0) out(n + K) *= std::polar(1.0, p_int(n, beta) * t);
  return SpectralField(u0.spec(), std::move(out), u0.is_real());
}

// ---------------------------------------------------------------------------
// Inflation scan

namespace {

struct Fit {
  double slope, intercept, residual;
};

Fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return {std::numeric_limits<double>::quiet_NaN(), sy / n, 0.0};
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (slope * x[i] + intercept);
    ss += r * r;
  }
  return {slope, intercept, std::sqrt(ss / n)};
}

double mass_on(const SpectralField& u, int n, double s) {
  if (n > u.K()) return 0.0;
  const double w = std::pow(static_cast<double>(n), 2.0 * s);
  return std::sqrt(w * (std::norm(u.transform(n)) + std::norm(u.transform(-n))));
}

}  // namespace

InflationReport inflation_scan(const WitnessSpec& ws) {
  ws.validate();
  InflationReport report;
  report.spec = ws;
  const int K = ws.truncation();
  std::vector<double> xs, ys;
  for (int N : ws.N_list) {
    const SpectralField a3 = a3_closed(phi_N(N, ws.s, K, ws.beta), ws.t);
    InflationRow row;
    row.N = N;
    row.norm = homogeneous_sobolev_norm(a3, ws.s);
    row.norm_at_N = mass_on(a3, N, ws.s);
    row.norm_at_3N = mass_on(a3, 3 * N, ws.s);
    if (!(row.norm > 0.0) || !std::isfinite(row.norm))
      throw InvariantViolation("witness_norm_positive", "A_3 norm is zero or non-finite at N = " + std::to_string(N));
    xs.push_back(std::log(static_cast<double>(N)));
    ys.push_back(std::log(row.norm));
    row.slope_running = xs.size() < 2 ? std::numeric_limits<double>::quiet_NaN() : least_squares(xs, ys).slope;
    report.rows.push_back(row);
  }
  const Fit fit = least_squares(xs, ys);
  report.slope = fit.slope;
  report.intercept = fit.intercept;
  report.residual = fit.residual;
  return report;
}

void InflationReport::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("InflationReport: cannot open " + path.string());
  out << "N,norm,slope_running\n";
  for (const auto& r : rows)
    out << r.N << ',' << io::format_double(r.norm) << ',' << io::format_double(r.slope_running) << '\n';
}

void InflationReport::write_summary(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["s"] = spec.s;
  j["t"] = spec.t;
  j["K"] = spec.truncation();
  j["beta"] = spec.beta;
  j["fitted_slope"] = slope;
  j["expected_exponent"] = expected();
  j["residual"] = residual;
  j["per_N"] = nlohmann::json::array();
  for (const auto& r : rows)
    j["per_N"].push_back({{"N", r.N}, {"norm", r.norm}, {"component_N", r.norm_at_N}, {"component_3N", r.norm_at_3N}});
  std::ofstream out(path);
  if (!out) throw std::runtime_error("InflationReport: cannot open " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace kawahara
