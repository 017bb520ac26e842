#pragma once

#include <filesystem>
#include <vector>

#include "kawahara/spectral_core.hpp"

namespace kawahara {

struct WitnessSpec {
  double s = -1.8;
  double t = 0.1;
  std::vector<int> N_list{8, 16, 32, 64, 128, 256};
  int K = 0;  // 0 picks 3 * max(N_list)
  int beta = 1;

  void validate() const;
  int truncation() const;
};

/// Two-mode real datum with u_hat(+-N) = N^{-s} on T (lambda = 1).
SpectralField phi_N(int N, double s, int K, int beta = 1);

/// Resonance functions at integer frequencies (beta in {-1, 0, 1}); exact in
/// 64-bit arithmetic for |k| up to about 1500.
long long q0(int k1, int k2, int beta);
long long q1(int k1, int k2, int k3, int beta);
long long q2(int k1, int k2, int k3, int beta);

/// (1 - e^{-i q t}) / q, with the series i t + q t^2 / 2 - i q^2 t^3 / 6
/// when |q| < 1e-8.
Complex resonant_factor(double q, double t);

/// Closed-form Picard terms on T (same conventions as picard_term):
///   A_2(t)_n = n sum_{n1+n2=n} c_{n1} c_{n2} (e^{i p(n) t} - e^{i (p(n1)+p(n2)) t}) / q0(n1, n2)
///   A_3(t)_n = 2 n e^{i p(n) t} sum_{n1+n2+n3=n} (n2+n3) / q0(n2, n3)
///              * (-(1 - e^{-i q1 t}) / q1 + (1 - e^{-i q2 t}) / q2) c_{n1} c_{n2} c_{n3}
SpectralField a2_closed(const SpectralField& u0, double t);
SpectralField a3_closed(const SpectralField& u0, double t);

struct InflationRow {
  int N = 0;
  double norm = 0.0;
  double slope_running = 0.0;  // fit through this and all earlier rows (NaN on the first)
  double norm_at_N = 0.0;      // \dot H^s mass on +-N (resonant part)
  double norm_at_3N = 0.0;     // \dot H^s mass on +-3N
};

struct InflationReport {
  WitnessSpec spec;
  std::vector<InflationRow> rows;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS residual of the log-log fit
  double expected() const { return -2.0 * spec.s - 3.0; }

  void write_csv(const std::filesystem::path& path) const;
  void write_summary(const std::filesystem::path& path) const;
};

/// Least-squares slope of log ||A_3(phi_N)(t)||_{\dot H^s} against log N.
InflationReport inflation_scan(const WitnessSpec& ws);

}  // namespace kawahara
