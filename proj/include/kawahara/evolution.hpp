#pragma once

#include <vector>

#include "kawahara/spectral_core.hpp"

namespace kawahara {

/// if_rk4: integrating-factor RK4 (Lawson). etd_rk4: exponential time
/// differencing RK4. if_gl4: integrating-factor two-stage Gauss-Legendre,
/// order 4 and implicit; it conserves sum |c_n|^2 of real data up to the
/// fixed-point tolerance.
enum class Scheme { if_rk4, etd_rk4, if_gl4 };

/// Parameters for integrating
///   d_t u = d_x^5 u - beta lambda^-2 d_x^3 u - d_x(u^2)   on T_lambda.
struct EvolutionParams {
  TorusSpec spec{};
  double dt = 1e-3;
  double T = 1.0;
  Scheme scheme = Scheme::if_rk4;
  int record_every = 1;
  /// Test hook: drop the quadratic term so the flow is the linear group.
  bool nonlinear = true;
  /// Abort once ||u(t)||_{L^2} exceeds this multiple of the initial norm.
  double blowup_factor = 1e6;

  void validate() const;
  /// Number of steps; the step actually taken is T / steps().
  long steps() const;
};

struct Trajectory {
  EvolutionParams params;
  std::vector<double> times;
  std::vector<SpectralField> states;
  double wall_seconds = 0.0;
};

/// U_lambda(t) u: multiply c_n by exp(i p_lambda(k_n) t).
SpectralField semigroup(const SpectralField& u, double t);

/// -d_x(u^2) with the convolution taken exactly on the truncated lattice.
SpectralField nonlinear_term(const SpectralField& u);

/// Records t = 0, every `record_every`-th step, and always the final step.
Trajectory integrate(const SpectralField& u0, const EvolutionParams& params);

/// Terms of the Picard expansion on T (lambda = 1) by composite Simpson
/// quadrature of the Duhamel integrals:
///   order 1: U(t) u0
///   order 2: A_2(t) = int_0^t U(t-s) d_x(u_1(s)^2) ds
///   order 3: A_3(t) = 2 int_0^t U(t-s) d_x(u_1(s) A_2(s)) ds
/// The flow expands as u = eps u_1 - eps^2 A_2 + eps^3 A_3 + O(eps^4).
SpectralField picard_term(const SpectralField& u0, int order, double t, int quad_steps);

}  // namespace kawahara
