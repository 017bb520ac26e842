#include <doctest.h>

#include "kawahara/evolution.hpp"
#include "kawahara/rng.hpp"

using namespace kawahara;

namespace {

SpectralField smooth_data(const TorusSpec& spec, double amplitude = 1.0) {
  SpectralField u(spec, true);
  u.set_coeff(1, 0.5 * amplitude);
  u.set_coeff(2, 0.25 * amplitude);
  return u;
}

double l2_distance(const SpectralField& a, const SpectralField& b) {
  return std::sqrt(2.0 * std::numbers::pi * a.spec().lambda * (a.coeffs() - b.coeffs()).abs2().sum());
}

EvolutionParams params_for(const TorusSpec& spec, double dt, double T, Scheme scheme) {
  EvolutionParams p;
  p.spec = spec;
  p.dt = dt;
  p.T = T;
  p.scheme = scheme;
  p.record_every = 1 << 30;
  return p;
}

}  // namespace

TEST_SUITE("evolution") {
  TEST_CASE("semigroup") {
    const TorusSpec spec(1.0, 8, 1);
    CounterRng rng(5);
    SpectralField u(spec, true);
    for (int n = 1; n <= 8; ++n) u.set_coeff(n, Complex(rng.normal(), rng.normal()));

    const SpectralField same = semigroup(u, 0.0);
    CHECK((same.coeffs() - u.coeffs()).abs().maxCoeff() == 0.0);

    const SpectralField moved = semigroup(u, 0.37);
    CHECK(moved.is_real());
    CHECK(moved.reality_defect() < 1e-14);
    for (double s : {-2.0, 0.0, 1.5})
      CHECK(homogeneous_sobolev_norm(moved, s) == doctest::Approx(homogeneous_sobolev_norm(u, s)).epsilon(1e-14));

    SpectralField one(spec, true);
    one.set_coeff(1, 1.0);
    const SpectralField back = semigroup(one, std::numbers::pi);  // p(1) = 2
    CHECK(std::abs(back.coeff(1) - 1.0) < 1e-14);
  }

  TEST_CASE("nonlinear term") {
    const TorusSpec spec(1.0, 6, 1);
    CHECK(nonlinear_term(SpectralField(spec, true)).coeffs().abs().maxCoeff() == 0.0);
    SpectralField u(spec, true);
    u.set_coeff(1, 0.5);
    const SpectralField f = nonlinear_term(u);  // -(cos^2 x)' = sin 2x
    CHECK(std::abs(f.coeff(2) - Complex(0.0, -0.5)) < 1e-15);
    CHECK(std::abs(f.coeff(-2) - Complex(0.0, 0.5)) < 1e-15);
    CHECK(std::abs(f.coeff(1)) < 1e-15);
  }

  TEST_CASE("parameter validation") {
    const TorusSpec spec(1.0, 4, 1);
    EvolutionParams p = params_for(spec, 0.1, 0.05, Scheme::if_rk4);
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = params_for(spec, -1.0, 1.0, Scheme::if_rk4);
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = params_for(spec, 0.3, 1.0, Scheme::if_rk4);
    CHECK(p.steps() == 4);
    p.record_every = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    const TorusSpec other(1.0, 5, 1);
    CHECK_THROWS_AS(integrate(SpectralField(other, true), params_for(spec, 0.1, 1.0, Scheme::if_rk4)),
                    std::invalid_argument);
  }

  TEST_CASE("zero data gives a zero trajectory") {
    const TorusSpec spec(1.0, 16, 1);
    EvolutionParams p = params_for(spec, 1e-2, 0.1, Scheme::if_rk4);
    p.record_every = 1;
    const Trajectory traj = integrate(SpectralField(spec, true), p);
    CHECK(traj.times.size() == 11);
    CHECK(traj.times.front() == 0.0);
    for (const auto& s : traj.states) CHECK(s.coeffs().abs().maxCoeff() == 0.0);
  }

  TEST_CASE("linear hook reproduces the group exactly") {
    const TorusSpec spec(2.0, 16, -1);
    for (Scheme scheme : {Scheme::if_rk4, Scheme::etd_rk4, Scheme::if_gl4}) {
      EvolutionParams p = params_for(spec, 1e-2, 0.5, scheme);
      p.nonlinear = false;
      const SpectralField u0 = smooth_data(spec);
      const Trajectory traj = integrate(u0, p);
      const SpectralField exact = semigroup(u0, 0.5);
      CHECK(l2_distance(traj.states.back(), exact) < 1e-13);
    }
  }

  TEST_CASE("real data stay real, mean zero, and conserve L2 to integrator accuracy") {
    const TorusSpec spec(1.0, 32, 1);
    const SpectralField u0 = smooth_data(spec);
    for (Scheme scheme : {Scheme::if_rk4, Scheme::etd_rk4, Scheme::if_gl4}) {
      EvolutionParams p = params_for(spec, 5e-4, 0.2, scheme);
      p.record_every = 100;
      const Trajectory traj = integrate(u0, p);
      CHECK(traj.states.size() == 5);
      for (const auto& s : traj.states) {
        CHECK(s.reality_defect() < 1e-14);
        CHECK(s.coeff(0) == Complex(0.0));
      }
      const double drift = std::abs(l2_norm_squared(traj.states.back()) - l2_norm_squared(u0)) / l2_norm_squared(u0);
      CHECK(drift < (scheme == Scheme::if_gl4 ? 1e-13 : 1e-8));
    }
  }

  TEST_CASE("fourth-order convergence") {
    // lambda = 1.5 keeps dt p(n) away from 2 pi m on the energetic modes; on
    // lambda = 1, dt = 2e-3 sits on the dt p(5) ~ 2 pi step-size resonance.
    const TorusSpec spec(1.5, 32, 1);
    const SpectralField u0 = smooth_data(spec);
    const double T = 1.0;
    for (Scheme scheme : {Scheme::if_rk4, Scheme::etd_rk4, Scheme::if_gl4}) {
      const SpectralField ref = integrate(u0, params_for(spec, 2.5e-4, T, scheme)).states.back();
      const double e1 = l2_distance(integrate(u0, params_for(spec, 4e-3, T, scheme)).states.back(), ref);
      const double e2 = l2_distance(integrate(u0, params_for(spec, 2e-3, T, scheme)).states.back(), ref);
      const double e3 = l2_distance(integrate(u0, params_for(spec, 1e-3, T, scheme)).states.back(), ref);
      CAPTURE(scheme);
      CHECK(std::log2(e1 / e2) > 3.7);
      CHECK(std::log2(e2 / e3) > 3.7);
    }
  }

  TEST_CASE("blow-up guard") {
    const TorusSpec spec(1.0, 32, 1);
    EvolutionParams p = params_for(spec, 5e-2, 5.0, Scheme::if_rk4);
    CHECK_THROWS_AS(integrate(smooth_data(spec, 200.0), p), InvariantViolation);
    p.blowup_factor = 1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  }

  TEST_CASE("Picard terms") {
    const TorusSpec spec(1.0, 16, 1);
    SpectralField u0(spec, true);
    u0.set_coeff(1, 0.5);
    CHECK_THROWS_AS(picard_term(rescale_data(u0, 2.0), 2, 0.1, 64), std::invalid_argument);
    CHECK_THROWS_AS(picard_term(u0, 2, 0.1, 15), std::invalid_argument);
    CHECK_THROWS_AS(picard_term(u0, 4, 0.1, 64), std::invalid_argument);

    CHECK(picard_term(u0, 2, 0.0, 64).coeffs().abs().maxCoeff() == 0.0);
    CHECK(picard_term(u0, 3, 0.0, 64).coeffs().abs().maxCoeff() == 0.0);
    CHECK(l2_distance(picard_term(u0, 1, 0.3, 64), semigroup(u0, 0.3)) < 1e-15);

    const SpectralField a3 = picard_term(u0, 3, 0.3, 64);
    CHECK(a3.is_real());
    for (int n = 1; n <= 16; ++n) {
      if (n == 1 || n == 3)
        CHECK(std::abs(a3.coeff(n)) > 0.0);
      else
        CHECK(std::abs(a3.coeff(n)) < 1e-15);
    }
  }

  TEST_CASE("Picard expansion matches the flow to fourth order in the amplitude") {
    const TorusSpec spec(1.0, 16, 1);
    const SpectralField base = smooth_data(spec);
    const double t = 0.3;
    const SpectralField u1 = picard_term(base, 1, t, 4096);
    const SpectralField a2 = picard_term(base, 2, t, 4096);
    const SpectralField a3 = picard_term(base, 3, t, 4096);
    std::vector<double> eps{0.08, 0.04, 0.02}, rem;
    for (double e : eps) {
      const SpectralField u0(spec, base.coeffs() * e, true);
      const SpectralField u = integrate(u0, params_for(spec, 1e-4, t, Scheme::if_gl4)).states.back();
      const SpectralField approx(spec, e * u1.coeffs() - e * e * a2.coeffs() + e * e * e * a3.coeffs(), true);
      rem.push_back(l2_distance(u, approx));
    }
    CHECK(std::log2(rem[0] / rem[1]) > 3.8);
    CHECK(std::log2(rem[1] / rem[2]) > 3.8);
  }
}
