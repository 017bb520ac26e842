#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "kawahara/bourgain.hpp"
#include "kawahara/convolution.hpp"

using namespace kawahara;

namespace {

/// Samples of u(t) = U(t) u0 at M uniform times over [0, Tw] (endpoint included).
Trajectory linear_trajectory(const SpectralField& u0, double Tw, int M) {
  Trajectory traj;
  traj.params.spec = u0.spec();
  traj.params.dt = Tw / M;
  traj.params.T = Tw;
  for (int j = 0; j <= M; ++j) {
    const double t = Tw * j / M;
    traj.times.push_back(t);
    traj.states.push_back(semigroup(u0, t));
  }
  return traj;
}

SpaceTimeField delta(const TorusSpec& spec, int n, long long m, Complex v = 1.0) {
  SpaceTimeField F(spec, commensurate_window(spec), Taper::none);
  F.add(n, m, v);
  return F;
}

}  // namespace

TEST_SUITE("bourgain") {
  TEST_CASE("region classification and tie-breaking") {
    CHECK(classify_modulation(0.0, 2.0) == RegionId::D1);
    CHECK(classify_modulation(1.6, 2.0) == RegionId::D1);  // |k|^4/10 belongs to D1
    CHECK(classify_modulation(1.7, -2.0) == RegionId::D2);
    CHECK(classify_modulation(3.2, 2.0) == RegionId::D2);  // |k|^5/10 belongs to D2
    CHECK(classify_modulation(3.3, 2.0) == RegionId::OTHER);
    CHECK(classify_modulation(0.1, 1.0) == RegionId::D1);
    CHECK(classify_modulation(0.2, 1.0) == RegionId::D3);
    CHECK(classify_modulation(-5.0, 0.5) == RegionId::D3);
    CHECK(classify_modulation(0.001, 0.5) == RegionId::OTHER);

    const TorusSpec spec(2.0, 8, 1);
    CHECK(classify(spec, dispersion(spec, 1.5), 1.5) == RegionId::D1);
    CHECK(std::string(region_name(RegionId::D3)) == "D3");
  }

  TEST_CASE("every lattice point lands in exactly one region") {
    const TorusSpec spec(4.0, 16, 1);
    int wrong = 0;
    for (int n = -16; n <= 16; ++n) {
      if (n == 0) continue;
      const double k = spec.frequency(n);
      for (double mod = -2000.0; mod <= 2000.0; mod += 0.37) {
        const double a = std::abs(k), m = std::abs(mod);
        const int hits = (a >= 1 && m <= a * a * a * a / 10) + (a >= 1 && m >= a * a * a * a / 10 && m <= std::pow(a, 5) / 10) +
                         (a <= 1 && a >= 1 / spec.lambda && m >= std::pow(a, 5) / 10);
        const RegionId r = classify_modulation(mod, k);
        wrong += (hits == 0) != (r == RegionId::OTHER);
      }
    }
    CHECK(wrong == 0);
  }

  TEST_CASE("temporal transform") {
    const TorusSpec spec(1.0, 4, 1);
    const double Tw = 2.0 * std::numbers::pi;
    CHECK(to_spacetime(linear_trajectory(SpectralField(spec, true), Tw, 64)).is_zero());

    SpectralField one(spec, false);
    one.set_coeff(1, 1.0);
    const SpaceTimeField F = to_spacetime(linear_trajectory(one, Tw, 64), Taper::none);
    CHECK(F.window() == doctest::Approx(Tw));
    CHECK(F.commensurate());
    double total = 0.0, at_curve = 0.0;
    for (const auto& e : F.column(1)) {
      total += std::norm(e.value);
      if (std::abs(F.tau(1, e.m) - 2.0) < 1e-9) at_curve += std::norm(e.value);
    }
    CHECK(at_curve >= 0.99 * total);
    CHECK(F.nearest_bin(1, 2.0) == 2);

    Trajectory bad = linear_trajectory(one, Tw, 8);
    bad.times[3] += 1e-3;
    CHECK_THROWS_AS(to_spacetime(bad), std::invalid_argument);
  }

  TEST_CASE("Parseval with the Hann taper") {
    const TorusSpec spec(2.0, 6, -1);
    SpectralField u(spec, true);
    u.set_coeff(1, Complex(0.3, 0.2));
    u.set_coeff(4, Complex(-0.1, 0.5));
    const int M = 128;
    const double Tw = 3.7;  // deliberately not commensurate
    const Trajectory traj = linear_trajectory(u, Tw, M);
    const SpaceTimeField F = to_spacetime(traj, Taper::hann);
    CHECK_FALSE(F.commensurate());
    double lhs = 0.0;
    for (int n = -6; n <= 6; ++n)
      if (n != 0)
        for (const auto& e : F.column(n)) lhs += std::norm(e.value);
    lhs *= F.bin_measure() / spec.lambda;
    const double dt = Tw / M;
    double rhs = 0.0;
    for (int j = 0; j < M; ++j) {
      const double w = std::pow(std::sin(std::numbers::pi * j / M), 2);
      rhs += dt * w * w * l2_norm_squared(traj.states[j]);
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    // The taper costs a factor 3/8 of the time-integrated squared norm.
    CHECK(rhs == doctest::Approx(0.375 * Tw * l2_norm_squared(u)).epsilon(1e-12));
  }

  TEST_CASE("norms of a single delta") {
    const TorusSpec spec(2.0, 8, 1);
    const long long m = 5;
    const int n = 3;
    const SpaceTimeField F = delta(spec, n, m);
    const double k = spec.frequency(n);
    const double sigma = F.modulation(n, m);
    const double dtau = F.bin_measure();
    CHECK(dtau == doctest::Approx(1.0 / 32.0));
    CHECK(xsb_norm(F, -1.0, 0.5) ==
          doctest::Approx(std::pow(japanese(k), -1.0) * std::pow(japanese(sigma), 0.5) * std::sqrt(dtau / spec.lambda)));
    CHECK(ys_norm(F, -1.0) == doctest::Approx(std::pow(japanese(k), -1.0) * dtau / std::sqrt(spec.lambda)));

    const SpaceTimeField Z(spec, 1.0);
    CHECK(xsb_norm(Z, 0.0, 0.0) == 0.0);
    CHECK(zs_norm(Z, -1.2) == 0.0);
    CHECK_THROWS_AS(zs_norm(F, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(zs_norm(F, -1.6), std::invalid_argument);
  }

  TEST_CASE("X^{s,b} grows with b once modulations are at least one bin") {
    const TorusSpec spec(1.0, 8, 1);
    CounterRng rng(4);
    const SpaceTimeField F = dyadic_packet(spec, 2, 4, 20, rng);
    double prev = 0.0;
    for (double b = -0.5; b <= 1.0; b += 0.25) {
      const double v = xsb_norm(F, -1.0, b);
      CHECK(v > prev);
      prev = v;
    }
  }

  TEST_CASE("Z^s of a D1 packet has no D2 or D3 part") {
    const TorusSpec spec(1.0, 16, 1);
    SpaceTimeField F(spec, commensurate_window(spec));
    for (int n = 4; n <= 8; ++n) {
      const long long m0 = std::llround(dispersion_at_index(spec, n) / F.bin_measure());
      for (long long d = -3; d <= 3; ++d) F.add(n, m0 + d, Complex(1.0, 0.5 * d));
    }
    const ZsParts parts = zs_parts(F, -1.25);
    CHECK(parts.d2 == 0.0);
    CHECK(parts.d3 == 0.0);
    CHECK(parts.d1 == doctest::Approx(xsb_norm(F, -1.25, 0.75)));
    CHECK(zs_norm(F, -1.25) == doctest::Approx(parts.d1 + parts.ys));
  }

  TEST_CASE("embedding spot check between X^{s,1/4} and X^{s,3/4}") {
    const TorusSpec spec(1.0, 16, 1);
    double worst_upper = 0.0, worst_lower = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      CounterRng rng(1000 + trial);
      const int j = static_cast<int>(rng.uniform_int(0, 3));
      const int i = static_cast<int>(rng.uniform_int(0, 6));
      const SpaceTimeField F = dyadic_packet(spec, j, i, 12, rng);
      const double z = zs_norm(F, -1.5);
      worst_upper = std::max(worst_upper, z / xsb_norm(F, -1.5, 0.75));
      worst_lower = std::max(worst_lower, xsb_norm(F, -1.5, 0.25) / z);
    }
    MESSAGE("Z^s / X^{s,3/4} max " << worst_upper << ", X^{s,1/4} / Z^s max " << worst_lower);
    CHECK(std::isfinite(worst_upper));
    CHECK(std::isfinite(worst_lower));
  }

  TEST_CASE("space-time convolution is the transform of the product") {
    const TorusSpec spec(1.0, 3, 1);
    SpectralField u(spec, true);
    u.set_coeff(1, Complex(0.5, 0.1));
    SpectralField v(spec, true);
    v.set_coeff(2, Complex(0.4, -0.3));
    const double Tw = commensurate_window(spec);
    const int M = 1024;  // product phases sit at most p(3) - p(1) - p(2) = 228 bins off the curve
    const Trajectory tu = linear_trajectory(u, Tw, M), tv = linear_trajectory(v, Tw, M);
    const SpaceTimeField G = convolve(to_spacetime(tu, Taper::none), to_spacetime(tv, Taper::none));
    CHECK(G.K() == 6);

    // Direct route: transform the pointwise product on the doubled lattice.
    Trajectory prod;
    const TorusSpec wide(1.0, 6, 1);
    prod.params.spec = wide;
    prod.times = tu.times;
    for (std::size_t j = 0; j < tu.times.size(); ++j) {
      CoeffArray a = CoeffArray::Zero(wide.slots()), b = CoeffArray::Zero(wide.slots());
      a.segment(3, 7) = tu.states[j].coeffs();
      b.segment(3, 7) = tv.states[j].coeffs();
      prod.states.emplace_back(wide, truncated_product(a, b, 6), true);
    }
    const SpaceTimeField H = to_spacetime(prod, Taper::none);
    double err = 0.0, scale = 0.0;
    for (int n = -6; n <= 6; ++n) {
      if (n == 0) continue;
      for (const auto& e : H.column(n)) {
        Complex g = 0.0;
        for (const auto& x : G.column(n))
          if (x.m == e.m) g = x.value;
        err = std::max(err, std::abs(g - e.value));
        scale = std::max(scale, std::abs(e.value));
      }
    }
    CHECK(err <= 1e-9 * scale);
  }

  TEST_CASE("bilinear and Strichartz ratios") {
    const TorusSpec spec(1.0, 16, 1);
    CounterRng rng(77);
    const SpaceTimeField u = dyadic_packet(spec, 2, 3, 10, rng);
    const SpaceTimeField v = dyadic_packet(spec, 3, 5, 10, rng);
    const SpaceTimeField zero(spec, commensurate_window(spec));
    CHECK_THROWS_AS(bilinear_ratio(u, zero, -1.5), std::invalid_argument);
    CHECK(strichartz_ratio(zero, v, 0.5, 0.5) == 0.0);
    CHECK_THROWS_AS(strichartz_ratio(u, v, 0.3, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(strichartz_ratio(u, v, 0.2, 0.8), std::invalid_argument);

    const double r = bilinear_ratio(u, v, -1.5);
    CHECK(std::isfinite(r));
    CHECK(r > 0.0);
    const double shifted = bilinear_ratio(u.translated(0.731), v.translated(0.731), -1.5);
    CHECK(shifted == doctest::Approx(r).epsilon(1e-10));
    CHECK(strichartz_ratio(u.translated(2.0), v.translated(2.0), 0.5, 0.5) ==
          doctest::Approx(strichartz_ratio(u, v, 0.5, 0.5)).epsilon(1e-10));

    SpaceTimeField other(TorusSpec(2.0, 16, 1), 3.0);
    CHECK_THROWS_AS(convolve(u, other), std::invalid_argument);
  }

  TEST_CASE("pair measure matches a brute-force scan") {
    for (double lambda : {1.0, 3.0}) {
      const TorusSpec spec(lambda, 8, 1);
      CounterRng rng(5);
      for (int trial = 0; trial < 40; ++trial) {
        const int n = static_cast<int>(rng.uniform_int(-30, 30));
        if (n == 0) continue;
        const double M1 = std::pow(2.0, static_cast<double>(rng.uniform_int(0, 8)));
        const double M2 = std::pow(2.0, static_cast<double>(rng.uniform_int(0, 8)));
        const double tau = resonance_center(spec, n / lambda) + rng.uniform(-500.0, 500.0);
        double brute = 0.0;
        for (int n1 = -2000; n1 <= 2000; ++n1) {
          const int n2 = n - n1;
          if (n1 == 0 || n2 == 0) continue;
          const double p1 = dispersion_at_index(spec, n1), p2 = dispersion_at_index(spec, n2);
          brute += std::max(0.0, std::min(p1 + M1, tau - p2 + M2) - std::max(p1 - M1, tau - p2 - M2));
        }
        CHECK(modulation_pair_measure(spec, tau, n, M1, M2) == doctest::Approx(brute).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("CSV exports") {
    const TorusSpec spec(1.0, 8, 1);
    CounterRng rng(3);
    const SpaceTimeField F = dyadic_packet(spec, 1, 2, 5, rng);
    const auto dir = std::filesystem::temp_directory_path();
    write_region_map(F, dir / "kawahara_regions.csv");
    write_ratio_ensemble({{0, 11, 0.5}, {1, 12, 0.25}}, dir / "kawahara_ensemble.csv");
    std::ifstream a(dir / "kawahara_regions.csv"), b(dir / "kawahara_ensemble.csv");
    std::string ha, hb, row;
    std::getline(a, ha);
    std::getline(b, hb);
    CHECK(ha == "m,n,region");
    CHECK(hb == "trial,seed,ratio");
    std::getline(b, row);
    CHECK(row == "0,11,0.5");
  }

  TEST_CASE("dyadic packets stay in their blocks") {
    const TorusSpec spec(1.0, 32, 1);
    CounterRng rng(8);
    const SpaceTimeField F = dyadic_packet(spec, 3, 4, 50, rng);
    for (int n = -32; n <= 32; ++n) {
      if (n == 0) continue;
      for (const auto& e : F.column(n)) {
        CHECK(std::abs(n) >= 8);
        CHECK(std::abs(n) < 16);
        const double mod = std::abs(F.modulation(n, e.m)) / F.bin_measure();
        CHECK(mod >= 15.0 - 1e-9);
        CHECK(mod <= 30.0 + 1e-9);
      }
    }
    CHECK_THROWS_AS(dyadic_packet(spec, 6, 0, 1, rng), std::invalid_argument);
  }
}
