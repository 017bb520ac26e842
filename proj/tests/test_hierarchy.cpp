#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "kawahara/hierarchy.hpp"
#include "kawahara/rng.hpp"

using namespace kawahara;

namespace {

SpectralField random_real(const TorusSpec& spec, std::uint64_t seed, int modes, double decay = 1.0) {
  CounterRng rng(seed);
  SpectralField u(spec, true);
  for (int n = 1; n <= modes; ++n)
    u.set_coeff(n, std::pow(1.0 + n, -decay) * Complex(rng.normal(), rng.normal()));
  return u;
}

// Unsymmetrized multipliers exactly as the recursive definitions read.
Multiplier raw_m3(const HierarchyContext& ctx) {
  return [&ctx](const FreqTuple& t) {
    const int p = t[1] + t[2];
    return Complex(0.0, -2.0) * ctx.m(t[0]) * ctx.m(p) * ctx.k(p);
  };
}

Multiplier raw_m4(const HierarchyContext& ctx) {
  return [&ctx](const FreqTuple& t) -> Complex {
    const int p = t[2] + t[3];
    if (!ctx.pair_sum_allowed(p)) return 0.0;
    return Complex(0.0, -3.0) * sigma3(ctx, t[0], t[1], p) * ctx.k(p);
  };
}

Multiplier raw_m5(const HierarchyContext& ctx) {
  return [&ctx](const FreqTuple& t) -> Complex {
    const int p = t[3] + t[4];
    if (!ctx.pair_sum_allowed(p)) return 0.0;
    return Complex(0.0, -4.0) * sigma4(ctx, FreqTuple{t[0], t[1], t[2], p}) * ctx.k(p);
  };
}

FreqTuple random_tuple(CounterRng& rng, int arity, int K) {
  for (;;) {
    FreqTuple t;
    t.size = arity;
    int sum = 0;
    for (int i = 0; i + 1 < arity; ++i) {
      t[i] = static_cast<int>(rng.uniform_int(-K, K));
      sum += t[i];
    }
    t[arity - 1] = -sum;
    if (std::abs(sum) <= K && t.admissible()) return t;
  }
}

Trajectory short_run(const SpectralField& u0, double dt, int samples) {
  EvolutionParams p;
  p.spec = u0.spec();
  p.dt = dt;
  p.T = dt * (samples - 1);
  p.scheme = Scheme::if_gl4;
  return integrate(u0, p);
}

}  // namespace

TEST_SUITE("hierarchy") {
  TEST_CASE("frequency tuples") {
    CHECK(FreqTuple{1, 2, -3}.admissible());
    CHECK_FALSE(FreqTuple{1, 2, -2}.admissible());
    CHECK_FALSE(FreqTuple{0, 2, -2}.admissible());
    CHECK(FreqTuple{1, 2, 3, 4, 5}.sum() == 15);
    CHECK_THROWS_AS((FreqTuple{1, 2, 3, 4, 5, 6}), std::invalid_argument);
  }

  TEST_CASE("symmetrization averages over permutations") {
    const Multiplier first = [](const FreqTuple& t) { return Complex(t[0], 0.0); };
    CHECK(symmetrized_value(first, FreqTuple{3, -1, -2}).real() == doctest::Approx(0.0));
    CHECK(symmetrized_value(first, FreqTuple{1, 2, 3, -6}).real() == doctest::Approx(0.0));
    const Multiplier sq = [](const FreqTuple& t) { return Complex(t[0] * t[0], 0.0); };
    CHECK(symmetrize(sq)(FreqTuple{1, 2, -3}).real() == doctest::Approx(14.0 / 3.0));
  }

  TEST_CASE("divisor factorization on the hyperplane") {
    for (int beta : {-1, 0, 1}) {
      const HierarchyContext ctx(IMultiplier(-1.0, 2.0), TorusSpec(1.0, 20, beta));
      CounterRng rng(42 + beta);
      for (int trial = 0; trial < 200; ++trial) {
        const FreqTuple t3 = random_tuple(rng, 3, 20);
        const long long P3 = 1LL * t3[0] * t3[1] * t3[2];
        const long long S3 = 1LL * t3[0] * t3[0] + 1LL * t3[1] * t3[1] + 1LL * t3[2] * t3[2];
        CHECK(2 * ctx.divisor_numerator(t3) == 5 * P3 * S3 + 6 * beta * P3);

        const FreqTuple t4 = random_tuple(rng, 4, 20);
        const long long P4 = 1LL * (t4[0] + t4[1]) * (t4[0] + t4[2]) * (t4[1] + t4[2]);
        long long S4 = 0;
        for (int i = 0; i < 4; ++i) S4 += 1LL * t4[i] * t4[i];
        CHECK(2 * ctx.divisor_numerator(t4) == -(5 * P4 * S4 + 6 * beta * P4));
      }
    }
    // lambda > 1 scales the divisor by lambda^-5.
    const HierarchyContext wide(IMultiplier(-1.0, 2.0), TorusSpec(2.0, 8, 1));
    CHECK(wide.divisor(FreqTuple{1, 2, -3}) == doctest::Approx(wide.divisor_numerator(FreqTuple{1, 2, -3}) / 32.0));
  }

  TEST_CASE("split forms equal the generic symmetrization") {
    for (double lambda : {1.0, 2.0}) {
      for (bool truncate : {true, false}) {
        const HierarchyContext ctx(IMultiplier(-1.2, 2.0, IVariant::smooth), TorusSpec(lambda, 10, -1), 1e-9, truncate);
        const Multiplier s3 = symmetrize(raw_m3(ctx));
        const Multiplier s4 = symmetrize(raw_m4(ctx));
        const Multiplier s5 = symmetrize(raw_m5(ctx));
        CounterRng rng(7);
        for (int trial = 0; trial < 60; ++trial) {
          const FreqTuple a = random_tuple(rng, 3, 10);
          CHECK(std::abs(m3(ctx, a) - s3(a)) <= 1e-12 * (1.0 + std::abs(s3(a))));
          const FreqTuple b = random_tuple(rng, 4, 10);
          CHECK(std::abs(m4(ctx, b) - s4(b)) <= 1e-12 * (1.0 + std::abs(s4(b))));
          if (trial < 15) {
            const FreqTuple c = random_tuple(rng, 5, 10);
            CHECK(std::abs(m5(ctx, c) - s5(c)) <= 1e-12 * (1.0 + std::abs(s5(c))));
          }
        }
      }
    }
  }

  TEST_CASE("M3 closed form and sigma3") {
    const HierarchyContext ctx(IMultiplier(-1.0, 2.0), TorusSpec(1.0, 16, 1));
    // (2i/3) sum m(k_j)^2 k_j on the hyperplane.
    const int n[3] = {5, -2, -3};
    double acc = 0.0;
    for (int v : n) acc += ctx.m(v) * ctx.m(v) * v;
    CHECK(std::abs(m3(ctx, 5, -2, -3) - Complex(0.0, 2.0 * acc / 3.0)) < 1e-14);
    CHECK(std::abs(m3(ctx, 1, 1, -2)) < 1e-15);  // below N: m = 1, sum k = 0
    const Complex s = sigma3(ctx, 5, -2, -3);
    CHECK(std::abs(s * Complex(0.0, ctx.divisor(FreqTuple{5, -2, -3})) + m3(ctx, 5, -2, -3)) < 1e-14);
    CHECK(ctx.log().size() == 0);
  }

  TEST_CASE("sigma4 resonances are removable and logged") {
    const HierarchyContext ctx(IMultiplier(-1.0, 2.0), TorusSpec(1.0, 12, 1), 1e-9, false);
    const FreqTuple t{3, -3, 5, -5};
    CHECK(ctx.divisor(t) == 0.0);
    CHECK(std::abs(m4(ctx, t)) < 1e-12);
    CHECK(sigma4(ctx, t) == Complex(0.0));
    CHECK(sigma4(ctx, FreqTuple{-3, 3, -5, 5}) == Complex(0.0));
    const auto entries = ctx.log().entries();
    REQUIRE(entries.size() == 1);  // permutations of one tuple collapse
    CHECK(entries[0].reason == "resonant_removable");

    const auto path = std::filesystem::temp_directory_path() / "kawahara_exclusions.csv";
    ctx.log().write_csv(path.string(), 1.0);
    std::ifstream in(path);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "k1,k2,k3,k4,reason");
    CHECK(row == "-5,-3,3,5,resonant_removable");
  }

  TEST_CASE("Lambda_l by grid, by generic loops, and E2 = ||Iu||^2") {
    const TorusSpec spec(1.0, 6, 1);
    const HierarchyContext ctx(IMultiplier(-1.0, 2.0), spec);
    const SpectralField u = random_real(spec, 3, 6);
    for (int arity = 3; arity <= 5; ++arity) {
      Multiplier M;
      if (arity == 3) M = [&](const FreqTuple& t) { return sigma3(ctx, t); };
      if (arity == 4) M = [&](const FreqTuple& t) { return sigma4(ctx, t); };
      if (arity == 5) M = [&](const FreqTuple& t) { return m5(ctx, t); };
      const MultiplierGrid grid(arity, spec.K, M);
      const Complex a = lambda_l(grid, u);
      const Complex b = lambda_l(M, u, arity);
      const SpectralField* fields[5] = {&u, &u, &u, &u, &u};
      const Complex c = lambda_l(M, std::span<const SpectralField* const>(fields, arity));
      CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(b)));
      CHECK(std::abs(c - b) <= 1e-12 * (1.0 + std::abs(b)));
    }
    const IMultiplier im(-1.0, 2.0);
    const double Iu2 = l2_norm_squared(apply_multiplier(u, im.as_multiplier()));
    CHECK(energy(ctx, u, 2) == doctest::Approx(Iu2).epsilon(1e-13));
    SpectralField complex_u(spec, u.coeffs(), false);
    CHECK_THROWS_AS(energy(ctx, complex_u, 2), std::invalid_argument);
  }

  TEST_CASE("M3 vanishes below N and E3 = E2") {
    const TorusSpec spec(1.0, 16, 1);
    const HierarchyContext ctx(IMultiplier(-1.0, 16.0), spec);
    const SpectralField u = random_real(spec, 9, 16);
    CHECK(std::abs(EnergyEvaluator(ctx, 2, true).energy_rate(u, 2)) < 1e-12);
    const EnergyEvaluator ev(ctx, 3, false);
    CHECK(ev.energy(u, 3) == ev.energy(u, 2));
  }

  TEST_CASE("telescoping identities along a trajectory") {
    const TorusSpec spec(1.0, 8, 1);
    const SpectralField u0 = random_real(spec, 21, 3, 0.5);
    const Trajectory traj = short_run(u0, 2e-5, 9);
    const HierarchyContext ctx(IMultiplier(-1.0, 2.0), spec);
    for (int level = 2; level <= 4; ++level) {
      const DerivativeCheckReport r = energy_derivative_check(ctx, traj, level);
      CAPTURE(level);
      CHECK_FALSE(r.skipped);
      CHECK(r.rows.size() == 5);
      CHECK(r.scale > 0.0);
      CHECK(r.max_mismatch < 1e-4);
    }
  }

  TEST_CASE("derivative check guards") {
    const TorusSpec spec(1.0, 8, 1);
    const HierarchyContext ctx(IMultiplier(-1.0, 2.0), spec);
    SpectralField u0 = random_real(spec, 2, 3);
    EvolutionParams p;
    p.spec = spec;
    p.dt = 1e-3;
    p.T = 6e-3;
    p.nonlinear = false;
    const Trajectory lin = integrate(u0, p);
    CHECK(energy_derivative_check(ctx, lin, 2).skipped);
    CHECK_THROWS_AS(energy_derivative_check(ctx, lin, 5), std::invalid_argument);

    const HierarchyContext big(IMultiplier(-1.0, 2.0), TorusSpec(1.0, 17, 1));
    p.spec = TorusSpec(1.0, 17, 1);
    const Trajectory t17 = integrate(SpectralField(p.spec, true), p);
    CHECK_THROWS_AS(energy_derivative_check(big, t17, 4), std::invalid_argument);

    p.spec = spec;
    p.T = 3e-3;
    CHECK_THROWS_AS(energy_derivative_check(ctx, integrate(u0, p), 2), std::invalid_argument);

    const DerivativeCheckReport r = energy_derivative_check(ctx, short_run(u0, 1e-4, 7), 3);
    const auto path = std::filesystem::temp_directory_path() / "kawahara_hierarchy.csv";
    r.write_csv(path.string());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,E2,E3,E4,lhs_rhs_mismatch");
  }

  TEST_CASE("M4 decay profile") {
    for (IVariant var : {IVariant::kink, IVariant::smooth}) {
      const HierarchyContext ctx(IMultiplier(-1.0, 4.0, var), TorusSpec(1.0, 64, 1), 1e-9, false);
      CHECK(std::isnan(m4_bound_ratio(ctx, FreqTuple{3, -3, 5, -5})));
      const double r = m4_bound_ratio(ctx, FreqTuple{7, 5, -6, -6});
      CHECK(std::isfinite(r));
      CHECK(r > 0.0);
      const M4BoundScan small = m4_bound_scan(ctx, 12), large = m4_bound_scan(ctx, 24);
      CHECK(small.tuples > 0);
      CHECK(small.resonant > 0);
      CHECK(large.resonant_residual < 1e-10);
      CHECK(std::isfinite(large.max_ratio));
      CHECK(large.max_ratio >= small.max_ratio);
      CHECK(large.max_ratio < 2.0 * small.max_ratio);
    }
    CHECK_THROWS_AS(m4_bound_ratio(HierarchyContext(IMultiplier(-1.0, 4.0), TorusSpec(1.0, 8, 1)), FreqTuple{1, 2, -3}),
                    std::invalid_argument);
  }
}
