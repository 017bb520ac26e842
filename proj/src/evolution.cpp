#include "kawahara/evolution.hpp"

#include <array>
#include <chrono>

#include "kawahara/convolution.hpp"

namespace kawahara {

namespace {

/// p_lambda(k_n) per slot, zero slot included.
Eigen::ArrayXd phase_speeds(const TorusSpec& spec) {
  Eigen::ArrayXd p(spec.slots());
  for (int n = -spec.K; n <= spec.K; ++n) p(n + spec.K) = n == 0 ? 0.0 : dispersion_at_index(spec, n);
  return p;
}

CoeffArray phase_factor(const Eigen::ArrayXd& p, double t) {
  CoeffArray e(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) e(i) = std::polar(1.0, p(i) * t);
  return e;
}

Eigen::ArrayXd wavenumbers(const TorusSpec& spec) {
  Eigen::ArrayXd k(spec.slots());
  for (int n = -spec.K; n <= spec.K; ++n) k(n + spec.K) = spec.frequency(n);
  return k;
}

/// Right-hand side of the quadratic part: -i k (u^2)_n.
class QuadraticRhs {
public:
  QuadraticRhs(const TorusSpec& spec, bool enabled)
      : conv_(spec.K), ik_(wavenumbers(spec).cast<Complex>() * Complex(0.0, 1.0)), enabled_(enabled) {}

  void operator()(const CoeffArray& u, CoeffArray& out) {
    if (!enabled_) {
      out = CoeffArray::Zero(u.size());
      return;
    }
    conv_.square(u, sq_);
    out = -ik_ * sq_;
  }

private:
  Convolver conv_;
  CoeffArray ik_;
  CoeffArray sq_;
  bool enabled_;
};

/// Phi-function weights for ETDRK4 via a mean over a full unit circle around
/// each z = L h (L is imaginary, so the half-contour trick does not apply).
struct EtdWeights {
  CoeffArray E, E2, Q, f1, f2, f3;
};

EtdWeights etd_weights(const Eigen::ArrayXd& p, double h) {
  constexpr int contour_points = 32;
  const Eigen::Index n = p.size();
  EtdWeights w;
  w.E = phase_factor(p, h);
  w.E2 = phase_factor(p, h / 2);
  w.Q = w.f1 = w.f2 = w.f3 = CoeffArray::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex lh(0.0, p(i) * h);
    Complex q = 0.0, a = 0.0, b = 0.0, c = 0.0;
    for (int j = 0; j < contour_points; ++j) {
      const Complex r = std::polar(1.0, 2.0 * std::numbers::pi * (j + 0.5) / contour_points);
      const Complex z = lh + r;
      const Complex ez = std::exp(z);
      const Complex z3 = z * z * z;
      q += (std::exp(z / 2.0) - 1.0) / z;
      a += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
      b += (2.0 + z + ez * (z - 2.0)) / z3;
      c += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
    }
    w.Q(i) = h * q / double(contour_points);
    w.f1(i) = h * a / double(contour_points);
    w.f2(i) = h * b / double(contour_points);
    w.f3(i) = h * c / double(contour_points);
  }
  return w;
}

/// Two-stage Gauss-Legendre in the interaction picture v = exp(-L t) u,
/// solved by fixed-point iteration on the stage slopes.
class GaussLegendre {
public:
  GaussLegendre(const Eigen::ArrayXd& p, double h) : h_(h) {
    const double r = std::sqrt(3.0) / 6.0;
    c_ = {0.5 - r, 0.5 + r};
    a_ = {{{0.25, 0.25 - r}, {0.25 + r, 0.25}}};
    for (int i = 0; i < 2; ++i) {
      fwd_[i] = phase_factor(p, c_[i] * h);
      back_[i] = phase_factor(p, -c_[i] * h);
    }
    E_ = phase_factor(p, h);
  }

  template <typename Rhs>
  void step(CoeffArray& u, Rhs& rhs) {
    constexpr int max_iterations = 200;
    for (int i = 0; i < 2; ++i) {
      rhs(CoeffArray(fwd_[i] * u), tmp_);
      G_[i] = back_[i] * tmp_;
    }
    const double scale = 1.0 + u.abs().maxCoeff();
    for (int it = 0;; ++it) {
      double change = 0.0;
      for (int i = 0; i < 2; ++i) {
        const CoeffArray V = u + h_ * (a_[i][0] * G_[0] + a_[i][1] * G_[1]);
        rhs(CoeffArray(fwd_[i] * V), tmp_);
        const CoeffArray G = back_[i] * tmp_;
        change = std::max(change, h_ * (G - G_[i]).abs().maxCoeff());
        G_[i] = G;
      }
      if (change <= 1e-15 * scale) break;
      if (it == max_iterations)
        throw InvariantViolation("implicit_solve", "Gauss-Legendre fixed point did not converge; reduce dt");
    }
    u = E_ * (u + 0.5 * h_ * (G_[0] + G_[1]));
  }

private:
  double h_;
  std::array<double, 2> c_;
  std::array<std::array<double, 2>, 2> a_;
  std::array<CoeffArray, 2> fwd_, back_, G_;
  CoeffArray E_, tmp_;
};

}  // namespace

void EvolutionParams::validate() const {
  spec.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("EvolutionParams: dt must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("EvolutionParams: T must be positive");
  if (dt > T * (1.0 + 1e-12)) throw std::invalid_argument("EvolutionParams: dt must not exceed T");
  if (record_every < 1) throw std::invalid_argument("EvolutionParams: record_every must be >= 1");
  if (!(blowup_factor > 1.0)) throw std::invalid_argument("EvolutionParams: blowup_factor must exceed 1");
}

long EvolutionParams::steps() const {
  return std::max(1L, static_cast<long>(std::llround(std::ceil(T / dt - 1e-9))));
}

SpectralField semigroup(const SpectralField& u, double t) {
  const CoeffArray e = phase_factor(phase_speeds(u.spec()), t);
  return SpectralField(u.spec(), u.coeffs() * e, u.is_real());
}

SpectralField nonlinear_term(const SpectralField& u) {
  QuadraticRhs rhs(u.spec(), true);
  CoeffArray out;
  rhs(u.coeffs(), out);
  return SpectralField(u.spec(), std::move(out), u.is_real());
}

Trajectory integrate(const SpectralField& u0, const EvolutionParams& params) {
  params.validate();
  if (!(u0.spec() == params.spec)) throw std::invalid_argument("integrate: field and params disagree on TorusSpec");
  const auto start = std::chrono::steady_clock::now();

  const long steps = params.steps();
  const double h = params.T / steps;
  const Eigen::ArrayXd p = phase_speeds(params.spec);
  QuadraticRhs rhs(params.spec, params.nonlinear);

  const double norm0 = std::sqrt(l2_norm_squared(u0));
  const double ceiling = params.blowup_factor * norm0;

  Trajectory traj;
  traj.params = params;
  traj.times.push_back(0.0);
  traj.states.push_back(u0);

  CoeffArray u = u0.coeffs();
  CoeffArray a, b, c, d, tmp;

  const CoeffArray E = phase_factor(p, h);
  const CoeffArray E2 = phase_factor(p, h / 2);
  EtdWeights etd;
  if (params.scheme == Scheme::etd_rk4) etd = etd_weights(p, h);
  GaussLegendre gl(p, h);

  for (long step = 1; step <= steps; ++step) {
    if (params.scheme == Scheme::if_rk4) {
      rhs(u, a);
      tmp = E2 * (u + 0.5 * h * a);
      rhs(tmp, b);
      tmp = E2 * u + 0.5 * h * b;
      rhs(tmp, c);
      tmp = E * u + h * E2 * c;
      rhs(tmp, d);
      u = E * u + (h / 6.0) * (E * a + 2.0 * E2 * (b + c) + d);
    } else if (params.scheme == Scheme::if_gl4) {
      gl.step(u, rhs);
    } else {
      CoeffArray Nu, Na, Nb, Nc;
      rhs(u, Nu);
      a = etd.E2 * u + etd.Q * Nu;
      rhs(a, Na);
      b = etd.E2 * u + etd.Q * Na;
      rhs(b, Nb);
      c = etd.E2 * a + etd.Q * (2.0 * Nb - Nu);
      rhs(c, Nc);
      u = etd.E * u + etd.f1 * Nu + 2.0 * etd.f2 * (Na + Nb) + etd.f3 * Nc;
    }
    u(params.spec.K) = 0.0;

    if (!u.isFinite().all()) throw InvariantViolation("finite_state", "non-finite coefficients during integration");
    const double norm = std::sqrt(2.0 * std::numbers::pi * params.spec.lambda * u.abs2().sum());
    if (norm0 > 0.0 && norm > ceiling)
      throw InvariantViolation("blowup_guard", "L2 norm exceeded blowup_factor times its initial value");

    if (step % params.record_every == 0 || step == steps) {
      traj.times.push_back(step * h);
      traj.states.emplace_back(params.spec, u, u0.is_real());
    }
  }
  traj.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return traj;
}

// ---------------------------------------------------------------------------
// Picard terms

namespace {

class DuhamelIntegrand {
public:
  explicit DuhamelIntegrand(const SpectralField& u0)
      : spec_(u0.spec()),
        conv_(spec_.K),
        p_(phase_speeds(spec_)),
        ik_(wavenumbers(spec_).cast<Complex>() * Complex(0.0, 1.0)),
        u0_(u0.coeffs()) {}

  CoeffArray linear(double s) const { return u0_ * phase_factor(p_, s); }
  CoeffArray propagate(const CoeffArray& v, double s) const { return v * phase_factor(p_, s); }

  /// d_x(a b) on the truncated lattice.
  CoeffArray dx_product(const CoeffArray& a, const CoeffArray& b) {
    CoeffArray out;
    conv_.product(a, b, out);
    return ik_ * out;
  }

private:
  TorusSpec spec_;
  Convolver conv_;
  Eigen::ArrayXd p_;
  CoeffArray ik_;
  CoeffArray u0_;
};

}  // namespace

SpectralField picard_term(const SpectralField& u0, int order, double t, int quad_steps) {
  if (u0.spec().lambda != 1.0) throw std::invalid_argument("picard_term: requires lambda = 1");
  if (order < 1 || order > 3) throw std::invalid_argument("picard_term: order must be 1, 2 or 3");
  if (quad_steps < 16 || quad_steps % 2 != 0)
    throw std::invalid_argument("picard_term: quad_steps must be even and >= 16");

  const auto& spec = u0.spec();
  if (order == 1) return semigroup(u0, t);

  DuhamelIntegrand f(u0);
  const int Q = quad_steps;

  if (order == 2) {
    const double h = t / Q;
    CoeffArray acc = CoeffArray::Zero(spec.slots());
    for (int j = 0; j <= Q; ++j) {
      const double s = j * h;
      const double w = (j == 0 || j == Q) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
      const CoeffArray u1 = f.linear(s);
      acc += w * f.propagate(f.dx_product(u1, u1), t - s);
    }
    return SpectralField(spec, acc * (h / 3.0), u0.is_real());
  }

  // Order 3: A_2 is carried along the outer nodes by Simpson panels of width
  // H (nodes spaced H / 2), so every node value is a composite Simpson sum.
  const double H = t / Q;
  auto g = [&](double s) {
    const CoeffArray u1 = f.linear(s);
    return f.dx_product(u1, u1);
  };
  CoeffArray a2 = CoeffArray::Zero(spec.slots());
  CoeffArray g_left = g(0.0);
  CoeffArray acc = CoeffArray::Zero(spec.slots());
  for (int j = 0; j <= Q; ++j) {
    const double s = j * H;
    if (j > 0) {
      const CoeffArray g_mid = g(s - H / 2);
      const CoeffArray g_right = g(s);
      a2 = f.propagate(a2, H) +
           (H / 6.0) * (f.propagate(g_left, H) + 4.0 * f.propagate(g_mid, H / 2) + g_right);
      g_left = g_right;
    }
    const double w = (j == 0 || j == Q) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    acc += w * f.propagate(f.dx_product(f.linear(s), a2), t - s);
  }
  return SpectralField(spec, acc * (2.0 * H / 3.0), u0.is_real());
}

}  // namespace kawahara
