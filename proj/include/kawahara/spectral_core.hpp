#pragma once

#include <cmath>
#include <functional>
#include <numbers>

#include "kawahara/types.hpp"

namespace kawahara {

/// Dispersion symbol p_lambda(k) = k^5 + beta lambda^-2 k^3.
template <typename Scalar>
Scalar dispersion(Scalar k, int beta, Scalar lambda) {
  const Scalar k2 = k * k;
  const Scalar k3 = k2 * k;
  return k3 * k2 + static_cast<Scalar>(beta) * k3 / (lambda * lambda);
}

inline double dispersion(const TorusSpec& spec, double k) {
  return dispersion<double>(k, spec.beta, spec.lambda);
}

/// Dispersion at index n, computed as (n^5 + beta n^3) / lambda^5 so that
/// integer lattices stay exact in the numerator.
inline double dispersion_at_index(const TorusSpec& spec, int n) {
  const double nd = n;
  const double num = nd * nd * nd * (nd * nd + spec.beta);
  return num / std::pow(spec.lambda, 5);
}

/// Mean-zero field on T_lambda stored as series coefficients c_n with
/// u(x) = sum_n c_n exp(i n x / lambda), 1 <= |n| <= K. The n = 0 slot is
/// kept at zero.
class SpectralField {
public:
  SpectralField() = default;
  explicit SpectralField(const TorusSpec& spec, bool is_real = true);
  SpectralField(const TorusSpec& spec, CoeffArray coeffs, bool is_real);

  const TorusSpec& spec() const { return spec_; }
  int K() const { return spec_.K; }
  bool is_real() const { return is_real_; }

  Complex coeff(int n) const { return coeffs_(n + spec_.K); }
  /// Sets c_n; for real fields c_{-n} is set to conj(c_n) as well.
  void set_coeff(int n, Complex c);

  const CoeffArray& coeffs() const { return coeffs_; }

  /// Continuous-normalized transform value u_hat(k) = sqrt(2 pi) lambda c_n.
  Complex transform(int n) const { return std::sqrt(2.0 * std::numbers::pi) * spec_.lambda * coeff(n); }

  /// Largest deviation from c_{-n} = conj(c_n).
  double reality_defect() const;

  /// Physical-space samples u(x_j), x_j = 2 pi lambda j / points.
  Eigen::ArrayXcd sample(int points) const;

private:
  TorusSpec spec_{};
  CoeffArray coeffs_;
  bool is_real_ = true;
};

/// ||u||_{H^s(T_lambda)} with the lattice weight 1/lambda.
double sobolev_norm(const SpectralField& u, double s);

/// Homogeneous ||u||_{\dot H^s(T_lambda)}, weight |k|^{2s}.
double homogeneous_sobolev_norm(const SpectralField& u, double s);

/// Squared L^2(T_lambda) norm, 2 pi lambda sum |c_n|^2.
double l2_norm_squared(const SpectralField& u);

/// Frequency-domain weight w(k). Reality is preserved when w is even-real
/// or odd-imaginary; the caller states which via `preserves_reality`.
struct FourierMultiplier {
  std::function<Complex(double)> symbol;
  bool preserves_reality = false;
};

SpectralField apply_multiplier(const SpectralField& u, const FourierMultiplier& w);

FourierMultiplier derivative_multiplier();
FourierMultiplier bessel_multiplier(double sigma);

enum class IVariant { kink, smooth };

/// I-method weight m(xi): 1 below N, (|xi|/N)^s above 2N.
class IMultiplier {
public:
  IMultiplier(double s, double N, IVariant variant = IVariant::kink);

  double s() const { return s_; }
  double N() const { return N_; }
  IVariant variant() const { return variant_; }

  double operator()(double xi) const;

  FourierMultiplier as_multiplier() const;

private:
  double s_;
  double N_;
  IVariant variant_;
};

inline double i_multiplier_value(const IMultiplier& im, double xi) { return im(xi); }

/// u_{0,lambda}(x) = lambda^-4 u0(x / lambda): index n is preserved and its
/// frequency becomes n / lambda_new.
SpectralField rescale_data(const SpectralField& u0, double lambda_new);

/// Exact truncated autoconvolution (u v)_n for |n| <= K via a zero-padded
/// transform; the zero mode is dropped.
CoeffArray truncated_product(const CoeffArray& a, const CoeffArray& b, int K);

}  // namespace kawahara
