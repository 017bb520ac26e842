#include "kawahara/spectral_core.hpp"

#include <algorithm>
#include <bit>

#include "kawahara/convolution.hpp"

namespace kawahara {

// ---------------------------------------------------------------------------
// SpectralField

SpectralField::SpectralField(const TorusSpec& spec, bool is_real)
    : spec_(spec), coeffs_(CoeffArray::Zero(spec.slots())), is_real_(is_real) {
  spec_.validate();
}

SpectralField::SpectralField(const TorusSpec& spec, CoeffArray coeffs, bool is_real)
    : spec_(spec), coeffs_(std::move(coeffs)), is_real_(is_real) {
  spec_.validate();
  if (coeffs_.size() != spec_.slots())
    throw std::invalid_argument("SpectralField: coefficient array has wrong length");
  if (!coeffs_.isFinite().all()) throw std::invalid_argument("SpectralField: non-finite coefficient");
  coeffs_(spec_.K) = 0.0;
}

void SpectralField::set_coeff(int n, Complex c) {
  if (n == 0) throw std::invalid_argument("SpectralField: the zero mode is not stored");
  if (std::abs(n) > spec_.K) throw std::out_of_range("SpectralField: index outside truncation");
  coeffs_(n + spec_.K) = c;
  if (is_real_) coeffs_(-n + spec_.K) = std::conj(c);
}

double SpectralField::reality_defect() const {
  double defect = 0.0;
  for (int n = 1; n <= spec_.K; ++n)
    defect = std::max(defect, std::abs(coeff(-n) - std::conj(coeff(n))));
  return defect;
}

Eigen::ArrayXcd SpectralField::sample(int points) const {
  Eigen::ArrayXcd out = Eigen::ArrayXcd::Zero(points);
  for (int j = 0; j < points; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / points;  // x / lambda
    Complex acc = 0.0;
    for (int n = -spec_.K; n <= spec_.K; ++n) {
      if (n == 0) continue;
      acc += coeff(n) * std::polar(1.0, n * theta);
    }
    out(j) = acc;
  }
  return out;
}

double l2_norm_squared(const SpectralField& u) {
  return 2.0 * std::numbers::pi * u.spec().lambda * u.coeffs().abs2().sum();
}

double sobolev_norm(const SpectralField& u, double s) {
  const auto& spec = u.spec();
  const double lambda = spec.lambda;
  double acc = 0.0;
  for (int n = -spec.K; n <= spec.K; ++n) {
    if (n == 0) continue;
    const double k = spec.frequency(n);
    acc += std::pow(japanese(k), 2.0 * s) * std::norm(u.transform(n));
  }
  return std::sqrt(acc / lambda);
}

double homogeneous_sobolev_norm(const SpectralField& u, double s) {
  const auto& spec = u.spec();
  double acc = 0.0;
  for (int n = -spec.K; n <= spec.K; ++n) {
    if (n == 0) continue;
    acc += std::pow(std::abs(spec.frequency(n)), 2.0 * s) * std::norm(u.transform(n));
  }
  return std::sqrt(acc / spec.lambda);
}

// ---------------------------------------------------------------------------
// Multipliers

SpectralField apply_multiplier(const SpectralField& u, const FourierMultiplier& w) {
  const auto& spec = u.spec();
  CoeffArray out(spec.slots());
  for (int n = -spec.K; n <= spec.K; ++n) {
    if (n == 0) {
      out(spec.K) = 0.0;
      continue;
    }
    const Complex wk = w.symbol(spec.frequency(n));
    if (!std::isfinite(wk.real()) || !std::isfinite(wk.imag()))
      throw std::invalid_argument("apply_multiplier: non-finite multiplier value");
    out(n + spec.K) = wk * u.coeff(n);
  }
  return SpectralField(spec, std::move(out), u.is_real() && w.preserves_reality);
}

FourierMultiplier derivative_multiplier() {
  return {[](double k) { return Complex(0.0, k); }, true};
}

FourierMultiplier bessel_multiplier(double sigma) {
  return {[sigma](double k) { return Complex(std::pow(japanese(k), sigma), 0.0); }, true};
}

IMultiplier::IMultiplier(double s, double N, IVariant variant) : s_(s), N_(N), variant_(variant) {
  if (!(s < 0.0)) throw std::invalid_argument("IMultiplier: s must be negative");
  if (!(N >= 1.0)) throw std::invalid_argument("IMultiplier: N must be >= 1");
}

double IMultiplier::operator()(double xi) const {
  const double a = std::abs(xi);
  if (a <= N_) return 1.0;
  if (variant_ == IVariant::kink || a >= 2.0 * N_) return std::pow(a / N_, s_);
  // Cubic Hermite on [N, 2N]: value 1 and slope 0 at N, matching (|xi|/N)^s
  // and its slope at 2N. Monotone for every s < 0.
  const double h = N_;
  const double t = (a - N_) / h;
  const double y1 = std::pow(2.0, s_);
  const double d1 = s_ * std::pow(2.0, s_ - 1.0) / N_ * h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 + h01 * y1 + h11 * d1;
}

FourierMultiplier IMultiplier::as_multiplier() const {
  IMultiplier copy = *this;
  return {[copy](double k) { return Complex(copy(k), 0.0); }, true};
}

// ---------------------------------------------------------------------------
// Rescaling

SpectralField rescale_data(const SpectralField& u0, double lambda_new) {
  if (u0.spec().lambda != 1.0) throw std::invalid_argument("rescale_data: input must live on lambda = 1");
  if (!(lambda_new >= 1.0) || !std::isfinite(lambda_new))
    throw std::invalid_argument("rescale_data: lambda_new must be >= 1");
  TorusSpec spec = u0.spec();
  spec.lambda = lambda_new;
  const double scale = std::pow(lambda_new, -4.0);
  return SpectralField(spec, u0.coeffs() * scale, u0.is_real());
}

// ---------------------------------------------------------------------------
// Convolution

Convolver::Convolver(int K) : K_(K) {
  if (K < 1) throw std::invalid_argument("Convolver: K must be >= 1");
  length_ = static_cast<int>(std::bit_ceil(static_cast<unsigned>(4 * K + 2)));
  spec_buf_.assign(length_, 0.0);
  phys_a_.assign(length_, 0.0);
  phys_b_.assign(length_, 0.0);
}

void Convolver::to_physical(const CoeffArray& c, std::vector<Complex>& phys) {
  std::fill(spec_buf_.begin(), spec_buf_.end(), Complex(0.0));
  for (int n = -K_; n <= K_; ++n) spec_buf_[(n + length_) % length_] = c(n + K_);
  fft_.inv(phys, spec_buf_);
  const double L = length_;
  for (auto& v : phys) v *= L;
}

void Convolver::to_coefficients(CoeffArray& out) {
  fft_.fwd(spec_buf_, phys_a_);
  out.resize(2 * K_ + 1);
  const double inv_L = 1.0 / length_;
  for (int n = -K_; n <= K_; ++n) out(n + K_) = spec_buf_[(n + length_) % length_] * inv_L;
  out(K_) = 0.0;
}

void Convolver::product(const CoeffArray& a, const CoeffArray& b, CoeffArray& out) {
  to_physical(a, phys_a_);
  to_physical(b, phys_b_);
  for (int j = 0; j < length_; ++j) phys_a_[j] *= phys_b_[j];
  to_coefficients(out);
}

void Convolver::square(const CoeffArray& a, CoeffArray& out) {
  to_physical(a, phys_a_);
  for (auto& v : phys_a_) v *= v;
  to_coefficients(out);
}

CoeffArray truncated_product(const CoeffArray& a, const CoeffArray& b, int K) {
  Convolver conv(K);
  CoeffArray out;
  conv.product(a, b, out);
  return out;
}

}  // namespace kawahara
