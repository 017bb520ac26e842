#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace kawahara {

using Complex = std::complex<double>;
using CoeffArray = Eigen::ArrayXcd;

/// Raised when a numerical invariant is violated at run time (blow-up,
/// loss of reality, unexpected resonance). The name identifies the invariant.
class InvariantViolation : public std::runtime_error {
public:
  InvariantViolation(std::string invariant, const std::string& what)
      : std::runtime_error(invariant + ": " + what), invariant_(std::move(invariant)) {}

  const std::string& invariant() const noexcept { return invariant_; }

private:
  std::string invariant_;
};

/// Torus T_lambda = R / 2 pi lambda Z truncated to indices 1 <= |n| <= K.
/// Frequency of index n is k = n / lambda.
struct TorusSpec {
  double lambda = 1.0;
  int K = 1;
  int beta = 1;

  TorusSpec() = default;
  TorusSpec(double lambda_, int K_, int beta_) : lambda(lambda_), K(K_), beta(beta_) { validate(); }

  void validate() const {
    if (!(lambda >= 1.0) || !std::isfinite(lambda))
      throw std::invalid_argument("TorusSpec: lambda must be >= 1");
    if (K < 1) throw std::invalid_argument("TorusSpec: K must be >= 1");
    if (beta < -1 || beta > 1) throw std::invalid_argument("TorusSpec: beta must be -1, 0 or 1");
  }

  double frequency(int n) const { return static_cast<double>(n) / lambda; }
  /// Number of stored slots, including the (always empty) zero slot.
  int slots() const { return 2 * K + 1; }

  friend bool operator==(const TorusSpec&, const TorusSpec&) = default;
};

/// Japanese bracket <k> = (1 + k^2)^{1/2}.
template <typename Scalar>
Scalar japanese(Scalar k) {
  using std::sqrt;
  return sqrt(Scalar(1) + k * k);
}

}  // namespace kawahara
