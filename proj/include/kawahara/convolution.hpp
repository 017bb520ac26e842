#pragma once

#include <vector>

#include <unsupported/Eigen/FFT>

#include "kawahara/types.hpp"

namespace kawahara {

/// Zero-padded transform workspace for exact truncated convolution of
/// coefficient arrays indexed by n in [-K, K]. Owns its FFT plans; one per
/// caller, never shared between threads.
class Convolver {
public:
  explicit Convolver(int K);

  int K() const { return K_; }
  int transform_length() const { return length_; }

  /// (a * b)_n = sum_{n1 + n2 = n} a_{n1} b_{n2} for |n| <= K, zero mode dropped.
  void product(const CoeffArray& a, const CoeffArray& b, CoeffArray& out);
  void square(const CoeffArray& a, CoeffArray& out);

private:
  void to_physical(const CoeffArray& c, std::vector<Complex>& phys);
  void to_coefficients(CoeffArray& out);

  int K_;
  int length_;
  Eigen::FFT<double> fft_;
  std::vector<Complex> spec_buf_;
  std::vector<Complex> phys_a_;
  std::vector<Complex> phys_b_;
};

}  // namespace kawahara
