#pragma once

#include <array>
#include <functional>
#include <initializer_list>
#include <memory>
#include <mutex>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "kawahara/evolution.hpp"
#include "kawahara/spectral_core.hpp"

namespace kawahara {

/// Zero-sum tuple of lattice indices (n_1, ..., n_l), l <= 5. Frequencies are
/// n_i / lambda; the zero-sum constraint is checked in integer arithmetic.
struct FreqTuple {
  static constexpr int max_arity = 5;
  std::array<int, max_arity> n{};
  int size = 0;

  FreqTuple() = default;
  FreqTuple(std::initializer_list<int> values);
  FreqTuple(std::span<const int> values);

  int operator[](int i) const { return n[i]; }
  int& operator[](int i) { return n[i]; }
  long long sum() const;
  bool admissible() const;  // zero-sum with no zero entry
};

/// l-multiplier on index tuples.
using Multiplier = std::function<Complex(const FreqTuple&)>;

/// [M]_sym: average of M over all permutations of its arguments.
Complex symmetrized_value(const Multiplier& M, const FreqTuple& t);
Multiplier symmetrize(Multiplier M);

/// Tuples whose resonance divisor vanished; written as CSV `k1,k2,k3[,k4],reason`.
/// Tuples are stored sorted and each (tuple, reason) pair is kept once.
class ExclusionLog {
public:
  struct Entry {
    FreqTuple tuple;
    std::string reason;
  };

  void record(const FreqTuple& t, std::string reason);
  std::vector<Entry> entries() const;
  std::size_t size() const;
  void write_csv(const std::string& path, double lambda) const;

private:
  mutable std::mutex mutex_;
  std::vector<Entry> entries_;
  std::set<std::string> seen_;
};

/// Evaluation context for the modified-energy hierarchy: the I-multiplier,
/// the torus, and the resonance guard.
///
/// With `truncate_pair_sums` set, every internal pair sum k_ij that stands
/// for a mode of the truncated nonlinearity is restricted to 0 < |n_ij| <= K.
/// That is the form in which the derivative identities are exact for the
/// Galerkin system integrated by `integrate`.
class HierarchyContext {
public:
  HierarchyContext(const IMultiplier& im, const TorusSpec& spec, double guard_eps = 1e-9,
                   bool truncate_pair_sums = true);

  const IMultiplier& im() const { return im_; }
  const TorusSpec& spec() const { return spec_; }
  double guard_eps() const { return guard_eps_; }
  bool truncate_pair_sums() const { return truncate_; }

  double k(int n) const { return n / spec_.lambda; }
  double m(int n) const;

  /// i * sum p_lambda(k_j) = a_l + lambda^-2 beta b_l, returned as the real
  /// factor multiplying i.
  double divisor(const FreqTuple& t) const;
  /// Integer numerator sum n^5 + beta sum n^3 of the divisor (times lambda^5).
  long long divisor_numerator(const FreqTuple& t) const;

  bool pair_sum_allowed(int n) const { return n != 0 && (!truncate_ || std::abs(n) <= spec_.K); }

  ExclusionLog& log() const { return log_; }

private:
  IMultiplier im_;
  TorusSpec spec_;
  double guard_eps_;
  bool truncate_;
  int table_range_;
  std::vector<double> m_table_;
  double inv_lambda5_;
  mutable ExclusionLog log_;
};

/// M_3 = -2i [m(k1) m(k23) k23]_sym.
Complex m3(const HierarchyContext& ctx, const FreqTuple& t);
/// sigma_3 = -M_3 / (a_3 + lambda^-2 beta b_3).
Complex sigma3(const HierarchyContext& ctx, const FreqTuple& t);
/// M_4 = -3i [sigma_3(k1, k2, k34) k34]_sym.
Complex m4(const HierarchyContext& ctx, const FreqTuple& t);
/// sigma_4 = -M_4 / (a_4 + lambda^-2 beta b_4); zero (and logged) on the
/// resonant set, where M_4 vanishes.
Complex sigma4(const HierarchyContext& ctx, const FreqTuple& t);
/// M_5 = -4i [sigma_4(k1, k2, k3, k45) k45]_sym.
Complex m5(const HierarchyContext& ctx, const FreqTuple& t);

Complex m3(const HierarchyContext& ctx, int n1, int n2, int n3);
Complex sigma3(const HierarchyContext& ctx, int n1, int n2, int n3);

/// Dense table of an l-multiplier over (n_1, ..., n_{l-1}) in [-K, K]^{l-1};
/// the closing index n_l = -sum is implied. Inadmissible slots hold zero.
class MultiplierGrid {
public:
  MultiplierGrid(int arity, int K, const Multiplier& M);

  int arity() const { return arity_; }
  int K() const { return K_; }
  Complex at(std::span<const int> leading) const;
  const std::vector<Complex>& values() const { return values_; }

private:
  int arity_;
  int K_;
  std::vector<Complex> values_;
};

/// Lambda_l(M; u_1, ..., u_l) = 2 pi lambda sum_{n_1+...+n_l=0} M(n) prod c_i(n_i).
Complex lambda_l(const Multiplier& M, std::span<const SpectralField* const> fields);
Complex lambda_l(const Multiplier& M, const SpectralField& u, int arity);
Complex lambda_l(const MultiplierGrid& grid, const SpectralField& u);

/// Precomputed multiplier tables for repeated energy evaluation along a
/// trajectory.
class EnergyEvaluator {
public:
  EnergyEvaluator(const HierarchyContext& ctx, int max_level, bool with_derivatives);

  /// E_I^(level)(u), level in {2, 3, 4}. Imaginary residue is checked and dropped.
  double energy(const SpectralField& u, int level) const;
  /// Lambda_{level+1}(M_{level+1})(u), the claimed dE^(level)/dt.
  Complex energy_rate(const SpectralField& u, int level) const;

private:
  const HierarchyContext& ctx_;
  int max_level_;
  std::unique_ptr<MultiplierGrid> sigma3_grid_;
  std::unique_ptr<MultiplierGrid> sigma4_grid_;
  std::unique_ptr<MultiplierGrid> m3_grid_;
  std::unique_ptr<MultiplierGrid> m4_grid_;
  std::unique_ptr<MultiplierGrid> m5_grid_;
};

double energy(const HierarchyContext& ctx, const SpectralField& u, int level);

struct DerivativeCheckRow {
  double t;
  double E2, E3, E4;
  double finite_difference;
  Complex functional;
  double mismatch;
};

struct DerivativeCheckReport {
  int level = 2;
  bool skipped = false;
  std::string skip_reason;
  double scale = 0.0;
  double max_mismatch = 0.0;
  std::vector<DerivativeCheckRow> rows;

  void write_csv(const std::string& path) const;
};

/// Compares a 4th-order centered difference of E^(level) along `traj` with
/// Lambda_{level+1}(M_{level+1}); the mismatch is scaled by the largest
/// |Lambda_{level+1}| over the checked samples. Checks are made every
/// `stride` samples.
DerivativeCheckReport energy_derivative_check(const HierarchyContext& ctx, const Trajectory& traj, int level,
                                              int stride = 1);

/// |M_4(t)| divided by the decay profile
///   |a_4 + beta lambda^-2 b_4| m(k*) / [(N+|k1|)^2 (N+|k2|)^2 (N+|k3|)^3 (N+|k4|)]
/// with |k1| >= ... >= |k4| and k* = min{|k_l|, |k_ij|}. NaN on the resonant
/// set, where both sides vanish.
double m4_bound_ratio(const HierarchyContext& ctx, const FreqTuple& t);

struct M4BoundScan {
  double max_ratio = 0.0;
  FreqTuple argmax;
  long tuples = 0;
  long resonant = 0;
  /// Largest |M_4| seen on the resonant set (should be rounding noise).
  double resonant_residual = 0.0;
};

/// Scans every admissible 4-tuple with |n_i| <= range.
M4BoundScan m4_bound_scan(const HierarchyContext& ctx, int range);

inline constexpr int level3_K_cap = 48;
inline constexpr int level4_K_cap = 16;

}  // namespace kawahara
