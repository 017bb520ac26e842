#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "kawahara/evolution.hpp"
#include "kawahara/rng.hpp"

namespace kawahara {

enum class Taper { none, hann };

enum class RegionId { D1, D2, D3, OTHER };

const char* region_name(RegionId r);

/// Region of (tau, k) by modulation |tau - p_lambda(k)|:
///   D1: <= |k|^4/10 and |k| >= 1
///   D2: in [|k|^4/10, |k|^5/10] and |k| >= 1
///   D3: >= |k|^5/10 and 1/lambda <= |k| <= 1
/// Boundary points go to the lowest-numbered region that contains them.
RegionId classify(const TorusSpec& spec, double tau, double k);
RegionId classify_modulation(double modulation, double k);

/// Space-time coefficients on the lattice tau_m = 2 pi (m + shift_n) / T_w,
/// k_n = n / lambda, stored sparsely per spatial column. shift_n is zero when
/// p_lambda(k_n) T_w / 2pi is an integer (commensurate window).
class SpaceTimeField {
public:
  struct Entry {
    long long m;
    Complex value;
  };

  SpaceTimeField(const TorusSpec& spec, double window, Taper taper = Taper::none);

  const TorusSpec& spec() const { return spec_; }
  int K() const { return spec_.K; }
  double window() const { return window_; }
  Taper taper() const { return taper_; }
  double bin_measure() const;

  double tau(int n, long long m) const;
  double modulation(int n, long long m) const;
  double shift(int n) const { return shifts_[n + spec_.K]; }
  void set_shift(int n, double shift) { shifts_[n + spec_.K] = shift; }
  bool commensurate(double tol = 1e-9) const;

  const std::vector<Entry>& column(int n) const { return columns_[n + spec_.K]; }
  std::vector<Entry>& column(int n) { return columns_[n + spec_.K]; }
  /// Adds value at (m, n); columns are kept sorted by m.
  void add(int n, long long m, Complex value);
  /// Multiplies every entry by `factor`.
  void scale(Complex factor);

  /// Entry-count and lattice consistency check.
  std::size_t nonzeros() const;
  bool is_zero() const { return nonzeros() == 0; }

  /// Nearest lattice index for frequency tau in column n.
  long long nearest_bin(int n, double tau) const;

  /// Transform of u(t + t0): every entry picks up exp(i tau t0).
  SpaceTimeField translated(double t0) const;

private:
  TorusSpec spec_;
  double window_;
  Taper taper_;
  std::vector<double> shifts_;
  std::vector<std::vector<Entry>> columns_;
};

/// Tapered temporal transform of uniformly sampled trajectory states,
/// F(tau, k) = lambda dt sum_j w_j c_n(t_j) e^{-i tau t_j}. With
/// `drop_endpoint` the final sample is treated as the start of the next
/// period and omitted, so T_w equals the trajectory length.
SpaceTimeField to_spacetime(const Trajectory& traj, Taper taper = Taper::hann, bool drop_endpoint = true);

double xsb_norm(const SpaceTimeField& F, double s, double b);
double ys_norm(const SpaceTimeField& F, double s);
/// X^{s,b} norm restricted to one region.
double xsb_norm(const SpaceTimeField& F, double s, double b, RegionId region);
/// Modified norm: ||P_D1 u||_{X^{s,3/4}} + ||P_D2 u||_{X^{-3s-1,s+1}}
///   + ||P_D3 u||_{X^{-s/2-1,s/2+1}} + ||u||_{Y^s}, for -3/2 <= s <= -1.
double zs_norm(const SpaceTimeField& F, double s);

struct ZsParts {
  double d1 = 0, d2 = 0, d3 = 0, ys = 0;
  double total() const { return d1 + d2 + d3 + ys; }
};
ZsParts zs_parts(const SpaceTimeField& F, double s);

/// Discrete (tau, k) convolution, the transform of the product u v. Output
/// columns run over |n| <= K_out (default: sum of the input truncations).
SpaceTimeField convolve(const SpaceTimeField& u, const SpaceTimeField& v, int K_out = -1);

/// ||Lambda^{-1} d_x (u v)||_{Z^s} / (||u||_{Z^s} ||v||_{Z^s}).
double bilinear_ratio(const SpaceTimeField& u, const SpaceTimeField& v, double s);

/// ||P_{|k|>=1}(u v)||_{L^2_{t,x}} / (||u||_{X^{0,b}} ||v||_{X^{0,b'}}).
double strichartz_ratio(const SpaceTimeField& u, const SpaceTimeField& v, double b, double b_prime);

/// Sum over k_1 = n_1/lambda (n_1, n - n_1 nonzero) of the tau_1-measure of
/// { |tau_1 - p(k_1)| <= M1, |tau - tau_1 - p(k - k_1)| <= M2 }.
double modulation_pair_measure(const TorusSpec& spec, double tau, int n, double M1, double M2);

/// Window T_w = 2 pi lambda^5: every p_lambda(k_n) is then a multiple of the
/// bin width, so all column shifts vanish.
double commensurate_window(const TorusSpec& spec);

/// Random dyadic packet: up to `points` lattice sites with |n| in
/// [2^j, 2^{j+1}) and modulation |tau - p| in [2^i - 1, 2^{i+1} - 1) bins
/// (i = 0 includes the dispersion curve), amplitudes standard complex normal.
/// Real-symmetric support is not imposed.
SpaceTimeField dyadic_packet(const TorusSpec& spec, int j, int i, int points, CounterRng& rng);

/// Writes `m,n,region` for every stored entry.
void write_region_map(const SpaceTimeField& F, const std::filesystem::path& path);

struct RatioSample {
  int trial = 0;
  std::uint64_t seed = 0;
  double ratio = 0.0;
};
void write_ratio_ensemble(const std::vector<RatioSample>& samples, const std::filesystem::path& path);

/// (tau, k) where the two-wave resonance curve is flattest:
/// tau = k^5/16 + beta lambda^-2 k^3/4.
double resonance_center(const TorusSpec& spec, double k);

}  // namespace kawahara
