#include "kawahara/bourgain.hpp"

#include <algorithm>
#include <fstream>
#include <numbers>

#include "kawahara/io.hpp"

#include <unsupported/Eigen/FFT>

namespace kawahara {

const char* region_name(RegionId r) {
  switch (r) {
    case RegionId::D1: return "D1";
    case RegionId::D2: return "D2";
    case RegionId::D3: return "D3";
    case RegionId::OTHER: return "OTHER";
  }
  return "OTHER";
}

RegionId classify_modulation(double modulation, double k) {
  const double a = std::abs(k);
  const double mod = std::abs(modulation);
  const double a4 = a * a * a * a / 10.0;
  const double a5 = a4 * a;
  if (a >= 1.0 && mod <= a4) return RegionId::D1;
  if (a >= 1.0 && mod >= a4 && mod <= a5) return RegionId::D2;
  if (a <= 1.0 && mod >= a5) return RegionId::D3;
  return RegionId::OTHER;
}

RegionId classify(const TorusSpec& spec, double tau, double k) {
  return classify_modulation(tau - dispersion(spec, k), k);
}

// ---------------------------------------------------------------------------
// SpaceTimeField

SpaceTimeField::SpaceTimeField(const TorusSpec& spec, double window, Taper taper)
    : spec_(spec), window_(window), taper_(taper), shifts_(spec.slots(), 0.0), columns_(spec.slots()) {
  spec_.validate();
  if (!(window > 0.0)) throw std::invalid_argument("SpaceTimeField: window must be positive");
}

double SpaceTimeField::bin_measure() const { return 2.0 * std::numbers::pi / window_; }

double SpaceTimeField::tau(int n, long long m) const { return bin_measure() * (static_cast<double>(m) + shift(n)); }

double SpaceTimeField::modulation(int n, long long m) const {
  return tau(n, m) - dispersion_at_index(spec_, n);
}

bool SpaceTimeField::commensurate(double tol) const {
  return std::all_of(shifts_.begin(), shifts_.end(), [tol](double s) { return std::abs(s) <= tol; });
}

void SpaceTimeField::add(int n, long long m, Complex value) {
  if (n == 0 || std::abs(n) > spec_.K) throw std::out_of_range("SpaceTimeField: column outside truncation");
  auto& col = column(n);
  auto it = std::lower_bound(col.begin(), col.end(), m, [](const Entry& e, long long key) { return e.m < key; });
  if (it != col.end() && it->m == m)
    it->value += value;
  else
    col.insert(it, Entry{m, value});
}

void SpaceTimeField::scale(Complex factor) {
  for (auto& col : columns_)
    for (auto& e : col) e.value *= factor;
}

std::size_t SpaceTimeField::nonzeros() const {
  std::size_t count = 0;
  for (const auto& col : columns_)
    for (const auto& e : col) count += e.value != Complex(0.0);
  return count;
}

long long SpaceTimeField::nearest_bin(int n, double tau) const {
  return std::llround(tau / bin_measure() - shift(n));
}

SpaceTimeField SpaceTimeField::translated(double t0) const {
  SpaceTimeField out = *this;
  for (int n = -spec_.K; n <= spec_.K; ++n) {
    if (n == 0) continue;
    for (auto& e : out.column(n)) e.value *= std::polar(1.0, tau(n, e.m) * t0);
  }
  return out;
}

SpaceTimeField to_spacetime(const Trajectory& traj, Taper taper, bool drop_endpoint) {
  std::size_t M = traj.times.size();
  if (drop_endpoint && M > 1) --M;
  if (M < 2) throw std::invalid_argument("to_spacetime: need at least two samples");
  const double dt = traj.times[1] - traj.times[0];
  if (!(dt > 0.0)) throw std::invalid_argument("to_spacetime: times must increase");
  for (std::size_t j = 1; j < traj.times.size(); ++j)
    if (std::abs(traj.times[j] - traj.times[j - 1] - dt) > 1e-9 * dt)
      throw std::invalid_argument("to_spacetime: non-uniform time grid");

  const TorusSpec& spec = traj.params.spec;
  const double Tw = dt * static_cast<double>(M);
  SpaceTimeField F(spec, Tw, taper);
  const double dtau = F.bin_measure();

  std::vector<double> w(M, 1.0);
  if (taper == Taper::hann)
    for (std::size_t j = 0; j < M; ++j) {
      const double s = std::sin(std::numbers::pi * static_cast<double>(j) / static_cast<double>(M));
      w[j] = s * s;
    }

  Eigen::FFT<double> fft;
  std::vector<Complex> in(M), out(M);
  const long long half = static_cast<long long>(M) / 2;
  for (int n = -spec.K; n <= spec.K; ++n) {
    if (n == 0) continue;
    const double p = dispersion_at_index(spec, n);
    bool any = false;
    for (std::size_t j = 0; j < M; ++j) {
      // Demodulate by the linear phase so high dispersion does not alias.
      in[j] = w[j] * traj.states[j].coeff(n) * std::polar(1.0, -p * traj.times[j]);
      any |= in[j] != Complex(0.0);
    }
    const double centre = p / dtau;
    const long long m0 = std::llround(centre);
    F.set_shift(n, centre - static_cast<double>(m0));
    if (!any) continue;
    fft.fwd(out, in);
    for (long long jj = -half; jj < static_cast<long long>(M) - half; ++jj) {
      const std::size_t slot = static_cast<std::size_t>((jj + static_cast<long long>(M)) % static_cast<long long>(M));
      const Complex value = spec.lambda * dt * out[slot];
      if (value != Complex(0.0)) F.add(n, m0 + jj, value);
    }
  }
  return F;
}

// ---------------------------------------------------------------------------
// Norms

namespace {

template <typename Filter>
double weighted_l2(const SpaceTimeField& F, double s, double b, Filter keep) {
  const TorusSpec& spec = F.spec();
  double acc = 0.0;
  for (int n = -spec.K; n <= spec.K; ++n) {
    if (n == 0) continue;
    const double k = spec.frequency(n);
    const double wk = std::pow(japanese(k), 2.0 * s);
    for (const auto& e : F.column(n)) {
      const double mod = F.modulation(n, e.m);
      if (!keep(mod, k)) continue;
      acc += wk * std::pow(japanese(mod), 2.0 * b) * std::norm(e.value);
    }
  }
  return std::sqrt(acc * F.bin_measure() / spec.lambda);
}

}  // namespace

double xsb_norm(const SpaceTimeField& F, double s, double b) {
  return weighted_l2(F, s, b, [](double, double) { return true; });
}

double xsb_norm(const SpaceTimeField& F, double s, double b, RegionId region) {
  return weighted_l2(F, s, b, [region](double mod, double k) { return classify_modulation(mod, k) == region; });
}

double ys_norm(const SpaceTimeField& F, double s) {
  const TorusSpec& spec = F.spec();
  double acc = 0.0;
  for (int n = -spec.K; n <= spec.K; ++n) {
    if (n == 0) continue;
    double l1 = 0.0;
    for (const auto& e : F.column(n)) l1 += std::abs(e.value);
    l1 *= F.bin_measure() * std::pow(japanese(spec.frequency(n)), s);
    acc += l1 * l1;
  }
  return std::sqrt(acc / spec.lambda);
}

ZsParts zs_parts(const SpaceTimeField& F, double s) {
  if (s < -1.5 || s > -1.0) throw std::invalid_argument("zs_norm: s must lie in [-3/2, -1]");
  ZsParts parts;
  parts.d1 = xsb_norm(F, s, 0.75, RegionId::D1);
  parts.d2 = xsb_norm(F, -3.0 * s - 1.0, s + 1.0, RegionId::D2);
  parts.d3 = xsb_norm(F, -s / 2.0 - 1.0, s / 2.0 + 1.0, RegionId::D3);
  parts.ys = ys_norm(F, s);
  return parts;
}

double zs_norm(const SpaceTimeField& F, double s) { return zs_parts(F, s).total(); }

// ---------------------------------------------------------------------------
// Bilinear quantities

SpaceTimeField convolve(const SpaceTimeField& u, const SpaceTimeField& v, int K_out) {
  if (u.spec().lambda != v.spec().lambda || u.spec().beta != v.spec().beta)
    throw std::invalid_argument("convolve: fields live on different tori");
  if (std::abs(u.window() - v.window()) > 1e-12 * u.window())
    throw std::invalid_argument("convolve: fields use different time windows");
  if (!u.commensurate() || !v.commensurate())
    throw std::invalid_argument("convolve: the window must be commensurate with the dispersion lattice");
  if (K_out < 0) K_out = u.K() + v.K();
  TorusSpec out_spec = u.spec();
  out_spec.K = K_out;
  SpaceTimeField out(out_spec, u.window(), u.taper());

  const double weight = u.bin_measure() / (2.0 * std::numbers::pi * u.spec().lambda);
  std::vector<SpaceTimeField::Entry> terms;
  for (int n = -K_out; n <= K_out; ++n) {
    if (n == 0) continue;
    terms.clear();
    for (int n1 = -u.K(); n1 <= u.K(); ++n1) {
      const int n2 = n - n1;
      if (n1 == 0 || n2 == 0 || std::abs(n2) > v.K()) continue;
      for (const auto& a : u.column(n1))
        for (const auto& b : v.column(n2)) terms.push_back({a.m + b.m, a.value * b.value});
    }
    if (terms.empty()) continue;
    std::sort(terms.begin(), terms.end(), [](const auto& x, const auto& y) { return x.m < y.m; });
    auto& col = out.column(n);
    for (const auto& t : terms) {
      if (!col.empty() && col.back().m == t.m)
        col.back().value += weight * t.value;
      else
        col.push_back({t.m, weight * t.value});
    }
  }
  return out;
}

double bilinear_ratio(const SpaceTimeField& u, const SpaceTimeField& v, double s) {
  const double denom = zs_norm(u, s) * zs_norm(v, s);
  if (!(denom > 0.0)) throw std::invalid_argument("bilinear_ratio: zero input norm");
  SpaceTimeField w = convolve(u, v);
  for (int n = -w.K(); n <= w.K(); ++n) {
    if (n == 0) continue;
    const double k = std::abs(w.spec().frequency(n));
    for (auto& e : w.column(n)) e.value *= k / japanese(w.modulation(n, e.m));
  }
  return zs_norm(w, s) / denom;
}

double strichartz_ratio(const SpaceTimeField& u, const SpaceTimeField& v, double b, double b_prime) {
  if (b + b_prime < 29.0 / 40.0 - 1e-12 || !(b > 9.0 / 40.0) || !(b_prime > 9.0 / 40.0))
    throw std::invalid_argument("strichartz_ratio: need b + b' >= 29/40 and b, b' > 9/40");
  const SpaceTimeField w = convolve(u, v);
  const double lambda = w.spec().lambda;
  double acc = 0.0;
  for (int n = -w.K(); n <= w.K(); ++n) {
    if (n == 0 || std::abs(w.spec().frequency(n)) < 1.0) continue;
    for (const auto& e : w.column(n)) acc += std::norm(e.value);
  }
  const double lhs = std::sqrt(acc * w.bin_measure() / lambda);
  const double rhs = xsb_norm(u, 0.0, b) * xsb_norm(v, 0.0, b_prime);
  if (lhs == 0.0) return 0.0;
  if (!(rhs > 0.0)) throw std::invalid_argument("strichartz_ratio: zero input norm");
  return lhs / rhs;
}

// ---------------------------------------------------------------------------
// Counting

double commensurate_window(const TorusSpec& spec) {
  return 2.0 * std::numbers::pi * std::pow(spec.lambda, 5);
}

SpaceTimeField dyadic_packet(const TorusSpec& spec, int j, int i, int points, CounterRng& rng) {
  if (j < 0 || i < 0 || points < 1) throw std::invalid_argument("dyadic_packet: bad block");
  const int n_lo = 1 << j;
  const int n_hi = std::min((1 << (j + 1)) - 1, spec.K);
  if (n_lo > spec.K) throw std::invalid_argument("dyadic_packet: k block outside truncation");
  SpaceTimeField F(spec, commensurate_window(spec), Taper::none);
  const long long d_lo = (1LL << i) - 1, d_hi = (1LL << (i + 1)) - 2;
  const double dtau = F.bin_measure();
  for (int p = 0; p < points; ++p) {
    const int n = static_cast<int>(rng.uniform_int(n_lo, n_hi)) * (rng.uniform() < 0.5 ? -1 : 1);
    const long long m0 = std::llround(dispersion_at_index(spec, n) / dtau);
    const long long d = rng.uniform_int(d_lo, d_hi) * (rng.uniform() < 0.5 ? -1 : 1);
    const double re = rng.normal();
    const double im = rng.normal();
    F.add(n, m0 + d, Complex(re, im));
  }
  return F;
}

void write_region_map(const SpaceTimeField& F, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_region_map: cannot open " + path.string());
  out << "m,n,region\n";
  for (int n = -F.K(); n <= F.K(); ++n) {
    if (n == 0) continue;
    const double k = F.spec().frequency(n);
    for (const auto& e : F.column(n))
      out << e.m << ',' << n << ',' << region_name(classify_modulation(F.modulation(n, e.m), k)) << '\n';
  }
}

void write_ratio_ensemble(const std::vector<RatioSample>& samples, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_ratio_ensemble: cannot open " + path.string());
  out << "trial,seed,ratio\n";
  for (const auto& s : samples) out << s.trial << ',' << s.seed << ',' << io::format_double(s.ratio) << '\n';
}

double resonance_center(const TorusSpec& spec, double k) {
  return k * k * k * k * k / 16.0 + spec.beta * k * k * k / (4.0 * spec.lambda * spec.lambda);
}

double modulation_pair_measure(const TorusSpec& spec, double tau, int n, double M1, double M2) {
  const double lambda = spec.lambda;
  const double k = n / lambda;
  const double c = resonance_center(spec, k);
  const double A = 2.0 * k * k + 2.4 * spec.beta / (lambda * lambda);
  const double reach = std::abs(tau - c) + M1 + M2;

  auto overlap = [&](int n1) {
    const int n2 = n - n1;
    if (n1 == 0 || n2 == 0) return 0.0;
    const double p1 = dispersion_at_index(spec, n1);
    const double p2 = dispersion_at_index(spec, n2);
    const double lo = std::max(p1 - M1, tau - p2 - M2);
    const double hi = std::min(p1 + M1, tau - p2 + M2);
    return std::max(0.0, hi - lo);
  };
  // Beyond d^2 > |A| + 1 the sum p(k1) + p(k - k1) - c = (5/16) k d^2 (d^2 + A),
  // d = k1 - k2, grows monotonically in |d|, so the scan can stop.
  auto outside = [&](int n1) {
    const double d = (2.0 * n1 - n) / lambda;
    const double x = d * d;
    return x > std::abs(A) + 1.0 && (5.0 / 16.0) * std::abs(k) * x * (x + A) > reach;
  };

  double total = 0.0;
  const int mid = n >= 0 ? n / 2 : -((-n) / 2);
  for (int n1 = mid; !outside(n1); ++n1) total += overlap(n1);
  for (int n1 = mid - 1; !outside(n1); --n1) total += overlap(n1);
  return total;
}

}  // namespace kawahara
