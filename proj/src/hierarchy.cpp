#include "kawahara/hierarchy.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <thread>

#include "kawahara/io.hpp"

namespace kawahara {

// ---------------------------------------------------------------------------
// FreqTuple and symmetrization

FreqTuple::FreqTuple(std::initializer_list<int> values)
    : FreqTuple(std::span<const int>(values.begin(), values.size())) {}

FreqTuple::FreqTuple(std::span<const int> values) {
  if (values.size() > static_cast<std::size_t>(max_arity)) throw std::invalid_argument("FreqTuple: arity above 5");
  size = static_cast<int>(values.size());
  std::copy(values.begin(), values.end(), n.begin());
}

long long FreqTuple::sum() const {
  long long s = 0;
  for (int i = 0; i < size; ++i) s += n[i];
  return s;
}

bool FreqTuple::admissible() const {
  if (sum() != 0) return false;
  for (int i = 0; i < size; ++i)
    if (n[i] == 0) return false;
  return true;
}

Complex symmetrized_value(const Multiplier& M, const FreqTuple& t) {
  std::array<int, FreqTuple::max_arity> perm{};
  std::iota(perm.begin(), perm.begin() + t.size, 0);
  Complex acc = 0.0;
  long count = 0;
  FreqTuple permuted = t;
  do {
    for (int i = 0; i < t.size; ++i) permuted[i] = t[perm[i]];
    acc += M(permuted);
    ++count;
  } while (std::next_permutation(perm.begin(), perm.begin() + t.size));
  return acc / static_cast<double>(count);
}

Multiplier symmetrize(Multiplier M) {
  return [M = std::move(M)](const FreqTuple& t) { return symmetrized_value(M, t); };
}

// ---------------------------------------------------------------------------
// ExclusionLog

void ExclusionLog::record(const FreqTuple& t, std::string reason) {
  FreqTuple canonical = t;
  std::sort(canonical.n.begin(), canonical.n.begin() + canonical.size);
  std::string key = reason;
  for (int i = 0; i < canonical.size; ++i) key += ',' + std::to_string(canonical[i]);
  std::lock_guard lock(mutex_);
  if (!seen_.insert(std::move(key)).second) return;
  entries_.push_back({canonical, std::move(reason)});
}

std::vector<ExclusionLog::Entry> ExclusionLog::entries() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

std::size_t ExclusionLog::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

void ExclusionLog::write_csv(const std::string& path, double lambda) const {
  const auto rows = entries();
  int width = 3;
  for (const auto& e : rows) width = std::max(width, e.tuple.size);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("ExclusionLog: cannot open " + path);
  for (int i = 0; i < width; ++i) out << 'k' << (i + 1) << ',';
  out << "reason\n";
  for (const auto& e : rows) {
    for (int i = 0; i < width; ++i) {
      if (i < e.tuple.size) out << io::format_double(e.tuple[i] / lambda);
      out << ',';
    }
    out << e.reason << '\n';
  }
}

// ---------------------------------------------------------------------------
// HierarchyContext

HierarchyContext::HierarchyContext(const IMultiplier& im, const TorusSpec& spec, double guard_eps,
                                   bool truncate_pair_sums)
    : im_(im), spec_(spec), guard_eps_(guard_eps), truncate_(truncate_pair_sums) {
  spec_.validate();
  if (!(guard_eps > 0.0)) throw std::invalid_argument("HierarchyContext: guard_eps must be positive");
  table_range_ = 4 * spec_.K;
  m_table_.resize(2 * table_range_ + 1);
  for (int n = -table_range_; n <= table_range_; ++n) m_table_[n + table_range_] = im_(k(n));
  inv_lambda5_ = std::pow(spec_.lambda, -5.0);
}

double HierarchyContext::m(int n) const {
  if (std::abs(n) <= table_range_) return m_table_[n + table_range_];
  return im_(k(n));
}

long long HierarchyContext::divisor_numerator(const FreqTuple& t) const {
  long long s5 = 0, s3 = 0;
  for (int i = 0; i < t.size; ++i) {
    const long long n = t[i];
    const long long n3 = n * n * n;
    s3 += n3;
    s5 += n3 * n * n;
  }
  return s5 + spec_.beta * s3;
}

double HierarchyContext::divisor(const FreqTuple& t) const {
  return static_cast<double>(divisor_numerator(t)) * inv_lambda5_;
}

// ---------------------------------------------------------------------------
// Hierarchy multipliers

Complex m3(const HierarchyContext& ctx, int n1, int n2, int n3) {
  // Each of the three splits (first | pair) appears twice among the six
  // permutations, so the average over splits equals the symmetrization.
  const int n[3] = {n1, n2, n3};
  double acc = 0.0;
  for (int a = 0; a < 3; ++a) {
    const int pair = n[(a + 1) % 3] + n[(a + 2) % 3];
    acc += ctx.m(n[a]) * ctx.m(pair) * ctx.k(pair);
  }
  return Complex(0.0, -2.0 * acc / 3.0);
}

Complex m3(const HierarchyContext& ctx, const FreqTuple& t) { return m3(ctx, t[0], t[1], t[2]); }

Complex sigma3(const HierarchyContext& ctx, int n1, int n2, int n3) {
  const FreqTuple t{n1, n2, n3};
  const double d = ctx.divisor(t);
  const Complex num = m3(ctx, n1, n2, n3);
  if (std::abs(d) < ctx.guard_eps()) {
    // |a_3 + ...| = (5/2)|k1 k2 k3 (k1^2+k2^2+k3^2 + 6 beta / (5 lambda^2))| never
    // vanishes on admissible lattice triples.
    ctx.log().record(t, t.admissible() ? "sigma3_resonant_internal_error" : "sigma3_inadmissible");
    return 0.0;
  }
  return -num / Complex(0.0, d);
}

Complex sigma3(const HierarchyContext& ctx, const FreqTuple& t) { return sigma3(ctx, t[0], t[1], t[2]); }

namespace {

// The six splits {a, b} | {c, d} of four slots.
constexpr int kPairs4[6][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2},
                               {1, 2, 0, 3}, {1, 3, 0, 2}, {2, 3, 0, 1}};

// The ten splits {a, b, c} | {d, e} of five slots.
constexpr int kPairs5[10][5] = {{2, 3, 4, 0, 1}, {1, 3, 4, 0, 2}, {1, 2, 4, 0, 3}, {1, 2, 3, 0, 4},
                                {0, 3, 4, 1, 2}, {0, 2, 4, 1, 3}, {0, 2, 3, 1, 4}, {0, 1, 4, 2, 3},
                                {0, 1, 3, 2, 4}, {0, 1, 2, 3, 4}};

}  // namespace

Complex m4(const HierarchyContext& ctx, const FreqTuple& t) {
  // Each split {a,b}|{c,d} carries 4 of the 24 permutations. A vanishing pair
  // sum k_cd multiplies a bounded sigma_3 limit, so that term is zero.
  Complex acc = 0.0;
  for (const auto& split : kPairs4) {
    const int na = t[split[0]], nb = t[split[1]];
    const int ncd = t[split[2]] + t[split[3]];
    if (!ctx.pair_sum_allowed(ncd)) continue;
    acc += sigma3(ctx, na, nb, ncd) * ctx.k(ncd);
  }
  return Complex(0.0, -3.0) * acc / 6.0;
}

Complex sigma4(const HierarchyContext& ctx, const FreqTuple& t) {
  const double d = ctx.divisor(t);
  const Complex num = m4(ctx, t);
  if (std::abs(d) < ctx.guard_eps()) {
    // The resonant set is {k_ij = 0 for some pair}, where M_4 cancels exactly.
    const bool removable = std::abs(num) <= 1e-12 * (1.0 + std::abs(num));
    ctx.log().record(t, removable ? "resonant_removable" : "resonant_excluded");
    return 0.0;
  }
  return -num / Complex(0.0, d);
}

Complex m5(const HierarchyContext& ctx, const FreqTuple& t) {
  Complex acc = 0.0;
  for (const auto& split : kPairs5) {
    const int nde = t[split[3]] + t[split[4]];
    if (!ctx.pair_sum_allowed(nde)) continue;
    acc += sigma4(ctx, FreqTuple{t[split[0]], t[split[1]], t[split[2]], nde}) * ctx.k(nde);
  }
  return Complex(0.0, -4.0) * acc / 10.0;
}

// ---------------------------------------------------------------------------
// Grids and Lambda_l

namespace {

long ipow(long base, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

MultiplierGrid::MultiplierGrid(int arity, int K, const Multiplier& M) : arity_(arity), K_(K) {
  if (arity < 2 || arity > FreqTuple::max_arity) throw std::invalid_argument("MultiplierGrid: arity must be 2..5");
  const long side = 2L * K + 1;
  const int free_dims = arity - 1;
  const long total = ipow(side, free_dims);
  const long per_leading = total / side;
  values_.assign(total, Complex(0.0));

  auto fill_leading = [&](long lead) {
    FreqTuple t;
    t.size = arity;
    std::array<int, FreqTuple::max_arity> idx{};
    for (long flat = 0; flat < per_leading; ++flat) {
      long rem = flat;
      for (int d = free_dims - 1; d >= 1; --d) {
        idx[d] = static_cast<int>(rem % side) - K;
        rem /= side;
      }
      idx[0] = static_cast<int>(lead) - K;
      long long closing = 0;
      bool zero = false;
      for (int d = 0; d < free_dims; ++d) {
        t[d] = idx[d];
        closing -= idx[d];
        zero |= idx[d] == 0;
      }
      if (zero || closing == 0 || std::llabs(closing) > K) continue;
      t[free_dims] = static_cast<int>(closing);
      values_[lead * per_leading + flat] = M(t);
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), side));
  if (workers == 1) {
    for (long lead = 0; lead < side; ++lead) fill_leading(lead);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (long lead = w; lead < side; lead += workers) fill_leading(lead);
      });
    for (auto& th : pool) th.join();
  }
}

Complex MultiplierGrid::at(std::span<const int> leading) const {
  const long side = 2L * K_ + 1;
  long flat = 0;
  for (int v : leading) flat = flat * side + (v + K_);
  return values_[flat];
}

namespace {

void require_shared_spec(std::span<const SpectralField* const> fields) {
  for (const auto* f : fields)
    if (!(f->spec() == fields[0]->spec())) throw std::invalid_argument("lambda_l: fields must share one TorusSpec");
}

}  // namespace

Complex lambda_l(const Multiplier& M, std::span<const SpectralField* const> fields) {
  const int l = static_cast<int>(fields.size());
  if (l < 2 || l > FreqTuple::max_arity) throw std::invalid_argument("lambda_l: arity must be 2..5");
  require_shared_spec(fields);
  const TorusSpec& spec = fields[0]->spec();
  const int K = spec.K;

  FreqTuple t;
  t.size = l;
  Complex acc = 0.0;
  // Odometer over the first l-1 indices; the last index closes the sum.
  std::array<int, FreqTuple::max_arity> idx{};
  for (int d = 0; d < l - 1; ++d) idx[d] = -K;
  while (true) {
    long long closing = 0;
    bool zero = false;
    for (int d = 0; d < l - 1; ++d) {
      closing -= idx[d];
      zero |= idx[d] == 0;
    }
    if (!zero && closing != 0 && std::llabs(closing) <= K) {
      Complex prod = fields[l - 1]->coeff(static_cast<int>(closing));
      for (int d = 0; d < l - 1 && prod != Complex(0.0); ++d) prod *= fields[d]->coeff(idx[d]);
      if (prod != Complex(0.0)) {
        for (int d = 0; d < l - 1; ++d) t[d] = idx[d];
        t[l - 1] = static_cast<int>(closing);
        acc += M(t) * prod;
      }
    }
    int d = l - 2;
    while (d >= 0 && idx[d] == K) idx[d--] = -K;
    if (d < 0) break;
    ++idx[d];
  }
  return 2.0 * std::numbers::pi * spec.lambda * acc;
}

Complex lambda_l(const Multiplier& M, const SpectralField& u, int arity) {
  std::vector<const SpectralField*> fields(arity, &u);
  return lambda_l(M, fields);
}

Complex lambda_l(const MultiplierGrid& grid, const SpectralField& u) {
  if (grid.K() != u.K()) throw std::invalid_argument("lambda_l: grid and field truncations differ");
  const int K = grid.K();
  const int l = grid.arity();
  const long side = 2L * K + 1;
  const auto& vals = grid.values();
  const CoeffArray& c = u.coeffs();
  Complex acc = 0.0;

  switch (l) {
    case 2:
      for (int a = -K; a <= K; ++a) acc += vals[a + K] * c(a + K) * c(-a + K);
      break;
    case 3:
      for (int a = -K; a <= K; ++a) {
        if (a == 0) continue;
        const Complex ca = c(a + K);
        if (ca == Complex(0.0)) continue;
        const int lo = std::max(-K, -K - a), hi = std::min(K, K - a);
        const Complex* row = &vals[(a + K) * side];
        for (int b = lo; b <= hi; ++b) acc += row[b + K] * ca * c(b + K) * c(-a - b + K);
      }
      break;
    case 4:
      for (int a = -K; a <= K; ++a) {
        const Complex ca = c(a + K);
        if (a == 0 || ca == Complex(0.0)) continue;
        for (int b = -K; b <= K; ++b) {
          const Complex cab = ca * c(b + K);
          if (b == 0 || cab == Complex(0.0)) continue;
          const int lo = std::max(-K, -K - a - b), hi = std::min(K, K - a - b);
          const Complex* row = &vals[((a + K) * side + (b + K)) * side];
          Complex inner = 0.0;
          for (int d = lo; d <= hi; ++d) inner += row[d + K] * c(d + K) * c(-a - b - d + K);
          acc += cab * inner;
        }
      }
      break;
    case 5:
      for (int a = -K; a <= K; ++a) {
        const Complex ca = c(a + K);
        if (a == 0 || ca == Complex(0.0)) continue;
        for (int b = -K; b <= K; ++b) {
          const Complex cab = ca * c(b + K);
          if (b == 0 || cab == Complex(0.0)) continue;
          for (int d = -K; d <= K; ++d) {
            const Complex cabd = cab * c(d + K);
            if (d == 0 || cabd == Complex(0.0)) continue;
            const int lo = std::max(-K, -K - a - b - d), hi = std::min(K, K - a - b - d);
            const Complex* row = &vals[(((a + K) * side + (b + K)) * side + (d + K)) * side];
            Complex inner = 0.0;
            for (int e = lo; e <= hi; ++e) inner += row[e + K] * c(e + K) * c(-a - b - d - e + K);
            acc += cabd * inner;
          }
        }
      }
      break;
    default:
      throw std::invalid_argument("lambda_l: unsupported arity");
  }
  return 2.0 * std::numbers::pi * u.spec().lambda * acc;
}

// ---------------------------------------------------------------------------
// Energies

EnergyEvaluator::EnergyEvaluator(const HierarchyContext& ctx, int max_level, bool with_derivatives)
    : ctx_(ctx), max_level_(max_level) {
  if (max_level < 2 || max_level > 4) throw std::invalid_argument("EnergyEvaluator: level must be 2, 3 or 4");
  const int K = ctx.spec().K;
  if (max_level >= 3) sigma3_grid_ = std::make_unique<MultiplierGrid>(3, K, [&](const FreqTuple& t) {
    return sigma3(ctx, t);
  });
  if (max_level >= 4) sigma4_grid_ = std::make_unique<MultiplierGrid>(4, K, [&](const FreqTuple& t) {
    return sigma4(ctx, t);
  });
  if (!with_derivatives) return;
  if (max_level == 2) m3_grid_ = std::make_unique<MultiplierGrid>(3, K, [&](const FreqTuple& t) { return m3(ctx, t); });
  if (max_level == 3) m4_grid_ = std::make_unique<MultiplierGrid>(4, K, [&](const FreqTuple& t) { return m4(ctx, t); });
  if (max_level == 4) {
    // sigma_4 arguments stay inside [-K, K] when pair sums are truncated, so
    // the sigma_4 table can be reused.
    const MultiplierGrid* s4 = sigma4_grid_.get();
    const bool reuse = ctx.truncate_pair_sums();
    m5_grid_ = std::make_unique<MultiplierGrid>(5, K, [&, s4, reuse](const FreqTuple& t) {
      if (!reuse) return m5(ctx, t);
      Complex acc = 0.0;
      for (const auto& split : kPairs5) {
        const int nde = t[split[3]] + t[split[4]];
        if (!ctx.pair_sum_allowed(nde)) continue;
        const int lead[3] = {t[split[0]], t[split[1]], t[split[2]]};
        acc += s4->at(lead) * ctx.k(nde);
      }
      return Complex(0.0, -4.0) * acc / 10.0;
    });
  }
}

double EnergyEvaluator::energy(const SpectralField& u, int level) const {
  if (level < 2 || level > max_level_) throw std::invalid_argument("EnergyEvaluator: level out of range");
  const int K = u.K();
  double e2 = 0.0;
  for (int n = -K; n <= K; ++n) {
    if (n == 0) continue;
    const double mn = ctx_.m(n);
    e2 += mn * mn * std::real(u.coeff(n) * u.coeff(-n));
  }
  e2 *= 2.0 * std::numbers::pi * u.spec().lambda;
  Complex total = e2;
  if (level >= 3) total += lambda_l(*sigma3_grid_, u);
  if (level >= 4) total += lambda_l(*sigma4_grid_, u);
  if (std::abs(total.imag()) > 1e-10 * std::max(1.0, std::abs(total.real())))
    throw InvariantViolation("energy_reality", "modified energy has a non-negligible imaginary part");
  return total.real();
}

Complex EnergyEvaluator::energy_rate(const SpectralField& u, int level) const {
  switch (level) {
    case 2:
      if (m3_grid_) return lambda_l(*m3_grid_, u);
      break;
    case 3:
      if (m4_grid_) return lambda_l(*m4_grid_, u);
      break;
    case 4:
      if (m5_grid_) return lambda_l(*m5_grid_, u);
      break;
    default:
      break;
  }
  throw std::logic_error("EnergyEvaluator: derivative tables for this level were not built");
}

double energy(const HierarchyContext& ctx, const SpectralField& u, int level) {
  if (!u.is_real()) throw std::invalid_argument("energy: field must be real-valued");
  if (!(u.spec() == ctx.spec())) throw std::invalid_argument("energy: field and context disagree on TorusSpec");
  EnergyEvaluator ev(ctx, level, false);
  return ev.energy(u, level);
}

// ---------------------------------------------------------------------------
// Derivative identity check

void DerivativeCheckReport::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("DerivativeCheckReport: cannot open " + path);
  out << "t,E2,E3,E4,lhs_rhs_mismatch\n";
  for (const auto& r : rows) {
    out << io::format_double(r.t) << ',' << io::format_double(r.E2) << ',' << io::format_double(r.E3) << ','
        << io::format_double(r.E4) << ',' << io::format_double(r.mismatch) << '\n';
  }
}

DerivativeCheckReport energy_derivative_check(const HierarchyContext& ctx, const Trajectory& traj, int level,
                                              int stride) {
  if (level < 2 || level > 4) throw std::invalid_argument("energy_derivative_check: level must be 2, 3 or 4");
  if (stride < 1) throw std::invalid_argument("energy_derivative_check: stride must be >= 1");
  const int K = ctx.spec().K;
  if (level == 3 && K > level3_K_cap)
    throw std::invalid_argument("energy_derivative_check: level 3 costs O(K^3) per sample; K must be <= 48");
  if (level == 4 && K > level4_K_cap)
    throw std::invalid_argument("energy_derivative_check: level 4 costs O(K^4) per sample; K must be <= 16");
  if (!(traj.params.spec == ctx.spec()))
    throw std::invalid_argument("energy_derivative_check: trajectory and context disagree on TorusSpec");
  const std::size_t S = traj.times.size();
  if (S < 5) throw std::invalid_argument("energy_derivative_check: need at least five samples");
  const double h = traj.times[1] - traj.times[0];
  for (std::size_t j = 1; j < S; ++j)
    if (std::abs(traj.times[j] - traj.times[j - 1] - h) > 1e-9 * h)
      throw std::invalid_argument("energy_derivative_check: samples must be uniformly spaced");

  DerivativeCheckReport report;
  report.level = level;
  if (!traj.params.nonlinear) {
    report.skipped = true;
    report.skip_reason = "linear flow: E^(2) is conserved and the cubic functional is not its derivative";
  }

  EnergyEvaluator ev(ctx, level, !report.skipped);
  std::vector<double> E(S);
  for (std::size_t j = 0; j < S; ++j) E[j] = ev.energy(traj.states[j], level);

  for (std::size_t j = 2; j + 2 < S; j += stride) {
    DerivativeCheckRow row{};
    row.t = traj.times[j];
    const auto& u = traj.states[j];
    row.E2 = ev.energy(u, 2);
    row.E3 = level >= 3 ? ev.energy(u, 3) : std::numeric_limits<double>::quiet_NaN();
    row.E4 = level >= 4 ? ev.energy(u, 4) : std::numeric_limits<double>::quiet_NaN();
    row.finite_difference = (-E[j + 2] + 8.0 * E[j + 1] - 8.0 * E[j - 1] + E[j - 2]) / (12.0 * h);
    row.functional = report.skipped ? Complex(0.0) : ev.energy_rate(u, level);
    report.rows.push_back(row);
  }
  for (const auto& r : report.rows) report.scale = std::max(report.scale, std::abs(r.functional));
  const double denom = report.scale > 0.0 ? report.scale : 1.0;
  for (auto& r : report.rows) {
    r.mismatch = std::abs(r.finite_difference - r.functional) / denom;
    if (!report.skipped) report.max_mismatch = std::max(report.max_mismatch, r.mismatch);
  }
  return report;
}

// ---------------------------------------------------------------------------
// M_4 decay profile

double m4_bound_ratio(const HierarchyContext& ctx, const FreqTuple& t) {
  if (t.size != 4) throw std::invalid_argument("m4_bound_ratio: needs a 4-tuple");
  if (ctx.divisor_numerator(t) == 0) return std::numeric_limits<double>::quiet_NaN();
  std::array<double, 4> a{};
  for (int i = 0; i < 4; ++i) a[i] = std::abs(ctx.k(t[i]));
  std::sort(a.begin(), a.end(), std::greater<>());
  const int kstar = std::min({std::abs(t[3]), std::abs(t[0]), std::abs(t[1]), std::abs(t[2]), std::abs(t[0] + t[1]),
                              std::abs(t[0] + t[2]), std::abs(t[1] + t[2])});
  const double N = ctx.im().N();
  const double profile = std::abs(ctx.divisor(t)) * ctx.m(kstar) /
                         (std::pow(N + a[0], 2) * std::pow(N + a[1], 2) * std::pow(N + a[2], 3) * (N + a[3]));
  return std::abs(m4(ctx, t)) / profile;
}

M4BoundScan m4_bound_scan(const HierarchyContext& ctx, int range) {
  if (range < 1) throw std::invalid_argument("m4_bound_scan: range must be positive");
  M4BoundScan scan;
  for (int a = -range; a <= range; ++a)
    for (int b = -range; b <= range; ++b)
      for (int c = -range; c <= range; ++c) {
        const int d = -(a + b + c);
        if (std::abs(d) > range) continue;
        const FreqTuple t{a, b, c, d};
        if (!t.admissible()) continue;
        ++scan.tuples;
        const double r = m4_bound_ratio(ctx, t);
        if (std::isnan(r)) {
          ++scan.resonant;
          scan.resonant_residual = std::max(scan.resonant_residual, std::abs(m4(ctx, t)));
        } else if (r > scan.max_ratio) {
          scan.max_ratio = r;
          scan.argmax = t;
        }
      }
  return scan;
}

}  // namespace kawahara
