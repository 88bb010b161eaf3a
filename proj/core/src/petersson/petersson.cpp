#include "scslab/petersson/petersson.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "scslab/special/arith.hpp"
#include "scslab/special/bessel.hpp"

namespace scslab::petersson {
namespace {

constexpr double kZeta2 = kPi * kPi / 6.0;
const double kY0 = std::sqrt(3.0) / 2.0;

// log of (4 pi)^(k/2) / sqrt(Gamma(k))
double log_h_prefactor(int k) { return 0.5 * k * std::log(4.0 * kPi) - 0.5 * std::lgamma(static_cast<double>(k)); }

// bound on |lambda(n)| n^((k-1)/2) y^(k/2) e^(-2 pi n y) times the prefactor, using d(n) <= 2 sqrt(n)
double log_term_bound(int k, double n, double y) {
  return std::log(2.0) + 0.5 * std::log(n) + log_h_prefactor(k) + 0.5 * k * std::log(y) + 0.5 * (k - 1) * std::log(n) -
         kTwoPi * n * y;
}

void require_form(const HeckeEigenform& f, const char* who) {
  if (f.k < 4 || f.k % 2 != 0) throw DomainError(std::string(who) + ": weight must be even and >= 4");
  if (f.table_length() < 1) throw DomainError(std::string(who) + ": empty eigenvalue table");
}

template <class F>
double composite_gauss(F&& g, double lo, double hi, int panels) {
  if (!(hi > lo)) return 0.0;
  const double w = (hi - lo) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    s += boost::math::quadrature::gauss<double, 20>::integrate(g, lo + p * w, lo + (p + 1) * w);
  }
  return s;
}

// Parseval over y >= 1: sum lambda(n)^2 (4 pi / (k - 1)) Q(k - 1, 4 pi n)
double upper_region(const HeckeEigenform& f, std::size_t M) {
  const double a = f.k - 1.0;
  CompensatedSum acc;
  for (std::size_t n = 1; n <= M; ++n) {
    const double q = boost::math::gamma_q(a, 4.0 * kPi * static_cast<double>(n));
    if (q == 0.0) break;
    acc += f[n] * f[n] * q;
  }
  return 4.0 * kPi / a * acc.value();
}

// 2 int_0^{1/2} int_{sqrt(1 - x^2)}^1 |h|^2 dy / y^2 dx
double lower_region(const HeckeEigenform& f, const std::vector<double>& log_coeff, int panels) {
  const std::size_t M = log_coeff.size() - 1;
  const double half_k = 0.5 * f.k;
  auto h2 = [&](double x, double y) {
    const double ly = half_k * std::log(y);
    const std::complex<double> w = std::polar(1.0, kTwoPi * x);
    std::complex<double> z = 1.0, s = 0.0;
    for (std::size_t n = 1; n <= M; ++n) {
      z *= w;
      if (f[n] == 0.0) continue;
      s += f[n] * std::exp(log_coeff[n] + ly - kTwoPi * static_cast<double>(n) * y) * z;
    }
    return std::norm(s) / (y * y);
  };
  auto column = [&](double x) {
    return composite_gauss([&](double y) { return h2(x, y); }, std::sqrt(1.0 - x * x), 1.0, panels);
  };
  return 2.0 * composite_gauss(column, 0.0, 0.5, panels);
}

// coefficients a(n) of L(s, sym^2 f) = sum a(n) n^-s for n <= L, from the Euler factors
// (1 - (l^2 - 1) X + (l^2 - 1) X^2 - X^3)^-1 with l = lambda(p)
std::vector<double> sym2_coefficients(const HeckeEigenform& f, std::size_t L) {
  std::vector<std::uint32_t> spf(L + 1, 0);
  for (std::size_t p = 2; p <= L; ++p) {
    if (spf[p] != 0) continue;
    for (std::size_t m = p; m <= L; m += p)
      if (spf[m] == 0) spf[m] = static_cast<std::uint32_t>(p);
  }
  std::vector<double> a(L + 1, 0.0);
  if (L >= 1) a[1] = 1.0;
  for (std::size_t p = 2; p <= L; ++p) {
    if (spf[p] != p) continue;
    const double t = f[p] * f[p] - 1.0;
    double e1 = 1.0, e2 = 0.0, e3 = 0.0;  // a(p^(e-1)), a(p^(e-2)), a(p^(e-3))
    for (std::size_t q = p;; q *= p) {
      const double next = t * (e1 - e2) + e3;
      a[q] = next;
      e3 = e2;
      e2 = e1;
      e1 = next;
      if (q > L / p) break;
    }
  }
  for (std::size_t n = 2; n <= L; ++n) {
    const std::size_t p = spf[n];
    if (p == n) continue;
    std::size_t q = p;
    while ((n / q) % p == 0) q *= p;
    if (q == n) continue;  // prime power, already set
    a[n] = a[q] * a[n / q];
  }
  return a;
}

// L(s, sym^2 f) for real s >= 3 by the Euler product over primes in the table
double sym2_euler(const HeckeEigenform& f, double s) {
  const auto primes = special::primes_up_to(static_cast<std::uint32_t>(f.table_length()));
  double log_l = 0.0;
  for (const auto p : primes) {
    const double t = f[p] * f[p] - 1.0;
    const double x = std::pow(static_cast<double>(p), -s);
    log_l -= std::log1p(-t * x + t * x * x - x * x * x);
  }
  return std::exp(log_l);
}

// log |L(-m, sym^2 f)| for even m >= 2 from the functional equation with
// gamma factor pi^(-(s+1)/2) Gamma((s+1)/2) 2 (2 pi)^-(s+k-1) Gamma(s+k-1)
double log_abs_l_negative(int k, int m, double l_one_plus_m) {
  const double lp = std::log(kPi), l2p = std::log(kTwoPi);
  const double lhs = -0.5 * (m + 2) * lp + std::lgamma(0.5 * (m + 2)) - (k + m) * l2p + std::lgamma(k + m) +
                     std::log(l_one_plus_m);
  const double rhs = 0.5 * (m - 1) * lp + std::log(std::fabs(std::tgamma(0.5 * (1 - m)))) + (m + 1 - k) * l2p +
                     std::lgamma(k - 1 - m);
  return lhs - rhs;
}

double smoothed_series(const HeckeEigenform& f, double tol) {
  const std::size_t N = f.table_length();
  const double T = smoothed_series_scale(N);
  const std::size_t L = std::min<std::size_t>(N, static_cast<std::size_t>(std::ceil(40.0 * T)));
  if (T < 5.0) throw InsufficientTable("sym2_l1 (smoothed-series): table too short", 200);
  const auto a = sym2_coefficients(f, L);
  CompensatedSum s;
  for (std::size_t n = 1; n <= L; ++n) {
    const double dn = static_cast<double>(n);
    if (a[n] != 0.0) s += a[n] / dn * std::exp(-dn / T);
  }
  const int k = f.k;
  // L(-2) < 0 since Gamma(-1/2) < 0; L(-1) = 0
  const double l_minus2 = -std::exp(log_abs_l_negative(k, 2, sym2_euler(f, 3.0)));
  const double value = (s.value() + l_minus2 / (6.0 * T * T * T)) / (1.0 - (k - 1.0) / (2.0 * kPi * kPi * T));
  // first neglected residue L(-4) / (120 T^5)
  const double next = std::exp(log_abs_l_negative(k, 4, sym2_euler(f, 5.0)) - std::log(120.0) - 5.0 * std::log(T));
  if (next > tol * value) {
    // T^5 scales the neglected residue; ask for enough table to shrink it below tol
    const double T_need = T * std::pow(next / (tol * value), 0.2) * 1.05;
    throw InsufficientTable("sym2_l1 (smoothed-series): smoothing length too small for tol",
                            static_cast<std::size_t>(std::ceil(40.0 * T_need)));
  }
  return value;
}

double rankin_slope(const HeckeEigenform& f) {
  const std::size_t N = f.table_length();
  if (N < 1000) throw InsufficientTable("sym2_l1 (rankin-slope): table too short", 1000);
  std::vector<double> R(N + 1, 0.0);
  CompensatedSum acc;
  for (std::size_t n = 1; n <= N; ++n) {
    acc += f[n] * f[n];
    R[n] = acc.value();
  }
  constexpr int kPoints = 60;
  const double lo = std::max(10.0, 0.1 * static_cast<double>(N)), hi = static_cast<double>(N);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int j = 0; j < kPoints; ++j) {
    const double X = std::floor(lo * std::pow(hi / lo, static_cast<double>(j) / (kPoints - 1)));
    const double y = R[static_cast<std::size_t>(X)];
    sx += X;
    sy += y;
    sxx += X * X;
    sxy += X * y;
  }
  const double slope = (kPoints * sxy - sx * sy) / (kPoints * sxx - sx * sx);
  if (!(slope > 0.0)) throw NumericalFailure("sym2_l1 (rankin-slope): non-positive slope");
  return kZeta2 * slope;
}

}  // namespace

std::size_t norm_required_length(int k, double tol) {
  if (k < 4 || k % 2 != 0) throw DomainError("norm_required_length: weight must be even and >= 4");
  if (!(tol > 0.0)) throw DomainError("norm_required_length: tol must be positive");
  // terms rise to n ~ k / (4 pi y0) and then fall geometrically
  std::vector<double> logb;
  const double peak = (k - 1.0) / (4.0 * kPi * kY0);
  for (std::size_t n = 1;; ++n) {
    const double lb = log_term_bound(k, static_cast<double>(n), kY0);
    logb.push_back(lb);
    if (static_cast<double>(n) > 2.0 * peak + 10.0 && lb < -750.0) break;
  }
  const double mx = *std::max_element(logb.begin(), logb.end());
  double total = 0.0;
  for (const double lb : logb) total += std::exp(lb - mx);
  const double B = std::exp(mx) * total;
  const double eps = 0.01 * tol / (1.0 + B);
  double tail = 0.0;
  for (std::size_t i = logb.size(); i-- > 0;) {
    tail += std::exp(logb[i]);
    if (tail > eps) return i + 1;
  }
  return 1;
}

NormIntegral normalized_norm_integral(const HeckeEigenform& f, double tol, int min_panels) {
  require_form(f, "petersson_norm");
  if (!(tol > 0.0)) throw DomainError("petersson_norm: tol must be positive");
  const std::size_t M = norm_required_length(f.k, tol);
  if (M > f.table_length()) throw InsufficientTable("petersson_norm: eigenvalue table too short for tol", M);
  std::vector<double> log_coeff(M + 1, 0.0);
  for (std::size_t n = 1; n <= M; ++n) log_coeff[n] = log_h_prefactor(f.k) + 0.5 * (f.k - 1) * std::log(n);

  NormIntegral out;
  out.terms = M;
  const double upper = upper_region(f, M);
  int panels = std::max(1, min_panels);
  double prev = upper + lower_region(f, log_coeff, panels);
  for (int iter = 0; iter < 10; ++iter) {
    panels *= 2;
    const double cur = upper + lower_region(f, log_coeff, panels);
    const double change = std::fabs(cur - prev);
    prev = cur;
    if (change <= 0.1 * tol * std::fabs(cur)) {
      out.value = cur;
      out.quadrature_change = change;
      out.panels = panels;
      return out;
    }
  }
  throw NumericalFailure("petersson_norm: quadrature did not settle");
}

double log_petersson_norm(const HeckeEigenform& f, double tol) {
  const NormIntegral I = normalized_norm_integral(f, tol);
  return std::log(I.value) + std::lgamma(static_cast<double>(f.k)) - f.k * std::log(4.0 * kPi);
}

double petersson_norm(const HeckeEigenform& f, double tol) { return std::exp(log_petersson_norm(f, tol)); }

std::string to_string(Sym2Method m) {
  switch (m) {
    case Sym2Method::NormIdentity: return "norm-identity";
    case Sym2Method::SmoothedSeries: return "smoothed-series";
    default: return "rankin-slope";
  }
}

double smoothed_series_scale(std::size_t N) { return std::min(1000.0, static_cast<double>(N) / 40.0); }

double sym2_l1(const HeckeEigenform& f, Sym2Method method, double tol) {
  require_form(f, "sym2_l1");
  if (!(tol > 0.0)) throw DomainError("sym2_l1: tol must be positive");
  switch (method) {
    case Sym2Method::NormIdentity: return 0.5 * kPi * normalized_norm_integral(f, tol).value;
    case Sym2Method::SmoothedSeries: return smoothed_series(f, tol);
    default: return rankin_slope(f);
  }
}

namespace {
std::string describe(const Sym2Triangulation& t) {
  std::ostringstream os;
  os.precision(12);
  os << "sym2_l1: routes disagree (norm-identity " << t.norm_identity << ", smoothed-series " << t.smoothed_series
     << ", rankin-slope " << t.rankin_slope << ", spread " << t.spread << ")";
  return os.str();
}
}  // namespace

Sym2Disagreement::Sym2Disagreement(const Sym2Triangulation& t) : NumericalFailure(describe(t)), values_(t) {}

Sym2Triangulation sym2_l1_triangulate(const HeckeEigenform& f, double tol) {
  Sym2Triangulation t;
  t.norm_identity = sym2_l1(f, Sym2Method::NormIdentity, tol);
  t.smoothed_series = sym2_l1(f, Sym2Method::SmoothedSeries, tol);
  t.rankin_slope = sym2_l1(f, Sym2Method::RankinSlope, tol);
  const double v[3] = {t.norm_identity, t.smoothed_series, t.rankin_slope};
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      t.spread = std::max(t.spread, std::fabs(v[i] - v[j]) / std::min(std::fabs(v[i]), std::fabs(v[j])));
  if (t.spread > 10.0 * tol) throw Sym2Disagreement(t);
  return t;
}

double trace_formula_lhs(int k, long n1, long n2, std::span<const HeckeEigenform> forms) {
  if (k < 4 || k % 2 != 0) throw DomainError("trace_formula_lhs: weight must be even and >= 4");
  if (n1 < 1 || n2 < 1) throw DomainError("trace_formula_lhs: n1, n2 must be positive");
  CompensatedSum acc;
  for (const auto& f : forms) {
    if (f.k != k) throw DomainError("trace_formula_lhs: form of the wrong weight");
    if (!f.sym2_l1) throw DomainError("trace_formula_lhs: form without L(1, sym^2 f)");
    acc += f.at(static_cast<std::size_t>(n1)) * f.at(static_cast<std::size_t>(n2)) / *f.sym2_l1;
  }
  return 2.0 * kPi * kPi / (k - 1.0) * acc.value();
}

TraceFormulaResult trace_formula_rhs(int k, long n1, long n2, long c0, special::KloostermanTable* table) {
  if (k < 4 || k % 2 != 0) throw DomainError("trace_formula_rhs: weight must be even and >= 4");
  if (n1 < 1 || n2 < 1) throw DomainError("trace_formula_rhs: n1, n2 must be positive");
  if (c0 < 1) throw DomainError("trace_formula_rhs: c0 must be positive");
  TraceFormulaResult r;
  r.c0 = c0;
  r.diagonal = n1 == n2 ? 1.0 : 0.0;
  const double root = std::sqrt(static_cast<double>(n1) * static_cast<double>(n2));
  DoubleDouble acc;
  for (long c = 1; c <= c0; ++c) {
    const double J = special::bessel_j(k - 1, 4.0 * kPi * root / static_cast<double>(c));
    if (J == 0.0) continue;
    const double S = table ? (*table)(n1, n2, c) : special::kloosterman(n1, n2, c);
    acc.add_product(S / static_cast<double>(c), J);
  }
  const double sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;
  r.offdiagonal = sign * kTwoPi * acc.value();
  r.tail_bound = kTwoPi * special::bessel_tail_bound(k, root, c0);
  return r;
}

TraceFormulaResult trace_formula_rhs_auto(int k, long n1, long n2, double tol, special::KloostermanTable* table) {
  if (!(tol > 0.0)) throw DomainError("trace_formula_rhs: tol must be positive");
  if (k < 4 || k % 2 != 0) throw DomainError("trace_formula_rhs: weight must be even and >= 4");
  if (n1 < 1 || n2 < 1) throw DomainError("trace_formula_rhs: n1, n2 must be positive");
  const double root = std::sqrt(static_cast<double>(n1) * static_cast<double>(n2));
  return trace_formula_rhs(k, n1, n2, special::bessel_tail_cutoff(k, root, tol / kTwoPi), table);
}

}  // namespace scslab::petersson
