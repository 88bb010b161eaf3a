#include "scslab/sums/sums.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "scslab/common.hpp"
#include "scslab/special/arith.hpp"

namespace scslab::sums {
namespace {

long floor_to_long(double X) { return X < 1.0 ? 0 : static_cast<long>(std::floor(X)); }

void require_table(const HeckeEigenform& f, long needed, const char* who) {
  if (needed > 0 && static_cast<std::size_t>(needed) > f.table_length()) {
    throw InsufficientTable(std::string(who) + ": eigenvalue table too short", static_cast<std::size_t>(needed));
  }
}

void require_shift(long h, const char* who) {
  if (h < 1) throw DomainError(std::string(who) + ": shift h must be a positive integer");
}

}  // namespace

double sharp_sum_range(const HeckeEigenform& f, long h, long n_first, long n_last) {
  require_shift(h, "sharp_sum");
  n_first = std::max(n_first, 1L);
  if (n_last < n_first) return 0.0;
  require_table(f, n_last + h, "sharp_sum");
  CompensatedSum acc;
  for (long n = n_first; n <= n_last; ++n) acc += f[static_cast<std::size_t>(n)] * f[static_cast<std::size_t>(n + h)];
  return acc.value();
}

double sharp_sum(const HeckeEigenform& f, double X, long h) { return sharp_sum_range(f, h, 1, floor_to_long(X)); }

double weighted_sum(const HeckeEigenform& f, double X, long h) {
  require_shift(h, "weighted_sum");
  const long top = floor_to_long(X);
  if (top <= h) return 0.0;
  require_table(f, top, "weighted_sum");
  const double e = 0.5 * (f.k - 1);
  CompensatedSum acc;
  for (long n = 1; n + h <= top; ++n) {
    const double w = std::exp(e * std::log1p(-static_cast<double>(h) / static_cast<double>(n + h)));
    acc += f[static_cast<std::size_t>(n + h)] * f[static_cast<std::size_t>(n)] * w;
  }
  return acc.value();
}

IndexRange smooth_sum_range(double X, long h, const Window& W) {
  if (!(X > 0.0)) throw DomainError("smooth_sum: X must be positive");
  const double half = 0.5 * static_cast<double>(h);
  IndexRange r;
  r.first = std::max(1L, static_cast<long>(std::ceil(W.a() * X - half)));
  r.last = static_cast<long>(std::floor(W.A() * X - half));
  // tidy rounding at the endpoints against the exact support test
  while (r.first > 1 && (static_cast<double>(r.first - 1) + half) / X >= W.a()) --r.first;
  while (r.first <= r.last && (static_cast<double>(r.first) + half) / X < W.a()) ++r.first;
  while ((static_cast<double>(r.last + 1) + half) / X <= W.A()) ++r.last;
  while (r.last >= r.first && (static_cast<double>(r.last) + half) / X > W.A()) --r.last;
  return r;
}

double smooth_sum(const HeckeEigenform& f, double X, long h, const Window& W) {
  require_shift(h, "smooth_sum");
  const IndexRange r = smooth_sum_range(X, h, W);
  if (r.last < r.first) return 0.0;
  require_table(f, r.last + h, "smooth_sum");
  const double half = 0.5 * static_cast<double>(h);
  CompensatedSum acc;
  for (long n = r.first; n <= r.last; ++n) {
    const double w = W((static_cast<double>(n) + half) / X);
    if (w == 0.0) continue;
    acc += f[static_cast<std::size_t>(n)] * f[static_cast<std::size_t>(n + h)] * w;
  }
  return acc.value();
}

DirichletResult dirichlet_series(const HeckeEigenform& f, std::complex<double> s, long h, std::size_t N_terms) {
  require_shift(h, "dirichlet_series");
  const double sigma = s.real(), t = s.imag();
  if (!(sigma > 1.0)) throw DomainError("dirichlet_series: only Re(s) > 1 is supported (no continuation)");
  require_table(f, static_cast<long>(N_terms) + h, "dirichlet_series");
  const double e = 0.5 * (f.k - 1), power = sigma + f.k - 1;
  CompensatedSum re, im;
  for (std::size_t n = 1; n <= N_terms; ++n) {
    const double dn = static_cast<double>(n), m = dn + static_cast<double>(h);
    const double lam = f[n] * f[n + static_cast<std::size_t>(h)];
    if (lam == 0.0) continue;
    const double denom = 2.0 * m;
    const double mag = std::exp(e * (std::log(dn) + std::log(m)) - power * std::log(denom));
    const double phase = -t * std::log(denom);
    re += lam * mag * std::cos(phase);
    im += lam * mag * std::sin(phase);
  }
  DirichletResult out;
  out.value = {re.value(), im.value()};
  out.terms = N_terms;
  // |term_n| <= 2^-(sigma+k-1) d(n) d(n+h) (n+h)^-sigma and d(n) <= C (n+h)^delta
  const double delta = 0.25 * (sigma - 1.0);
  double C = 0.0;
  try {
    C = special::divisor_bound_constant(delta);
  } catch (const DomainError&) {
    out.tail_bound = std::numeric_limits<double>::infinity();
    return out;
  }
  const double start = static_cast<double>(N_terms) + static_cast<double>(h);
  const double expo = sigma - 1.0 - 2.0 * delta;
  out.tail_bound = std::exp(-power * std::log(2.0) + 2.0 * std::log(C) - expo * std::log(start)) / expo;
  return out;
}

double rankin_statistic(const HeckeEigenform& f, double X) {
  const long top = floor_to_long(X);
  if (top < 1) return 0.0;
  require_table(f, top, "rankin_statistic");
  CompensatedSum acc;
  for (long n = 1; n <= top; ++n) acc += f[static_cast<std::size_t>(n)] * f[static_cast<std::size_t>(n)];
  return acc.value();
}

}  // namespace scslab::sums
