#include "scslab/special/bessel.hpp"

#include <cmath>
#include <limits>

#include <quadmath.h>

#include "scslab/common.hpp"

namespace scslab::special {
namespace {

constexpr double kSeriesReach = 20.0;       // x^2 / (4 (nu + 1)) limit for the series
constexpr double kSeriesCancellation = 1e18;  // max term / |sum| accepted in quad precision
constexpr double kHankelTolerance = 1e-17;
constexpr double kForwardMargin = 3.0;  // orders kept below x - margin x^(1/3)

bool ascending_series(int nu, double x, double& out) {
  if (x * x / (4.0 * (nu + 1)) > kSeriesReach) return false;
  const __float128 q = -static_cast<__float128>(x) * x / 4;
  __float128 t = 1, s = 1, tmax = 1;
  for (int m = 1; m < 100000; ++m) {
    t *= q / (static_cast<__float128>(m) * (m + nu));
    s += t;
    if (fabsq(t) > tmax) tmax = fabsq(t);
    if (fabsq(t) < 1e-36Q * fabsq(s)) break;
  }
  if (s == 0 || tmax / fabsq(s) > kSeriesCancellation) return false;
  const __float128 log_pref = nu == 0 ? 0 : nu * logq(static_cast<__float128>(x) / 2) - lgammaq(nu + 1.0Q);
  out = static_cast<double>(expq(log_pref) * s);
  return true;
}

bool hankel(int nu, double x, double& out) {
  const __float128 mu = 4.0Q * nu * nu;
  const __float128 ex = 8.0Q * x;
  __float128 p = 1, q = 0, t = 1, prev = 1;
  bool converged = false;
  for (int k = 1; k < 200; ++k) {
    const __float128 odd = 2.0Q * k - 1;
    t *= (mu - odd * odd) / (k * ex);
    if (k > 1 && fabsq(t) > fabsq(prev)) break;
    switch (k % 4) {
      case 1: q += t; break;
      case 2: p -= t; break;
      case 3: q -= t; break;
      default: p += t; break;
    }
    prev = t;
    if (fabsq(t) < kHankelTolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) return false;
  const __float128 chi = static_cast<__float128>(x) - (nu / 2.0Q + 0.25Q) * M_PIq;
  const __float128 amp = sqrtq(2 / (M_PIq * x));
  out = static_cast<double>(amp * (p * cosq(chi) - q * sinq(chi)));
  return true;
}

// upward from J_0 and J_1 (both by Hankel's expansion); stable while n < x
bool forward(int nu, double x, double& out) {
  if (x < 40.0 || static_cast<double>(nu) > x - kForwardMargin * std::cbrt(x)) return false;
  double j0 = 0.0, j1 = 0.0;
  if (!hankel(0, x, j0) || !hankel(1, x, j1)) return false;
  if (nu == 0) {
    out = j0;
    return true;
  }
  const long double two_over_x = 2.0L / x;
  long double prev = j0, cur = j1;
  for (int n = 1; n < nu; ++n) {
    const long double next = static_cast<long double>(n) * two_over_x * cur - prev;
    prev = cur;
    cur = next;
  }
  out = static_cast<double>(cur);
  return true;
}

double miller(int nu, double x) {
  const double top = std::max<double>(nu, x);
  long M = static_cast<long>(top + std::sqrt(600.0 * top) + 20.0);
  if (M % 2) ++M;
  const long double two_over_x = 2.0L / x;
  constexpr long double kBig = 1e2000L, kSmall = 1e-2000L;

  long double jp1 = 0.0L, j = 1e-300L;
  long double norm = 0.0L, comp = 0.0L, value = 0.0L;
  auto visit = [&](long n) {
    if (n == nu) value = j;
    if (n % 2 == 0) {
      const long double term = n == 0 ? j : 2.0L * j;
      const long double y = term - comp;
      const long double s = norm + y;
      comp = (s - norm) - y;
      norm = s;
    }
  };
  visit(M);
  for (long n = M; n >= 1; --n) {
    const long double jm1 = static_cast<long double>(n) * two_over_x * j - jp1;
    jp1 = j;
    j = jm1;
    visit(n - 1);
    if (fabsl(j) > kBig) {
      j *= kSmall;
      jp1 *= kSmall;
      norm *= kSmall;
      comp *= kSmall;
      value *= kSmall;
    }
  }
  return static_cast<double>(value / norm);
}

}  // namespace

double bessel_j(int nu, double x) {
  if (!(x >= 0.0)) throw DomainError("bessel_j: argument must be non-negative");
  if (nu < 0) throw DomainError("bessel_j: order must be non-negative");
  if (x == 0.0) return nu == 0 ? 1.0 : 0.0;
  double out = 0.0;
  if (ascending_series(nu, x, out)) return out;
  if (x >= 2.0 * nu + 40.0 && hankel(nu, x, out)) return out;
  if (forward(nu, x, out)) return out;
  return miller(nu, x);
}

double log_bessel_tail_bound(int k, double x_max, long c0) {
  if (k < 4) throw DomainError("bessel_tail_bound: weight below 4 makes the c-sum diverge");
  if (c0 < 1) throw DomainError("bessel_tail_bound: c0 must be at least 1");
  if (x_max < 0.0) throw DomainError("bessel_tail_bound: x_max must be non-negative");
  if (x_max == 0.0) return -std::numeric_limits<double>::infinity();
  const double s = k - 1.0;
  const double t = static_cast<double>(c0) + 1.0;
  // sum_{c > c0} c^-s <= t^-s (1 + t / (s - 1))
  return s * std::log(std::exp(1.0) * 4.0 * kPi * x_max / (2.0 * k)) - s * std::log(t) +
         std::log1p(t / (s - 1.0));
}

double bessel_tail_bound(int k, double x_max, long c0) {
  const double lb = log_bessel_tail_bound(k, x_max, c0);
  if (std::isinf(lb) && lb < 0) return 0.0;
  const double b = std::exp(lb);
  return b > 0.0 ? b : std::numeric_limits<double>::denorm_min();
}

long bessel_tail_cutoff(int k, double x_max, double tol) {
  if (!(tol > 0.0)) throw DomainError("bessel_tail_cutoff: tolerance must be positive");
  const double target = std::log(tol);
  if (log_bessel_tail_bound(k, x_max, 1) <= target) return 1;
  long lo = 1, hi = 2;
  while (log_bessel_tail_bound(k, x_max, hi) > target) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (log_bessel_tail_bound(k, x_max, mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace scslab::special
