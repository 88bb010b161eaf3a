#pragma once

namespace scslab::special {

/// J_nu(x) for integer order nu >= 0 and x >= 0.
/// Regimes: ascending series in quad precision while its cancellation is mild,
/// Hankel's expansion for x >= 2 nu + 40 when it converges to double precision,
/// upward recurrence from J_0, J_1 when nu < x - 3 x^(1/3) and x >= 40,
/// otherwise Miller's backward recurrence normalized by J_0 + 2 sum J_2k = 1.
/// Values below the double range flush to zero. Throws DomainError for x < 0.
double bessel_j(int nu, double x);

/// Rigorous upper bound on sum_{c > c0} |S(m,n;c)| / c * |J_{k-1}(4 pi x_max / c)|
/// from |S| <= c and |J_{k-1}(x)| <= (e x / 2k)^(k-1). Never returns 0; a bound
/// below the double range is reported as the smallest subnormal.
/// Throws DomainError for k < 4 or c0 < 1.
double bessel_tail_bound(int k, double x_max, long c0);

/// Natural logarithm of the same majorant (finite even when the bound underflows).
double log_bessel_tail_bound(int k, double x_max, long c0);

/// Smallest c0 >= 1 whose tail majorant is at most tol (tol > 0).
long bessel_tail_cutoff(int k, double x_max, double tol);

}  // namespace scslab::special
