#include "scslab/special/arith.hpp"

#include <algorithm>
#include <cmath>

#include "scslab/common.hpp"

namespace scslab::special {

mpz_class sigma(unsigned e, std::uint64_t n) {
  if (n == 0) throw DomainError("sigma: n must be positive");
  mpz_class total = 0;
  mpz_class term;
  for (std::uint64_t d : divisors(n)) {
    mpz_ui_pow_ui(term.get_mpz_t(), d, e);
    total += term;
  }
  return total;
}

std::uint64_t divisor_count(std::uint64_t n) {
  if (n == 0) throw DomainError("divisor_count: n must be positive");
  std::uint64_t count = 1;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    std::uint64_t e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    count *= e + 1;
  }
  if (n > 1) count *= 2;
  return count;
}

std::vector<std::uint64_t> divisors(std::uint64_t n) {
  if (n == 0) throw DomainError("divisors: n must be positive");
  std::vector<std::uint64_t> small, large;
  for (std::uint64_t d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      small.push_back(d);
      if (d != n / d) large.push_back(n / d);
    }
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

std::vector<std::uint32_t> divisor_count_table(std::uint64_t N) {
  std::vector<std::uint32_t> d(N + 1, 0);
  for (std::uint64_t a = 1; a <= N; ++a) {
    for (std::uint64_t m = a; m <= N; m += a) ++d[m];
  }
  return d;
}

std::vector<mpz_class> sigma_table(unsigned e, std::uint64_t N) {
  std::vector<mpz_class> s(N + 1);
  mpz_class power;
  for (std::uint64_t a = 1; a <= N; ++a) {
    mpz_ui_pow_ui(power.get_mpz_t(), a, e);
    for (std::uint64_t m = a; m <= N; m += a) s[m] += power;
  }
  return s;
}

std::vector<std::uint32_t> primes_up_to(std::uint32_t N) {
  std::vector<std::uint32_t> out;
  if (N < 2) return out;
  std::vector<bool> composite(static_cast<std::size_t>(N) + 1, false);
  for (std::uint64_t p = 2; p <= N; ++p) {
    if (composite[p]) continue;
    out.push_back(static_cast<std::uint32_t>(p));
    for (std::uint64_t m = p * p; m <= N; m += p) composite[m] = true;
  }
  return out;
}

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
  while (b) {
    const auto t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::int64_t inverse_mod(std::int64_t a, std::int64_t m) {
  if (m == 1) return 0;
  std::int64_t old_r = ((a % m) + m) % m, r = m;
  std::int64_t old_s = 1, s = 0;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    std::int64_t t = old_r - q * r;
    old_r = r;
    r = t;
    t = old_s - q * s;
    old_s = s;
    s = t;
  }
  if (old_r != 1) throw DomainError("inverse_mod: argument not invertible");
  return ((old_s % m) + m) % m;
}

double divisor_bound_constant(double delta) {
  if (!(delta > 0.0)) throw DomainError("divisor_bound_constant: delta must be positive");
  const double limit = std::pow(2.0, 1.0 / delta);
  if (limit > 4.0e7) throw DomainError("divisor_bound_constant: delta too small");
  double c = 1.0;
  for (std::uint32_t p : primes_up_to(static_cast<std::uint32_t>(limit))) {
    const double pd = std::pow(static_cast<double>(p), delta);
    // (e + 1) / p^(e delta) is unimodal in e
    double best = 1.0, prev = 1.0, cur = 1.0;
    for (int e = 1;; ++e) {
      cur /= pd;
      const double v = (e + 1) * cur;
      if (v < prev) break;
      best = std::max(best, v);
      prev = v;
    }
    c *= best;
  }
  return c;
}

}  // namespace scslab::special
