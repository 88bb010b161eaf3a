#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

namespace scslab::special {

/// sigma_e(n) = sum of d^e over the positive divisors d of n. Throws DomainError for n = 0.
mpz_class sigma(unsigned e, std::uint64_t n);

/// Number of positive divisors of n. Throws DomainError for n = 0.
std::uint64_t divisor_count(std::uint64_t n);

/// Positive divisors of n in ascending order. Throws DomainError for n = 0.
std::vector<std::uint64_t> divisors(std::uint64_t n);

/// Table d(0..N) with d(0) = 0.
std::vector<std::uint32_t> divisor_count_table(std::uint64_t N);

/// Table sigma_e(0..N) with sigma_e(0) = 0.
std::vector<mpz_class> sigma_table(unsigned e, std::uint64_t N);

/// Primes p <= N in ascending order.
std::vector<std::uint32_t> primes_up_to(std::uint32_t N);

std::uint64_t gcd(std::uint64_t a, std::uint64_t b);

/// Inverse of a modulo m by the extended Euclidean algorithm; requires gcd(a, m) = 1.
std::int64_t inverse_mod(std::int64_t a, std::int64_t m);

/// Smallest C with d(n) <= C n^delta for every n >= 1 (product over p < 2^(1/delta)).
double divisor_bound_constant(double delta);

}  // namespace scslab::special
