#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <gmpxx.h>

namespace scslab::qarith::ntt {

/// Largest transform length supported by the prime family p = c * 2^24 + 1.
inline constexpr std::size_t kMaxTransformLength = std::size_t{1} << 24;

/// Word-size NTT primes p = c * 2^24 + 1 < 2^62 in a fixed (descending) order.
/// The first `count` primes are generated on demand and cached.
std::span<const std::uint64_t> primes(std::size_t count);

/// Exact product of two integer polynomials truncated to `out_len` coefficients.
/// Residues are multiplied by number-theoretic transforms modulo as many primes
/// as the coefficient bound requires and lifted back with Garner's CRT.
std::vector<mpz_class> multiply(std::span<const mpz_class> a, std::span<const mpz_class> b,
                                std::size_t out_len);

/// Same as multiply(a, a, out_len), one forward transform per prime.
std::vector<mpz_class> square(std::span<const mpz_class> a, std::size_t out_len);

/// Number of primes whose product exceeds 2^(bits + 1).
std::size_t primes_for_bits(std::size_t bits);

}  // namespace scslab::qarith::ntt
