#include "scslab/qarith/ntt.hpp"

#include <algorithm>
#include <bit>
#include <mutex>
#include <stdexcept>

namespace scslab::qarith::ntt {
namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

constexpr unsigned kTwoAdicity = 24;
constexpr std::size_t kSchoolbookCutoff = 24;
constexpr std::size_t kMaxPrimes = 4096;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

u64 primitive_root(u64 p) {
  std::vector<u64> factors{2};
  u64 c = (p - 1) >> kTwoAdicity;
  while ((c & 1) == 0) c >>= 1;
  for (u64 f = 3; f * f <= c; f += 2) {
    if (c % f == 0) {
      factors.push_back(f);
      while (c % f == 0) c /= f;
    }
  }
  if (c > 1) factors.push_back(c);
  for (u64 g = 2;; ++g) {
    bool ok = true;
    for (u64 f : factors) {
      if (powmod(g, (p - 1) / f, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
}

/// Montgomery arithmetic modulo an odd p < 2^62 with R = 2^64.
struct Montgomery {
  u64 p = 0;
  u64 neg_inv = 0;  // -p^{-1} mod 2^64
  u64 r2 = 0;       // R^2 mod p

  explicit Montgomery(u64 mod) : p(mod) {
    u64 inv = p;
    for (int i = 0; i < 6; ++i) inv *= 2 - p * inv;
    neg_inv = ~inv + 1;
    const u128 r = (static_cast<u128>(1) << 64) % p;
    r2 = static_cast<u64>(r * r % p);
  }

  u64 reduce(u128 t) const {
    const u64 m = static_cast<u64>(t) * neg_inv;
    const u64 res = static_cast<u64>((t + static_cast<u128>(m) * p) >> 64);
    return res >= p ? res - p : res;
  }
  u64 mul(u64 a, u64 b) const { return reduce(static_cast<u128>(a) * b); }
  u64 to(u64 a) const { return mul(a, r2); }
  u64 from(u64 a) const { return reduce(a); }
  u64 add(u64 a, u64 b) const {
    const u64 s = a + b;
    return s >= p ? s - p : s;
  }
  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + p - b; }
  u64 pow(u64 a_mont, u64 e) const {
    u64 r = to(1);
    while (e) {
      if (e & 1) r = mul(r, a_mont);
      a_mont = mul(a_mont, a_mont);
      e >>= 1;
    }
    return r;
  }
};

struct PrimeContext {
  Montgomery mont;
  u64 root;  // primitive root, normal form
};

std::mutex g_prime_mutex;
std::vector<u64> g_primes;
std::vector<PrimeContext> g_contexts;

void ensure_primes(std::size_t count) {
  std::lock_guard lock(g_prime_mutex);
  if (g_primes.size() >= count) return;
  // spans and references handed out must stay valid while the family grows
  if (count > kMaxPrimes) throw std::length_error("ntt: coefficient bound needs too many primes");
  g_primes.reserve(kMaxPrimes);
  g_contexts.reserve(kMaxPrimes);
  u64 c = g_primes.empty() ? ((u64{1} << 62) - 1) >> kTwoAdicity
                           : ((g_primes.back() - 1) >> kTwoAdicity) - 1;
  while (g_primes.size() < count) {
    const u64 p = (c << kTwoAdicity) + 1;
    if (is_prime_u64(p)) {
      g_primes.push_back(p);
      g_contexts.push_back(PrimeContext{Montgomery(p), primitive_root(p)});
    }
    if (c == 0) throw std::runtime_error("ntt: exhausted NTT prime family");
    --c;
  }
}

const PrimeContext& context(std::size_t i) {
  std::lock_guard lock(g_prime_mutex);
  return g_contexts[i];
}

std::size_t bit_length(const mpz_class& x) { return x == 0 ? 0 : mpz_sizeinbase(x.get_mpz_t(), 2); }

std::size_t max_bits(std::span<const mpz_class> a) {
  std::size_t b = 0;
  for (const auto& x : a) b = std::max(b, bit_length(x));
  return b;
}

void transform(std::vector<u64>& a, const Montgomery& m, const std::vector<u64>& roots, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t step = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const u64 w = roots[j * step];
        const u64 u = a[i + j];
        const u64 v = m.mul(a[i + j + half], w);
        a[i + j] = m.add(u, v);
        a[i + j + half] = m.sub(u, v);
      }
    }
  }
  if (inverse) {
    std::reverse(a.begin() + 1, a.end());
    const u64 n_inv = m.pow(m.to(static_cast<u64>(n % m.p)), m.p - 2);
    for (auto& x : a) x = m.mul(x, n_inv);
  }
}

/// roots[j] = w^j (Montgomery form) for a primitive n-th root of unity w.
std::vector<u64> root_table(const PrimeContext& ctx, std::size_t n) {
  const auto& m = ctx.mont;
  const u64 w = m.to(powmod(ctx.root, (m.p - 1) / n, m.p));
  std::vector<u64> roots(n / 2);
  u64 cur = m.to(1);
  for (std::size_t j = 0; j < n / 2; ++j) {
    roots[j] = cur;
    cur = m.mul(cur, w);
  }
  return roots;
}

void load_residues(std::span<const mpz_class> a, std::vector<u64>& out, const Montgomery& m) {
  std::fill(out.begin(), out.end(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = m.to(mpz_fdiv_ui(a[i].get_mpz_t(), m.p));
  }
}

/// Garner reconstruction of signed coefficients from residues[prime][index].
std::vector<mpz_class> lift(const std::vector<std::vector<u64>>& residues, std::size_t out_len) {
  const std::size_t count = residues.size();
  const auto plist = primes(count);
  std::vector<const Montgomery*> mont(count);
  for (std::size_t i = 0; i < count; ++i) mont[i] = &context(i).mont;

  // inv[i][j] = p_i^{-1} mod p_j (Montgomery form), i < j
  std::vector<std::vector<u64>> inv(count, std::vector<u64>(count, 0));
  for (std::size_t j = 0; j < count; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      inv[i][j] = mont[j]->to(powmod(plist[i] % plist[j], plist[j] - 2, plist[j]));
    }
  }

  mpz_class modulus = 1;
  for (std::size_t i = 0; i < count; ++i) modulus *= plist[i];
  const mpz_class half = modulus / 2;

  std::vector<mpz_class> out(out_len);
  std::vector<u64> digits(count);
  for (std::size_t idx = 0; idx < out_len; ++idx) {
    for (std::size_t j = 0; j < count; ++j) {
      const Montgomery& m = *mont[j];
      u64 t = m.to(residues[j][idx]);
      for (std::size_t i = 0; i < j; ++i) {
        t = m.mul(m.sub(t, m.to(digits[i] % m.p)), inv[i][j]);
      }
      digits[j] = m.from(t);
    }
    mpz_class& v = out[idx];
    v = digits[count - 1];
    for (std::size_t i = count - 1; i-- > 0;) {
      mpz_mul_ui(v.get_mpz_t(), v.get_mpz_t(), plist[i]);
      mpz_add_ui(v.get_mpz_t(), v.get_mpz_t(), digits[i]);
    }
    if (v > half) v -= modulus;
  }
  return out;
}

std::vector<mpz_class> schoolbook(std::span<const mpz_class> a, std::span<const mpz_class> b, std::size_t out_len) {
  std::vector<mpz_class> out(out_len);
  for (std::size_t i = 0; i < a.size() && i < out_len; ++i) {
    if (a[i] == 0) continue;
    const std::size_t lim = std::min(b.size(), out_len - i);
    for (std::size_t j = 0; j < lim; ++j) {
      mpz_addmul(out[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
  }
  return out;
}

std::vector<mpz_class> convolve(std::span<const mpz_class> a, std::span<const mpz_class> b, std::size_t out_len,
                                bool same) {
  if (out_len == 0) return {};
  a = a.first(std::min(a.size(), out_len));
  b = b.first(std::min(b.size(), out_len));
  if (a.empty() || b.empty()) return std::vector<mpz_class>(out_len);
  if (std::min(a.size(), b.size()) <= kSchoolbookCutoff) return schoolbook(a, b, out_len);

  const std::size_t bits_a = max_bits(a);
  const std::size_t bits_b = same ? bits_a : max_bits(b);
  if (bits_a == 0 || bits_b == 0) return std::vector<mpz_class>(out_len);
  const std::size_t min_len = std::min(a.size(), b.size());
  const std::size_t bound_bits = bits_a + bits_b + std::bit_width(min_len);
  const std::size_t count = primes_for_bits(bound_bits);
  ensure_primes(count);

  const std::size_t n = std::bit_ceil(a.size() + b.size() - 1);
  if (n > kMaxTransformLength) throw std::length_error("ntt: transform length exceeds 2^24");

  std::vector<std::vector<u64>> residues(count);
  std::vector<u64> fa(n), fb(n);
  for (std::size_t pi = 0; pi < count; ++pi) {
    const PrimeContext& ctx = context(pi);
    const Montgomery& m = ctx.mont;
    const auto roots = root_table(ctx, n);
    load_residues(a, fa, m);
    transform(fa, m, roots, false);
    if (same) {
      for (std::size_t i = 0; i < n; ++i) fa[i] = m.mul(fa[i], fa[i]);
    } else {
      load_residues(b, fb, m);
      transform(fb, m, roots, false);
      for (std::size_t i = 0; i < n; ++i) fa[i] = m.mul(fa[i], fb[i]);
    }
    transform(fa, m, roots, true);
    auto& r = residues[pi];
    r.resize(out_len);
    const std::size_t lim = std::min(out_len, n);
    for (std::size_t i = 0; i < lim; ++i) r[i] = m.from(fa[i]);
  }
  return lift(residues, out_len);
}

}  // namespace

std::span<const std::uint64_t> primes(std::size_t count) {
  ensure_primes(count);
  std::lock_guard lock(g_prime_mutex);
  return std::span<const std::uint64_t>(g_primes.data(), count);
}

std::size_t primes_for_bits(std::size_t bits) {
  // every prime in the family exceeds 2^61
  return (bits + 2 + 60) / 61;
}

std::vector<mpz_class> multiply(std::span<const mpz_class> a, std::span<const mpz_class> b, std::size_t out_len) {
  return convolve(a, b, out_len, false);
}

std::vector<mpz_class> square(std::span<const mpz_class> a, std::size_t out_len) {
  return convolve(a, a, out_len, true);
}

}  // namespace scslab::qarith::ntt
