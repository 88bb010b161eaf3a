#include "scslab/special/kloosterman.hpp"

#include <mutex>
#include <string>

#include <quadmath.h>

#include "scslab/common.hpp"
#include "scslab/special/arith.hpp"

namespace scslab::special {

namespace detail {

/// Units, inverses and quad-precision unit-circle tables for one modulus.
struct KloostermanModulus {
  std::int64_t c = 1;
  std::vector<std::int64_t> units;
  std::vector<std::int64_t> inverses;
  std::vector<__float128> cosines;  // cos(2 pi j / c)
  std::vector<__float128> sines;

  explicit KloostermanModulus(std::int64_t mod) : c(mod), cosines(static_cast<std::size_t>(mod)), sines(static_cast<std::size_t>(mod)) {
    for (std::int64_t x = 0; x < c; ++x) {
      if (gcd(static_cast<std::uint64_t>(x), static_cast<std::uint64_t>(c)) == 1 || c == 1) {
        units.push_back(x);
        inverses.push_back(inverse_mod(x, c));
      }
    }
    for (std::int64_t j = 0; j < c; ++j) {
      const __float128 t = 2 * M_PIq * static_cast<__float128>(j) / static_cast<__float128>(c);
      cosines[static_cast<std::size_t>(j)] = cosq(t);
      sines[static_cast<std::size_t>(j)] = sinq(t);
    }
  }

  double sum(std::int64_t m, std::int64_t n) const {
    m = ((m % c) + c) % c;
    n = ((n % c) + c) % c;
    std::vector<std::uint32_t> count(static_cast<std::size_t>(c), 0);
    for (std::size_t i = 0; i < units.size(); ++i) {
      const auto r = static_cast<std::size_t>((m * units[i] + n * inverses[i]) % c);
      ++count[r];
    }
    __float128 re = 0, im = 0;
    for (std::size_t j = 0; j < count.size(); ++j) {
      if (count[j] == 0) continue;
      re += count[j] * cosines[j];
      im += count[j] * sines[j];
    }
    if (fabsq(im) > 1e-10Q * c) {
      throw NumericalFailure("kloosterman: imaginary part " + std::to_string(static_cast<double>(im)) +
                             " exceeds tolerance for c = " + std::to_string(c));
    }
    return static_cast<double>(re);
  }
};

}  // namespace detail

double kloosterman(std::int64_t m, std::int64_t n, std::int64_t c) {
  if (c < 1) throw DomainError("kloosterman: modulus must be positive");
  return detail::KloostermanModulus(c).sum(m, n);
}

const detail::KloostermanModulus& KloostermanTable::modulus(std::int64_t c) {
  {
    std::shared_lock lock(mutex_);
    if (auto it = moduli_.find(c); it != moduli_.end()) return *it->second;
  }
  auto fresh = std::make_shared<const detail::KloostermanModulus>(c);
  std::unique_lock lock(mutex_);
  return *moduli_.emplace(c, std::move(fresh)).first->second;
}

double KloostermanTable::operator()(std::int64_t m, std::int64_t n, std::int64_t c) {
  if (c < 1) throw DomainError("kloosterman: modulus must be positive");
  const auto key = std::make_tuple(((m % c) + c) % c, ((n % c) + c) % c, c);
  {
    std::shared_lock lock(mutex_);
    if (auto it = values_.find(key); it != values_.end()) return it->second;
  }
  const double v = modulus(c).sum(std::get<0>(key), std::get<1>(key));
  std::unique_lock lock(mutex_);
  values_.emplace(key, v);
  max_c_ = std::max(max_c_, c);
  return v;
}

std::int64_t KloostermanTable::max_c() const {
  std::shared_lock lock(mutex_);
  return max_c_;
}

std::size_t KloostermanTable::size() const {
  std::shared_lock lock(mutex_);
  return values_.size();
}

}  // namespace scslab::special
