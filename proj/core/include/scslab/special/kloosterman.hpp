#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <shared_mutex>
#include <tuple>
#include <vector>

namespace scslab::special {

namespace detail {
struct KloostermanModulus;
}

/// S(m, n; c) = sum over units x mod c of e((m x + n xbar) / c), real.
/// Accumulated in quad precision over residue counts; throws NumericalFailure
/// if the imaginary part exceeds 1e-10 c.
double kloosterman(std::int64_t m, std::int64_t n, std::int64_t c);

/// Memoized Kloosterman sums keyed by (m mod c, n mod c, c), with per-modulus
/// unit/inverse and cosine tables. Safe for concurrent use; racing inserts of
/// the same key store identical values.
class KloostermanTable {
 public:
  double operator()(std::int64_t m, std::int64_t n, std::int64_t c);

  std::int64_t max_c() const;
  std::size_t size() const;

 private:
  const detail::KloostermanModulus& modulus(std::int64_t c);

  mutable std::shared_mutex mutex_;
  std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, double> values_;
  std::map<std::int64_t, std::shared_ptr<const detail::KloostermanModulus>> moduli_;
  std::int64_t max_c_ = 0;
};

}  // namespace scslab::special
