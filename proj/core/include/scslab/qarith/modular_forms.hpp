#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "scslab/qarith/qseries.hpp"

namespace scslab::qarith {

/// Delta = q prod (1 - q^n)^24 = sum tau(n) q^n, truncated at N >= 1.
/// Built from the sparse Jacobi series prod (1 - q^n)^3 and three squarings.
QSeries delta_qexp(std::size_t N);

/// Normalized E_4 = 1 + 240 sum sigma_3(n) q^n or E_6 = 1 - 504 sum sigma_5(n) q^n.
QSeries eisenstein_qexp(int weight, std::size_t N);

/// dim S_k(SL_2(Z)) for even k >= 0; zero for odd or negative k.
int cusp_form_dimension(int k);

/// Memoized generators E_4^a E_6^b and Delta^c at a fixed truncation order,
/// shared between bases of several weights. Thread-safe.
class MonomialCache {
 public:
  explicit MonomialCache(std::size_t order) : order_(order) {}

  std::size_t order() const noexcept { return order_; }

  /// Delta^c, c >= 0.
  const QSeries& delta_power(int c);
  /// A fixed monomial E_4^a E_6^b with b in {0, 1} of the given weight
  /// (weight in {0, 4, 6, 8, ...}).
  const QSeries& eisenstein_monomial(int weight);

 private:
  std::size_t order_;
  std::mutex mutex_;
  std::map<int, QSeries> delta_powers_;
  std::map<int, QSeries> eisenstein_;
};

/// Echelonized integral basis of S_k: element i (0-based) has coefficient
/// delta_{i+1, j} at q^j for 1 <= j <= dim S_k. Throws DomainError for odd
/// k or k < 4, InsufficientTable if N < dim S_k.
std::vector<QSeries> victor_miller_basis(int k, std::size_t N);
std::vector<QSeries> victor_miller_basis(int k, MonomialCache& cache);

/// Small dense matrix of exact rationals, row-major.
struct ExactMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<mpq_class> data;

  ExactMatrix() = default;
  ExactMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

  mpq_class& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const mpq_class& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  mpq_class trace() const;
  bool is_identity() const;
};

/// Matrix of T_m on the echelonized basis: column j holds the first d
/// coefficients of T_m f_j, from a_{T_m f}(n) = sum_{d | (m, n)} d^{k-1} a_f(mn/d^2).
/// Needs basis order >= m * dim; otherwise throws InsufficientTable.
ExactMatrix hecke_matrix(int k, unsigned m, std::span<const QSeries> basis);

/// Coefficient n of T_m f for a weight-k series f.
mpz_class hecke_coefficient(int k, unsigned m, const QSeries& f, std::size_t n);

/// Exact rank over Q of the given integer vectors (used to cross-check dimensions).
std::size_t rational_rank(const std::vector<std::vector<mpz_class>>& rows);

}  // namespace scslab::qarith
