#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <gmpxx.h>

namespace scslab::qarith {

/// Truncated q-expansion sum_{n <= N} c_n q^n with exact integer coefficients.
/// Binary operations on series of different orders truncate to the smaller one.
class QSeries {
 public:
  /// The zero series truncated at order N (N + 1 stored coefficients).
  explicit QSeries(std::size_t order = 0);
  /// Takes ownership of c_0..c_N; an empty vector is rejected.
  explicit QSeries(std::vector<mpz_class> coeffs);

  std::size_t order() const noexcept { return coeffs_.size() - 1; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  const mpz_class& operator[](std::size_t n) const { return coeffs_[n]; }
  mpz_class& operator[](std::size_t n) { return coeffs_[n]; }
  const mpz_class& at(std::size_t n) const { return coeffs_.at(n); }

  std::span<const mpz_class> coefficients() const noexcept { return coeffs_; }

  QSeries truncated(std::size_t order) const;
  /// Largest coefficient bit length.
  std::size_t max_bits() const;
  /// Index of the first nonzero coefficient, or size() for the zero series.
  std::size_t valuation() const;

  QSeries& operator+=(const QSeries& other);
  QSeries& operator-=(const QSeries& other);
  QSeries& operator*=(const mpz_class& scalar);
  /// this -= scalar * other (coefficientwise, truncated to this order)
  void submul(const mpz_class& scalar, const QSeries& other);

  QSeries square() const;
  QSeries pow(unsigned exponent) const;

  friend bool operator==(const QSeries& a, const QSeries& b) = default;

 private:
  std::vector<mpz_class> coeffs_;
};

QSeries operator+(QSeries a, const QSeries& b);
QSeries operator-(QSeries a, const QSeries& b);
QSeries operator*(const QSeries& a, const QSeries& b);
QSeries operator*(const mpz_class& s, QSeries a);

/// The constant series 1 truncated at N.
QSeries one(std::size_t order);
/// Multiplies by q^shift and truncates back to the same order.
QSeries shift_up(const QSeries& a, std::size_t shift);

}  // namespace scslab::qarith
