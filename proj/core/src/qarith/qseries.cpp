#include "scslab/qarith/qseries.hpp"

#include <algorithm>
#include <stdexcept>

#include "scslab/qarith/ntt.hpp"

namespace scslab::qarith {

QSeries::QSeries(std::size_t order) : coeffs_(order + 1) {}

QSeries::QSeries(std::vector<mpz_class> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw std::invalid_argument("QSeries: need at least one coefficient");
}

QSeries QSeries::truncated(std::size_t order) const {
  if (order > this->order()) throw std::invalid_argument("QSeries::truncated: order exceeds stored order");
  return QSeries(std::vector<mpz_class>(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(order) + 1));
}

std::size_t QSeries::max_bits() const {
  std::size_t b = 0;
  for (const auto& c : coeffs_) {
    if (c != 0) b = std::max(b, mpz_sizeinbase(c.get_mpz_t(), 2));
  }
  return b;
}

std::size_t QSeries::valuation() const {
  for (std::size_t n = 0; n < coeffs_.size(); ++n) {
    if (coeffs_[n] != 0) return n;
  }
  return coeffs_.size();
}

QSeries& QSeries::operator+=(const QSeries& other) {
  if (other.order() < order()) coeffs_.resize(other.size());
  for (std::size_t n = 0; n < coeffs_.size(); ++n) coeffs_[n] += other.coeffs_[n];
  return *this;
}

QSeries& QSeries::operator-=(const QSeries& other) {
  if (other.order() < order()) coeffs_.resize(other.size());
  for (std::size_t n = 0; n < coeffs_.size(); ++n) coeffs_[n] -= other.coeffs_[n];
  return *this;
}

QSeries& QSeries::operator*=(const mpz_class& scalar) {
  for (auto& c : coeffs_) c *= scalar;
  return *this;
}

void QSeries::submul(const mpz_class& scalar, const QSeries& other) {
  if (scalar == 0) return;
  const std::size_t lim = std::min(size(), other.size());
  for (std::size_t n = 0; n < lim; ++n) {
    mpz_submul(coeffs_[n].get_mpz_t(), scalar.get_mpz_t(), other.coeffs_[n].get_mpz_t());
  }
  if (other.size() < size()) coeffs_.resize(other.size());
}

QSeries QSeries::square() const { return QSeries(ntt::square(coeffs_, size())); }

QSeries QSeries::pow(unsigned exponent) const {
  QSeries result = one(order());
  if (exponent == 0) return result;
  QSeries base = *this;
  bool first = true;
  while (exponent) {
    if (exponent & 1u) {
      result = first ? base : result * base;
      first = false;
    }
    exponent >>= 1;
    if (exponent) base = base.square();
  }
  return result;
}

QSeries operator+(QSeries a, const QSeries& b) { return a += b; }
QSeries operator-(QSeries a, const QSeries& b) { return a -= b; }

QSeries operator*(const QSeries& a, const QSeries& b) {
  const std::size_t len = std::min(a.size(), b.size());
  return QSeries(ntt::multiply(a.coefficients(), b.coefficients(), len));
}

QSeries operator*(const mpz_class& s, QSeries a) { return a *= s; }

QSeries one(std::size_t order) {
  QSeries s(order);
  s[0] = 1;
  return s;
}

QSeries shift_up(const QSeries& a, std::size_t shift) {
  QSeries out(a.order());
  for (std::size_t n = shift; n <= a.order(); ++n) out[n] = a[n - shift];
  return out;
}

}  // namespace scslab::qarith
