#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace scslab {

/// Precondition violated by the caller (bad weight, n = 0, Re(s) <= 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A coefficient or eigenvalue table is too short for the requested operation.
/// `required()` is the minimum table length that would have worked.
class InsufficientTable : public std::runtime_error {
 public:
  InsufficientTable(const std::string& what, std::size_t required)
      : std::runtime_error(what + " (required table length " + std::to_string(required) + ")"),
        required_(required) {}

  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t required_;
};

/// A numerical procedure failed to meet its own consistency checks.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Neumaier variant of Kahan summation. Terms must be added in a fixed order
/// for results to be reproducible bit-for-bit.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double init) : sum_(init) {}

  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Unevaluated sum hi + lo carrying roughly 106 bits of significand.
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  void add(double x) noexcept {
    const double s = hi + x;
    const double bb = s - hi;
    const double err = (hi - (s - bb)) + (x - bb);
    lo += err;
    hi = s + lo;
    lo = lo - (hi - s);
  }

  void add(const DoubleDouble& x) noexcept {
    add(x.hi);
    add(x.lo);
  }

  /// Adds the exact product a*b (a, b doubles) using an FMA-based split.
  void add_product(double a, double b) noexcept {
    const double p = a * b;
    const double e = std::fma(a, b, -p);
    add(p);
    add(e);
  }

  double value() const noexcept { return hi + lo; }
};

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 6.283185307179586476925286766559005768;

}  // namespace scslab
