#pragma once

#include <limits>
#include <string>
#include <vector>

namespace scslab::sums {

enum class WindowKind { SmoothBump, CosineSpline, SharpCutoff };

/// Compactly supported test function W on [a_W, A_W] with closed-form derivatives.
///   smooth-bump   H exp(1 - 1/(1 - t^2)), t = (2y - a - A) / (A - a); C^infinity, L = 6
///   cosine-spline H (1 + cos(pi t)) / 2; C^1 with piecewise W'', L = 2
///   sharp-cutoff  H on the closed interval [a, A]; not smooth, L = 0
class Window {
 public:
  Window(WindowKind kind, double a, double A, double height = 1.0);

  WindowKind kind() const noexcept { return kind_; }
  double a() const noexcept { return a_; }
  double A() const noexcept { return A_; }
  double height() const noexcept { return height_; }
  int max_order() const noexcept;
  bool smooth() const noexcept { return kind_ != WindowKind::SharpCutoff; }

  double operator()(double y) const { return deriv(0, y); }
  /// i-th derivative in y, 0 <= i <= max_order(); zero outside the support.
  double deriv(int i, double y) const;

  /// Same shape with the height multiplied by s.
  Window scaled(double s) const { return Window(kind_, a_, A_, height_ * s); }

  /// "bump:a:A", "cosine:a:A" or "sharp:a:A", with ":H" appended when H != 1.
  std::string descriptor() const;

 private:
  WindowKind kind_;
  double a_, A_, height_;
  // bump derivative numerators P_i(t), coefficients in ascending powers
  std::vector<std::vector<double>> bump_poly_;
};

/// Validates 0 < a <= A (a = 0 is allowed for sharp-cutoff) and builds the window.
Window make_window(WindowKind kind, double a, double A, double height = 1.0);

/// Parses "kind:a:A[:H]" with kind in {bump, smooth-bump, cosine, cosine-spline, sharp, sharp-cutoff}.
Window parse_window(const std::string& spec);

std::string to_string(WindowKind kind);

inline constexpr double kSupNorm = std::numeric_limits<double>::infinity();

/// ||W||_{l,p} = (sum_{i<=l} ||W^(i)||_p^p)^(1/p) for p in {1, 2}; for p = infinity
/// the sum of the sup norms. Adaptive Gauss-Kronrod quadrature; sup norms by
/// dense sampling and golden-section refinement. Throws DomainError for l > L
/// or for l >= 1 on a sharp cutoff.
double sobolev_norm(const Window& W, int l, double p);

}  // namespace scslab::sums
