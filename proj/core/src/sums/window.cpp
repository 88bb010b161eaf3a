#include "scslab/sums/window.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "scslab/common.hpp"

namespace scslab::sums {
namespace {

constexpr int kBumpOrders = 6;

double horner(const std::vector<double>& c, double t) {
  double r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * t + *it;
  return r;
}

// P_{i+1} = P_i' (1 - t^2)^2 + 4 i t (1 - t^2) P_i - 2 t P_i
std::vector<std::vector<double>> bump_polynomials(int orders) {
  std::vector<std::vector<double>> P{{1.0}};
  for (int i = 0; i < orders; ++i) {
    const auto& p = P.back();
    std::vector<double> next(p.size() + 4, 0.0);
    for (std::size_t j = 1; j < p.size(); ++j) {
      const double dp = static_cast<double>(j) * p[j];  // coefficient of t^(j-1) in P'
      next[j - 1] += dp;
      next[j + 1] -= 2.0 * dp;
      next[j + 3] += dp;
    }
    for (std::size_t j = 0; j < p.size(); ++j) {
      next[j + 1] += (4.0 * i - 2.0) * p[j];
      next[j + 3] -= 4.0 * i * p[j];
    }
    while (next.size() > 1 && next.back() == 0.0) next.pop_back();
    P.push_back(std::move(next));
  }
  return P;
}

double sup_abs(const std::function<double(double)>& g, double lo, double hi) {
  if (!(hi > lo)) return std::fabs(g(lo));
  constexpr int kSamples = 4000;
  const double step = (hi - lo) / kSamples;
  double best = 0.0;
  int arg = 0;
  for (int s = 0; s <= kSamples; ++s) {
    const double v = std::fabs(g(lo + s * step));
    if (v > best) {
      best = v;
      arg = s;
    }
  }
  const double l = std::max(lo, lo + (arg - 1) * step), r = std::min(hi, lo + (arg + 1) * step);
  const auto res = boost::math::tools::brent_find_minima([&](double y) { return -std::fabs(g(y)); }, l, r, 52);
  return std::max(best, -res.second);
}

double integrate(const std::function<double(double)>& g, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, lo, hi, 20, 1e-12, &err);
}

}  // namespace

Window::Window(WindowKind kind, double a, double A, double height) : kind_(kind), a_(a), A_(A), height_(height) {
  if (kind_ == WindowKind::SmoothBump) bump_poly_ = bump_polynomials(kBumpOrders);
}

int Window::max_order() const noexcept {
  switch (kind_) {
    case WindowKind::SmoothBump: return kBumpOrders;
    case WindowKind::CosineSpline: return 2;
    default: return 0;
  }
}

double Window::deriv(int i, double y) const {
  if (i < 0 || i > max_order()) throw DomainError("Window::deriv: order exceeds the window's smoothness");
  if (kind_ == WindowKind::SharpCutoff) return (y >= a_ && y <= A_) ? height_ : 0.0;
  if (!(y > a_ && y < A_)) return 0.0;
  const double dt = 2.0 / (A_ - a_);
  const double t = (2.0 * y - (a_ + A_)) / (A_ - a_);
  const double scale = height_ * std::pow(dt, i);
  if (kind_ == WindowKind::CosineSpline) {
    const double c = std::cos(kPi * t), s = std::sin(kPi * t);
    switch (i) {
      case 0: return scale * 0.5 * (1.0 + c);
      case 1: return scale * -0.5 * kPi * s;
      default: return scale * -0.5 * kPi * kPi * c;
    }
  }
  const double u = 1.0 - t * t;
  const double g = std::exp(1.0 - 1.0 / u);
  if (g == 0.0) return 0.0;
  return scale * horner(bump_poly_[static_cast<std::size_t>(i)], t) / std::pow(u, 2 * i) * g;
}

std::string to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::SmoothBump: return "bump";
    case WindowKind::CosineSpline: return "cosine";
    default: return "sharp";
  }
}

std::string Window::descriptor() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(kind_) << ':' << a_ << ':' << A_;
  if (height_ != 1.0) os << ':' << height_;
  return os.str();
}

Window make_window(WindowKind kind, double a, double A, double height) {
  if (!std::isfinite(a) || !std::isfinite(A) || !std::isfinite(height)) {
    throw DomainError("make_window: parameters must be finite");
  }
  if (kind == WindowKind::SharpCutoff ? a < 0.0 : a <= 0.0) {
    throw DomainError("make_window: lower support endpoint must be positive");
  }
  if (A < a) throw DomainError("make_window: upper support endpoint below lower endpoint");
  return Window(kind, a, A, height);
}

Window parse_window(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3 && parts.size() != 4) {
    throw DomainError("parse_window: expected kind:a:A[:height], got '" + spec + "'");
  }
  WindowKind kind;
  if (parts[0] == "bump" || parts[0] == "smooth-bump") {
    kind = WindowKind::SmoothBump;
  } else if (parts[0] == "cosine" || parts[0] == "cosine-spline") {
    kind = WindowKind::CosineSpline;
  } else if (parts[0] == "sharp" || parts[0] == "sharp-cutoff") {
    kind = WindowKind::SharpCutoff;
  } else {
    throw DomainError("parse_window: unknown window kind '" + parts[0] + "'");
  }
  auto num = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw DomainError("parse_window: bad number '" + s + "' in '" + spec + "'");
    return v;
  };
  return make_window(kind, num(parts[1]), num(parts[2]), parts.size() == 4 ? num(parts[3]) : 1.0);
}

double sobolev_norm(const Window& W, int l, double p) {
  if (l < 0) throw DomainError("sobolev_norm: negative order");
  if (!(p == 1.0 || p == 2.0 || p == kSupNorm)) throw DomainError("sobolev_norm: p must be 1, 2 or infinity");
  if (!W.smooth() && l >= 1) throw DomainError("sobolev_norm: sharp cutoff has no derivatives");
  if (l > W.max_order()) throw DomainError("sobolev_norm: order exceeds the window's smoothness");
  const double lo = W.a(), hi = W.A();
  if (!W.smooth()) {
    const double h = std::fabs(W.height());
    if (p == kSupNorm) return h;
    return p == 1.0 ? h * (hi - lo) : h * std::sqrt(hi - lo);
  }
  double total = 0.0;
  for (int i = 0; i <= l; ++i) {
    auto g = [&W, i](double y) { return W.deriv(i, y); };
    if (p == kSupNorm) {
      total += sup_abs(g, lo, hi);
    } else if (p == 1.0) {
      total += integrate([&g](double y) { return std::fabs(g(y)); }, lo, hi);
    } else {
      total += integrate([&g](double y) { return g(y) * g(y); }, lo, hi);
    }
  }
  return p == 2.0 ? std::sqrt(total) : total;
}

}  // namespace scslab::sums
