#pragma once

// Truncated Maclaurin series: storage, evaluation, calculus and the
// exponentially factored form used to keep high-order terms representable.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "psse/error.hpp"

namespace psse {

/// Closed interval [a, b] with a < b, both finite.
class Interval {
 public:
  Interval(double a, double b) : a_(a), b_(b) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
      throw Error(ErrorCode::InvalidArgument,
                  "interval requires finite a < b, got [" + std::to_string(a) + ", " +
                      std::to_string(b) + "]");
    }
  }

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double length() const noexcept { return b_ - a_; }
  bool contains(double x) const noexcept { return a_ <= x && x <= b_; }
  bool covers(const Interval& other) const noexcept {
    return a_ <= other.a_ && other.b_ <= b_;
  }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double a_;
  double b_;
};

/// Dense coefficients c_0..c_N of sum_j c_j x^j. Never empty, never NaN or inf.
class PowerSeries {
 public:
  PowerSeries() : c_{0.0} {}

  explicit PowerSeries(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) {
      c_.push_back(0.0);
    }
    for (std::size_t j = 0; j < c_.size(); ++j) {
      if (!std::isfinite(c_[j])) {
        throw Error(ErrorCode::NonFiniteCoefficient,
                    "coefficient " + std::to_string(j) + " is not finite");
      }
    }
  }

  PowerSeries(std::initializer_list<double> coeffs)
      : PowerSeries(std::vector<double>(coeffs)) {}

  static PowerSeries zero(std::size_t degree = 0) {
    return PowerSeries(std::vector<double>(degree + 1, 0.0));
  }

  std::size_t degree() const noexcept { return c_.size() - 1; }
  std::span<const double> coeffs() const noexcept { return c_; }
  const std::vector<double>& vector() const noexcept { return c_; }

  /// Coefficient j; zero past the stored degree.
  double operator[](std::size_t j) const noexcept { return j < c_.size() ? c_[j] : 0.0; }

  bool is_zero() const noexcept {
    return std::all_of(c_.begin(), c_.end(), [](double v) { return v == 0.0; });
  }

  friend bool operator==(const PowerSeries&, const PowerSeries&) = default;

 private:
  std::vector<double> c_;
};

namespace detail {

inline void require_finite(double x, const char* what) {
  if (std::isnan(x)) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " is NaN");
  }
}

// Running scale factor kept as mantissa * 2^exponent so long products of
// large and small ratios never leave the representable range.
struct ScaledProduct {
  double mantissa = 1.0;
  long exponent = 0;

  void multiply(double factor) {
    int e = 0;
    mantissa = std::frexp(mantissa * factor, &e);
    exponent += e;
  }

  double apply(double value) const {
    if (value == 0.0 || mantissa == 0.0) return 0.0;
    int e = 0;
    const double m = std::frexp(value * mantissa, &e);
    const long total = exponent + e;
    if (total > 4096) return std::copysign(HUGE_VAL, m);
    if (total < -4096) return std::copysign(0.0, m);
    return std::ldexp(m, static_cast<int>(total));
  }
};

}  // namespace detail

/// Horner evaluation. Overflow to +-inf is returned as-is.
inline double evaluate(const PowerSeries& s, double x) {
  detail::require_finite(x, "evaluation point");
  const auto c = s.coeffs();
  double acc = c.back();
  for (std::size_t j = c.size() - 1; j-- > 0;) {
    acc = acc * x + c[j];
  }
  return acc;
}

inline PowerSeries scale(const PowerSeries& s, double factor) {
  std::vector<double> out(s.coeffs().begin(), s.coeffs().end());
  for (double& v : out) v *= factor;
  return PowerSeries(std::move(out));
}

/// Coefficient-wise sum; the result has the larger of the two degrees.
inline PowerSeries add(const PowerSeries& s1, const PowerSeries& s2) {
  const std::size_t n = std::max(s1.degree(), s2.degree());
  std::vector<double> out(n + 1);
  for (std::size_t j = 0; j <= n; ++j) out[j] = s1[j] + s2[j];
  return PowerSeries(std::move(out));
}

/// Multiplies by x^k (shifts coefficients up by k).
inline PowerSeries shift_up(const PowerSeries& s, std::size_t k) {
  std::vector<double> out(s.degree() + 1 + k, 0.0);
  std::copy(s.coeffs().begin(), s.coeffs().end(), out.begin() + static_cast<std::ptrdiff_t>(k));
  return PowerSeries(std::move(out));
}

/// Term-by-term derivative, coefficients (j+1) c_{j+1}. Degree-0 input gives {0}.
inline PowerSeries derivative(const PowerSeries& s) {
  if (s.degree() == 0) return PowerSeries::zero();
  std::vector<double> out(s.degree());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = static_cast<double>(j + 1) * s[j + 1];
  }
  return PowerSeries(std::move(out));
}

/// Antiderivative vanishing at 0, coefficients c_{j-1}/j.
inline PowerSeries antiderivative(const PowerSeries& s) {
  std::vector<double> out(s.degree() + 2, 0.0);
  for (std::size_t j = 0; j <= s.degree(); ++j) {
    out[j + 1] = s[j] / static_cast<double>(j + 1);
  }
  return PowerSeries(std::move(out));
}

/// Full (untruncated) product; degree N1 + N2.
inline PowerSeries cauchy_product(const PowerSeries& s1, const PowerSeries& s2) {
  const auto a = s1.coeffs();
  const auto b = s2.coeffs();
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t k = 0; k < b.size(); ++k) {
      out[i + k] += a[i] * b[k];
    }
  }
  return PowerSeries(std::move(out));
}

/// Exact integral of the polynomial over [a, b].
inline double definite_integral(const PowerSeries& s, const Interval& iv) {
  const PowerSeries prim = antiderivative(s);
  return evaluate(prim, iv.b()) - evaluate(prim, iv.a());
}

/// Taylor shift: returns t with t(y) = s(y + x0), same degree.
inline PowerSeries recenter(const PowerSeries& s, double x0) {
  detail::require_finite(x0, "recentering point");
  std::vector<double> a(s.coeffs().begin(), s.coeffs().end());
  const std::size_t n = s.degree();
  if (x0 == 0.0) return s;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = n; j-- > i;) {
      a[j] += x0 * a[j + 1];
    }
  }
  return PowerSeries(std::move(a));
}

/// Mirror image s(-x): odd coefficients change sign.
inline PowerSeries reflect(const PowerSeries& s) {
  std::vector<double> out(s.coeffs().begin(), s.coeffs().end());
  for (std::size_t j = 1; j < out.size(); j += 2) out[j] = -out[j];
  return PowerSeries(std::move(out));
}

/// Tail ratio |c_N / c_{N-1}|, an estimate of the inverse convergence radius.
inline double ratio_diagnostic(const PowerSeries& s) {
  const std::size_t n = s.degree();
  if (n < 4) {
    throw Error(ErrorCode::InvalidArgument, "ratio diagnostic needs degree >= 4");
  }
  if (s[n - 1] == 0.0) {
    throw Error(ErrorCode::ZeroDenominator,
                "c_" + std::to_string(n - 1) + " vanishes; sample a different index pair");
  }
  return std::abs(s[n] / s[n - 1]);
}

/// Coefficients c_j = b_j (-alpha)^j / j!.
class FactoredSeries {
 public:
  FactoredSeries(double alpha, std::vector<double> b) : alpha_(alpha), b_(std::move(b)) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      throw Error(ErrorCode::InvalidArgument, "decay constant alpha must be positive");
    }
    if (b_.empty()) b_.push_back(0.0);
    for (std::size_t j = 0; j < b_.size(); ++j) {
      if (!std::isfinite(b_[j])) {
        throw Error(ErrorCode::NonFiniteCoefficient,
                    "factored coefficient " + std::to_string(j) + " is not finite");
      }
    }
  }

  double alpha() const noexcept { return alpha_; }
  std::size_t degree() const noexcept { return b_.size() - 1; }
  std::span<const double> b() const noexcept { return b_; }
  double operator[](std::size_t j) const noexcept { return j < b_.size() ? b_[j] : 0.0; }

  /// Prefactor C of the asymptote C e^{-alpha x}, read off the last factored coefficient.
  double limit_constant() const noexcept { return b_.back(); }

  /// Relative spread (max - min) / |median| of b_j over the last quartile of indices.
  double tail_spread() const {
    const std::size_t n = degree();
    const std::size_t start = n - n / 4;
    std::vector<double> tail(b_.begin() + static_cast<std::ptrdiff_t>(start), b_.end());
    std::sort(tail.begin(), tail.end());
    const double med = tail[tail.size() / 2];
    if (med == 0.0) return HUGE_VAL;
    return (tail.back() - tail.front()) / std::abs(med);
  }

 private:
  double alpha_;
  std::vector<double> b_;
};

namespace detail {

// sum_{j=0}^{n} y^j / j!, evaluated without catastrophic cancellation for y < 0
// whenever n is past the peak term: e^y minus the (alternating, decreasing) tail.
inline double truncated_exp(std::size_t n, double y) {
  const double z = -y;
  if (y >= 0.0 || z >= static_cast<double>(n + 1)) {
    double term = 1.0;
    double acc = 1.0;
    for (std::size_t i = 1; i <= n; ++i) {
      term *= y / static_cast<double>(i);
      acc += term;
    }
    return acc;
  }
  const double np1 = static_cast<double>(n + 1);
  double term = std::exp(np1 * std::log(z) - std::lgamma(np1 + 1.0));
  if ((n + 1) % 2 == 1) term = -term;
  double tail = 0.0;
  for (std::size_t i = n + 1; term != 0.0; ++i) {
    tail += term;
    if (std::abs(term) <= 1e-18 * std::abs(tail)) break;
    term *= y / static_cast<double>(i + 1);
  }
  return std::exp(y) - tail;
}

}  // namespace detail

/// Evaluates b_0 + sum_j b_j prod_{i<=j} (-alpha x)/i.
///
/// The asymptotic prefactor C = b_N is pulled out and its truncated exponential is
/// summed stably; the remainder sum_j (b_j - C) t_j uses the running products. For
/// a pure exponential (all b_j equal) the result is therefore accurate far past the
/// point where term-by-term summation loses every significant digit.
inline double evaluate_factored(const FactoredSeries& f, double x) {
  detail::require_finite(x, "evaluation point");
  const double y = -f.alpha() * x;
  const double c = f.limit_constant();
  double acc = f[0] - c;
  double term = 1.0;
  for (std::size_t j = 1; j <= f.degree(); ++j) {
    term *= y / static_cast<double>(j);
    const double d = f[j] - c;
    if (d != 0.0) acc += d * term;
  }
  if (c != 0.0) acc += c * detail::truncated_exp(f.degree(), y);
  return acc;
}

/// Reconstructs c_j = b_j (-alpha)^j / j!; entries below the double range become 0.
inline PowerSeries to_power_series(const FactoredSeries& f) {
  std::vector<double> c(f.degree() + 1);
  detail::ScaledProduct scale;
  for (std::size_t j = 0; j <= f.degree(); ++j) {
    if (j > 0) scale.multiply(-f.alpha() / static_cast<double>(j));
    c[j] = scale.apply(f[j]);
  }
  return PowerSeries(std::move(c));
}

/// Estimates alpha from the median of -(j+1) c_{j+1} / c_j over the top quartile of
/// indices and rescales each c_j by j!/(-alpha)^j. Throws DegenerateTail when the
/// series is too short, has no usable ratios, or the ratios disagree by more than
/// `max_spread`.
inline FactoredSeries to_factored(const PowerSeries& s, double max_spread = 10.0) {
  const std::size_t n = s.degree();
  if (n < 8) {
    throw Error(ErrorCode::DegenerateTail, "series too short to fit an exponential tail");
  }
  std::vector<double> ratios;
  for (std::size_t j = n - n / 4 - 1; j < n; ++j) {
    if (s[j] == 0.0 || s[j + 1] == 0.0) continue;
    const double r = -static_cast<double>(j + 1) * s[j + 1] / s[j];
    if (!std::isfinite(r)) continue;
    ratios.push_back(r);
  }
  if (ratios.empty()) {
    throw Error(ErrorCode::DegenerateTail, "no usable coefficient ratios in the tail");
  }
  std::sort(ratios.begin(), ratios.end());
  const double alpha = ratios[ratios.size() / 2];
  if (!(ratios.front() > 0.0) || ratios.back() / ratios.front() > max_spread) {
    throw Error(ErrorCode::DegenerateTail,
                "tail ratios span [" + std::to_string(ratios.front()) + ", " +
                    std::to_string(ratios.back()) + "]; not an exponential tail");
  }
  std::vector<double> b(n + 1);
  detail::ScaledProduct scale;
  for (std::size_t j = 0; j <= n; ++j) {
    if (j > 0) scale.multiply(static_cast<double>(j) / -alpha);
    b[j] = scale.apply(s[j]);
  }
  return FactoredSeries(alpha, std::move(b));
}

}  // namespace psse
