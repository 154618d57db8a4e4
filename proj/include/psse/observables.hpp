#pragma once

// Normalization and expectation values by exact polynomial integration, plus the
// exponential-tail estimates for how much norm lies outside a finite interval.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "psse/approx.hpp"
#include "psse/error.hpp"
#include "psse/piecewise.hpp"
#include "psse/series.hpp"

namespace psse {

class OperatorSpec {
 public:
  enum class Kind { Identity, Position, PositionSquared, Kinetic, Potential };

  static OperatorSpec identity() { return OperatorSpec(Kind::Identity); }
  static OperatorSpec position() { return OperatorSpec(Kind::Position); }
  static OperatorSpec position_squared() { return OperatorSpec(Kind::PositionSquared); }
  /// T = -(hbar^2 / 2m) d^2/dx^2.
  static OperatorSpec kinetic(double mass, double hbar) {
    if (!(mass > 0.0) || !(hbar > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "kinetic operator needs positive mass and hbar");
    }
    OperatorSpec op(Kind::Kinetic);
    op.mass_ = mass;
    op.hbar_ = hbar;
    return op;
  }
  /// Multiplication by V(x), V given about the origin.
  static OperatorSpec potential(PowerSeries v) {
    OperatorSpec op(Kind::Potential);
    op.potential_ = std::move(v);
    return op;
  }

  Kind kind() const noexcept { return kind_; }

  std::string name() const {
    switch (kind_) {
      case Kind::Identity: return "identity";
      case Kind::Position: return "x";
      case Kind::PositionSquared: return "x2";
      case Kind::Kinetic: return "kinetic";
      case Kind::Potential: return "potential";
    }
    return "unknown";
  }

  /// Integrand psi * (op psi) for a series written in y = x - offset.
  PowerSeries integrand(const PowerSeries& s, double offset = 0.0) const {
    const PowerSeries density = cauchy_product(s, s);
    switch (kind_) {
      case Kind::Identity:
        return density;
      case Kind::Position:
        return add(scale(density, offset), shift_up(density, 1));
      case Kind::PositionSquared:
        return add(add(scale(density, offset * offset), scale(shift_up(density, 1), 2.0 * offset)),
                   shift_up(density, 2));
      case Kind::Kinetic:
        return scale(cauchy_product(s, derivative(derivative(s))),
                     -hbar_ * hbar_ / (2.0 * mass_));
      case Kind::Potential:
        return cauchy_product(density, offset == 0.0 ? potential_ : recenter(potential_, offset));
    }
    return density;
  }

 private:
  explicit OperatorSpec(Kind k) : kind_(k) {}

  Kind kind_;
  double mass_ = 1.0;
  double hbar_ = 1.0;
  PowerSeries potential_;
};

struct ExpectationReport {
  std::string operator_name;
  double value;
  Interval interval;
  std::size_t degree;
};

inline double norm_squared(const PowerSeries& s, const Interval& iv) {
  return definite_integral(cauchy_product(s, s), iv);
}

inline double norm_squared(const PiecewiseSeries& psi) {
  double acc = 0.0;
  for (const auto& p : psi.pieces()) {
    acc += definite_integral(cauchy_product(p.series, p.series), Interval(0.0, p.region.length()));
  }
  return acc;
}

namespace detail {

constexpr double kNormFloor = 1e-300;

inline double phase_sign(std::span<const double> c) {
  for (double v : c) {
    if (v != 0.0) return v > 0.0 ? 1.0 : -1.0;
  }
  return 1.0;
}

}  // namespace detail

/// Scales s to unit norm over iv; the first nonzero coefficient is made positive.
inline PowerSeries normalize(const PowerSeries& s, const Interval& iv) {
  const double n2 = norm_squared(s, iv);
  if (!(n2 > detail::kNormFloor)) {
    throw Error(ErrorCode::ZeroNorm, "norm vanishes over the interval");
  }
  return scale(s, detail::phase_sign(s.coeffs()) / std::sqrt(n2));
}

/// Unit norm over the chain's domain. The phase is fixed by the piece containing
/// `phase_point`: its value there (or slope, if the value is zero) is made positive.
inline PiecewiseSeries normalize(const PiecewiseSeries& psi, double phase_point = 0.0) {
  const double n2 = norm_squared(psi);
  if (!(n2 > detail::kNormFloor)) {
    throw Error(ErrorCode::ZeroNorm, "norm vanishes over the domain");
  }
  const auto& piece = psi.piece_at(phase_point);
  double ref = piece(phase_point);
  if (ref == 0.0) ref = piece.slope(phase_point);
  const double sign = ref < 0.0 ? -1.0 : 1.0;
  return psi.scaled(sign / std::sqrt(n2));
}

inline ExpectationReport expectation(const PowerSeries& s, const OperatorSpec& op, const Interval& iv) {
  return {op.name(), definite_integral(op.integrand(s), iv), iv, s.degree()};
}

inline ExpectationReport expectation(const PiecewiseSeries& psi, const OperatorSpec& op) {
  double acc = 0.0;
  for (const auto& p : psi.pieces()) {
    acc += definite_integral(op.integrand(p.series, p.region.a()), Interval(0.0, p.region.length()));
  }
  return {op.name(), acc, psi.domain(), psi.max_degree()};
}

/// Integral of psi1 * psi2 over the intersection of their domains, exact per common sub-interval.
inline double overlap(const PiecewiseSeries& psi1, const PiecewiseSeries& psi2) {
  const double lo = std::max(psi1.domain().a(), psi2.domain().a());
  const double hi = std::min(psi1.domain().b(), psi2.domain().b());
  if (!(lo < hi)) return 0.0;
  std::vector<double> knots{lo, hi};
  for (const auto* psi : {&psi1, &psi2}) {
    for (const auto& p : psi->pieces()) {
      if (p.region.a() > lo && p.region.a() < hi) knots.push_back(p.region.a());
    }
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  double acc = 0.0;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const double l = knots[i - 1];
    const double mid = 0.5 * (l + knots[i]);
    const auto& p1 = psi1.piece_at(mid);
    const auto& p2 = psi2.piece_at(mid);
    const PowerSeries s1 = recenter(p1.series, l - p1.region.a());
    const PowerSeries s2 = recenter(p2.series, l - p2.region.a());
    acc += definite_integral(cauchy_product(s1, s2), Interval(0.0, knots[i] - l));
  }
  return acc;
}

struct ConvergenceCheck {
  bool converged;
  bool used_absolute;
};

/// Relative change |(prev - curr) / prev| < tau; falls back to |curr - prev| < tau
/// when the reference value is exactly zero.
inline ConvergenceCheck principal_fraction_check(double prev, double curr, const Tolerance& tau) {
  if (prev == 0.0) {
    return {std::abs(curr - prev) < tau.value(), true};
  }
  return {std::abs((prev - curr) / prev) < tau.value(), false};
}

inline bool principal_fraction_converged(const ExpectationReport& prev, const ExpectationReport& curr,
                                         const Tolerance& tau) {
  return principal_fraction_check(prev.value, curr.value, tau).converged;
}

/// Norm outside [-b, b] for a tail C e^{-alpha |x|}: C^2 e^{-2 alpha b} / alpha.
inline double residual_fraction(double c, double alpha, double b) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
  return c * c * std::exp(-2.0 * alpha * b) / alpha;
}

/// Smallest full width 2b with residual_fraction(C, alpha, b) <= tau.
inline double estimate_interval(double c, double alpha, const Tolerance& tau) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
  const double t = tau.value();
  if (!(t < c * c / alpha)) {
    throw Error(ErrorCode::TauTooLarge, "tolerance must be below C^2/alpha");
  }
  return -std::log(alpha * t / (c * c)) / alpha;
}

}  // namespace psse
