#pragma once

// Approximation quality of a truncated series: error norms over an interval, the
// largest interval meeting a tolerance (maximin), and the smallest degree whose
// maximin interval covers a target (minimax in the degree-minimal sense).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "psse/error.hpp"
#include "psse/recurrence.hpp"
#include "psse/series.hpp"

namespace psse {

using RealFunction = std::function<double(double)>;

class Tolerance {
 public:
  explicit Tolerance(double tau) : tau_(tau) {
    if (!(tau >= 1e-14) || !std::isfinite(tau)) {
      throw Error(ErrorCode::InvalidArgument,
                  "tolerance must be finite and >= 1e-14, got " + std::to_string(tau));
    }
  }
  double value() const noexcept { return tau_; }

 private:
  double tau_;
};

struct MaximinResult {
  Interval interval;
  double achieved_error;
  std::size_t degree;
};

class DegreeExhaustedError : public Error {
 public:
  DegreeExhaustedError(std::optional<MaximinResult> best, const std::string& what)
      : Error(ErrorCode::DegreeExhausted, what), best_(std::move(best)) {}
  const std::optional<MaximinResult>& best() const noexcept { return best_; }

 private:
  std::optional<MaximinResult> best_;
};

namespace detail {

// Golden-section maximization of f on [lo, hi].
inline std::pair<double, double> golden_max(const RealFunction& f, double lo, double hi,
                                            int iterations = 60) {
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < iterations && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

// First x > 0 (scanning outward by doubling steps) where |err(x)| reaches tau.
// The root of (tau - |err|) e^{-x} is polished with an Illinois-safeguarded secant;
// the weight is shifted to the bracket's left end so it cannot underflow.
inline std::optional<double> departure_point(const RealFunction& err, double tau, double horizon) {
  double lo = 0.0;
  double step = 1e-6;
  double hi = step;
  while (std::abs(err(hi)) < tau) {
    if (hi >= horizon) return std::nullopt;
    lo = hi;
    step *= 2.0;
    hi = std::min(lo + step, horizon);
  }
  const double base = lo;
  const auto weighted = [&](double x) { return (tau - std::abs(err(x))) * std::exp(-(x - base)); };
  double flo = weighted(lo);
  double fhi = weighted(hi);
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi)) break;
    double x = (flo != fhi) ? hi - fhi * (hi - lo) / (fhi - flo) : 0.5 * (lo + hi);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    const double fx = weighted(x);
    if (fx == 0.0) return x;
    if (fx > 0.0) {
      lo = x;
      flo = fx;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = x;
      fhi = fx;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
  }
  return std::abs(flo) < std::abs(fhi) ? lo : hi;
}

}  // namespace detail

/// L^p norm of err over iv. Finite p: composite Simpson with `samples` panels.
/// p = infinity: maximum over a grid of max(samples, 1024) points, refined by golden
/// section around the grid maximum.
inline double lp_norm(const RealFunction& err, const Interval& iv, double p, std::size_t samples) {
  if (samples < 16) {
    throw Error(ErrorCode::InvalidArgument, "lp_norm needs at least 16 samples");
  }
  if (!(p > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "norm order p must be positive");
  }
  if (std::isinf(p)) {
    const std::size_t n = std::max<std::size_t>(samples, 1024);
    const double h = iv.length() / static_cast<double>(n - 1);
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::abs(err(iv.a() + h * static_cast<double>(i)));
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    const double lo = iv.a() + h * static_cast<double>(arg == 0 ? 0 : arg - 1);
    const double hi = std::min(iv.b(), iv.a() + h * static_cast<double>(arg + 1));
    const auto [x, v] = detail::golden_max([&](double t) { return std::abs(err(t)); }, lo, hi);
    (void)x;
    return std::max(best, v);
  }
  const std::size_t panels = samples % 2 == 0 ? samples : samples + 1;
  const double h = iv.length() / static_cast<double>(panels);
  double acc = 0.0;
  for (std::size_t i = 0; i <= panels; ++i) {
    const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * std::pow(std::abs(err(iv.a() + h * static_cast<double>(i))), p);
  }
  return std::pow(acc * h / 3.0, 1.0 / p);
}

/// Largest interval around the origin on which |err| stays below tau. Each endpoint is
/// the first point where |err| = tau, searched outward from the origin.
inline Interval maximin_interval(const RealFunction& err, const Tolerance& tau,
                                 double horizon = 1e4) {
  const double t = tau.value();
  if (!(std::abs(err(0.0)) < t)) {
    throw Error(ErrorCode::BadOrigin,
                "error at the origin already reaches the tolerance; degree insufficient");
  }
  const auto right = detail::departure_point(err, t, horizon);
  const auto left = detail::departure_point([&](double x) { return err(-x); }, t, horizon);
  if (!right || !left) {
    throw Error(ErrorCode::NoDeparture,
                "error never reaches the tolerance within |x| <= " + std::to_string(horizon));
  }
  return Interval(-*left, *right);
}

/// Maximin interval of the truncated solution of `ode` with `seeds` at degree n.
/// A side that never departs within the horizon is reported at the horizon.
inline MaximinResult maximin_for_degree(const OdeCoefficients& ode, Seeds seeds, const Tolerance& tau,
                                        std::size_t n, double horizon = 1e4) {
  const PowerSeries s = solve_series(ode, seeds, n);
  const ResidualFunction res(ode, s);
  const RealFunction err = [&](double x) { return res(x); };
  const double t = tau.value();
  if (!(std::abs(err(0.0)) < t)) {
    throw Error(ErrorCode::BadOrigin, "residual at the origin reaches the tolerance");
  }
  const double b = detail::departure_point(err, t, horizon).value_or(horizon);
  const double a = -detail::departure_point([&](double x) { return err(-x); }, t, horizon)
                        .value_or(horizon);
  const Interval iv(a, b);
  return {iv, lp_norm(err, iv, std::numeric_limits<double>::infinity(), 1024), n};
}

/// Smallest degree (stepping by `step` from 2) whose maximin interval covers
/// [target_lo, target_hi]. A degenerate target is widened to +-1e-6 around its point.
inline std::pair<PowerSeries, MaximinResult> minimax_degree(const OdeCoefficients& ode, Seeds seeds,
                                                            const Tolerance& tau, double target_lo,
                                                            double target_hi, std::size_t n_max,
                                                            std::size_t step = 2) {
  if (n_max < 2) throw Error(ErrorCode::InvalidArgument, "n_max must be at least 2");
  if (step == 0) throw Error(ErrorCode::InvalidArgument, "degree step must be positive");
  if (target_lo == target_hi) {
    target_lo -= 1e-6;
    target_hi += 1e-6;
  }
  const Interval target(target_lo, target_hi);
  std::optional<MaximinResult> best;
  for (std::size_t n = 2; n <= n_max; n += step) {
    std::optional<MaximinResult> attempt;
    try {
      attempt = maximin_for_degree(ode, seeds, tau, n);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BadOrigin) throw;
      continue;
    }
    const MaximinResult& r = *attempt;
    if (r.interval.covers(target)) {
      return {solve_series(ode, seeds, n), r};
    }
    if (!best || r.interval.length() > best->interval.length()) best = r;
  }
  throw DegreeExhaustedError(
      best, "no degree up to " + std::to_string(n_max) + " covers the target; best interval [" +
                (best ? std::to_string(best->interval.a()) + ", " + std::to_string(best->interval.b())
                      : std::string("none")) +
                "]");
}

inline std::pair<PowerSeries, MaximinResult> minimax_degree(const OdeCoefficients& ode, Seeds seeds,
                                                            const Tolerance& tau, const Interval& target,
                                                            std::size_t n_max, std::size_t step = 2) {
  return minimax_degree(ode, seeds, tau, target.a(), target.b(), n_max, step);
}

/// Maximin interval per degree, for tabulating how the certified region grows with N.
inline std::vector<MaximinResult> maximin_report(const OdeCoefficients& ode, Seeds seeds,
                                                 const Tolerance& tau, std::size_t n_min,
                                                 std::size_t n_max, std::size_t step = 1) {
  std::vector<MaximinResult> rows;
  for (std::size_t n = std::max<std::size_t>(n_min, 2); n <= n_max; n += std::max<std::size_t>(step, 1)) {
    rows.push_back(maximin_for_degree(ode, seeds, tau, n));
  }
  return rows;
}

}  // namespace psse
