#pragma once

// Coefficient generation for y'' + P(x) y' + Q(x) y + R(x) = 0 about an ordinary
// point at the origin, and the Schrodinger specialization Q = 2m(E - V)/hbar^2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "psse/error.hpp"
#include "psse/series.hpp"

namespace psse {

/// Series expansions of P, Q, R. Coefficients past a series' degree read as zero.
struct OdeCoefficients {
  PowerSeries p;
  PowerSeries q;
  PowerSeries r;
};

struct Seeds {
  double c0 = 0.0;
  double c1 = 0.0;
};

class SchrodingerProblem {
 public:
  SchrodingerProblem(double mass, double hbar, PowerSeries potential, double energy)
      : mass_(mass), hbar_(hbar), potential_(std::move(potential)), energy_(energy) {
    if (!(mass > 0.0) || !std::isfinite(mass)) {
      throw Error(ErrorCode::InvalidArgument, "mass must be positive");
    }
    if (!(hbar > 0.0) || !std::isfinite(hbar)) {
      throw Error(ErrorCode::InvalidArgument, "hbar must be positive");
    }
    if (!std::isfinite(energy)) {
      throw Error(ErrorCode::InvalidArgument, "energy must be finite");
    }
  }

  double mass() const noexcept { return mass_; }
  double hbar() const noexcept { return hbar_; }
  const PowerSeries& potential() const noexcept { return potential_; }
  double energy() const noexcept { return energy_; }

  SchrodingerProblem with_energy(double e) const { return {mass_, hbar_, potential_, e}; }
  SchrodingerProblem with_potential(PowerSeries v) const {
    return {mass_, hbar_, std::move(v), energy_};
  }

 private:
  double mass_;
  double hbar_;
  PowerSeries potential_;
  double energy_;
};

/// Generates c_0..c_n from the master recurrence
///   c_{j+2} = -[ sum_i ((i+1) c_{i+1} P_{j-i} + c_i Q_{j-i}) + R_j ] / ((j+2)(j+1)).
/// The convolution only visits the nonzero span of P and Q.
inline PowerSeries solve_series(const OdeCoefficients& ode, Seeds seeds, std::size_t n) {
  if (n < 2) {
    throw Error(ErrorCode::InvalidArgument, "series degree must be at least 2");
  }
  if (!std::isfinite(seeds.c0) || !std::isfinite(seeds.c1)) {
    throw Error(ErrorCode::InvalidArgument, "seeds must be finite");
  }
  const auto p = ode.p.coeffs();
  const auto q = ode.q.coeffs();
  const bool has_p = !ode.p.is_zero();
  const std::size_t dp = ode.p.degree();
  const std::size_t dq = ode.q.degree();

  std::vector<double> c(n + 1, 0.0);
  c[0] = seeds.c0;
  c[1] = seeds.c1;
  for (std::size_t j = 0; j + 2 <= n; ++j) {
    double acc = ode.r[j];
    for (std::size_t i = j > dq ? j - dq : 0; i <= j; ++i) {
      acc += c[i] * q[j - i];
    }
    if (has_p) {
      for (std::size_t i = j > dp ? j - dp : 0; i <= j; ++i) {
        acc += static_cast<double>(i + 1) * c[i + 1] * p[j - i];
      }
    }
    const double next = -acc / (static_cast<double>(j + 2) * static_cast<double>(j + 1));
    if (!std::isfinite(next)) {
      throw NonFiniteCoefficientError(
          j + 1, "coefficient " + std::to_string(j + 2) + " overflowed; last valid index " +
                     std::to_string(j + 1));
    }
    c[j + 2] = next;
  }
  return PowerSeries(std::move(c));
}

/// Q_0 = 2m(E - V_0)/hbar^2, Q_j = -2m V_j/hbar^2.
inline PowerSeries schrodinger_q(const SchrodingerProblem& prob) {
  const double k = 2.0 * prob.mass() / (prob.hbar() * prob.hbar());
  std::vector<double> q(prob.potential().degree() + 1);
  for (std::size_t j = 0; j < q.size(); ++j) q[j] = -k * prob.potential()[j];
  q[0] = k * (prob.energy() - prob.potential()[0]);
  return PowerSeries(std::move(q));
}

inline OdeCoefficients schrodinger_ode(const SchrodingerProblem& prob) {
  return {PowerSeries::zero(), schrodinger_q(prob), PowerSeries::zero()};
}

inline PowerSeries solve_schrodinger(const SchrodingerProblem& prob, Seeds seeds, std::size_t n) {
  return solve_series(schrodinger_ode(prob), seeds, n);
}

/// The residual polynomial s'' + P s' + Q s + R, built with series arithmetic.
inline PowerSeries residual_series(const OdeCoefficients& ode, const PowerSeries& s) {
  const PowerSeries d1 = derivative(s);
  const PowerSeries d2 = derivative(d1);
  PowerSeries out = add(d2, cauchy_product(ode.q, s));
  if (!ode.p.is_zero()) out = add(out, cauchy_product(ode.p, d1));
  return add(out, ode.r);
}

/// Pointwise residual eps_N(x) of a truncated solution.
inline double residual(const OdeCoefficients& ode, const PowerSeries& s, double x) {
  const PowerSeries d1 = derivative(s);
  const PowerSeries d2 = derivative(d1);
  return evaluate(d2, x) + evaluate(ode.p, x) * evaluate(d1, x) + evaluate(ode.q, x) * evaluate(s, x) +
         evaluate(ode.r, x);
}

/// Residual as a reusable callable; derivatives are formed once.
class ResidualFunction {
 public:
  ResidualFunction(OdeCoefficients ode, const PowerSeries& s)
      : ode_(std::move(ode)), s_(s), d1_(derivative(s)), d2_(derivative(d1_)) {}

  double operator()(double x) const {
    return evaluate(d2_, x) + evaluate(ode_.p, x) * evaluate(d1_, x) +
           evaluate(ode_.q, x) * evaluate(s_, x) + evaluate(ode_.r, x);
  }

 private:
  OdeCoefficients ode_;
  PowerSeries s_;
  PowerSeries d1_;
  PowerSeries d2_;
};

}  // namespace psse
