#pragma once

// Potential definitions (analytic series or piecewise regions), region-by-region
// propagation of a solution with value/slope matching at every edge, and the
// closed-form reference problems used for validation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "psse/approx.hpp"
#include "psse/error.hpp"
#include "psse/observables.hpp"
#include "psse/piecewise.hpp"
#include "psse/recurrence.hpp"
#include "psse/series.hpp"

namespace psse {

struct PhysicalParams {
  double mass = 1.0;
  double hbar = 1.0;

  double q_scale() const { return 2.0 * mass / (hbar * hbar); }
};

/// A region of a piecewise potential; `local` is V expanded about interval.a().
struct PotentialRegion {
  Interval interval;
  PowerSeries local;
};

class PotentialSpec {
 public:
  enum class Kind { Analytic, Piecewise };

  static PotentialSpec analytic(PowerSeries v) {
    PotentialSpec s(Kind::Analytic);
    s.analytic_ = std::move(v);
    return s;
  }

  static PotentialSpec piecewise(std::vector<PotentialRegion> regions) {
    if (regions.empty()) {
      throw Error(ErrorCode::BadParams, "piecewise potential needs at least one region");
    }
    for (std::size_t i = 1; i < regions.size(); ++i) {
      if (regions[i].interval.a() != regions[i - 1].interval.b()) {
        throw Error(ErrorCode::BadParams, "piecewise regions must be contiguous and ordered");
      }
    }
    PotentialSpec s(Kind::Piecewise);
    s.regions_ = std::move(regions);
    return s;
  }

  /// Hard walls at +-half_width (the solution must vanish there).
  PotentialSpec with_dirichlet(double half_width) const {
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
      throw Error(ErrorCode::BadParams, "wall half-width must be positive");
    }
    PotentialSpec s = *this;
    s.dirichlet_ = half_width;
    return s;
  }

  Kind kind() const noexcept { return kind_; }
  const PowerSeries& series() const noexcept { return analytic_; }
  const std::vector<PotentialRegion>& regions() const noexcept { return regions_; }
  std::optional<double> dirichlet_half_width() const noexcept { return dirichlet_; }

  /// Domain covered by explicit regions; analytic potentials have none.
  std::optional<Interval> domain() const {
    if (kind_ == Kind::Analytic) return std::nullopt;
    return Interval(regions_.front().interval.a(), regions_.back().interval.b());
  }

  /// Potential expanded about x0, valid up to the next breakpoint to the right.
  /// Points past the outermost regions continue the outermost region's expansion.
  PowerSeries local_at(double x0) const {
    if (kind_ == Kind::Analytic) return recenter(analytic_, x0);
    const PotentialRegion& r = region_at(x0);
    const double shift = x0 - r.interval.a();
    return shift == 0.0 ? r.local : recenter(r.local, shift);
  }

  double value_at(double x) const { return evaluate(local_at(x), 0.0); }

  /// Interior region edges strictly between lo and hi.
  std::vector<double> breakpoints_between(double lo, double hi) const {
    std::vector<double> out;
    for (std::size_t i = 1; i < regions_.size(); ++i) {
      const double x = regions_[i].interval.a();
      if (x > lo && x < hi) out.push_back(x);
    }
    return out;
  }

  /// The mirror potential W(x) = V(-x).
  PotentialSpec reflected() const {
    PotentialSpec s(kind_);
    s.dirichlet_ = dirichlet_;
    if (kind_ == Kind::Analytic) {
      s.analytic_ = reflect(analytic_);
      return s;
    }
    for (auto it = regions_.rbegin(); it != regions_.rend(); ++it) {
      const double len = it->interval.length();
      s.regions_.push_back({Interval(-it->interval.b(), -it->interval.a()),
                            reflect(recenter(it->local, len))});
    }
    return s;
  }

  /// True when V(x) = V(-x) to within `tol` on every coefficient.
  bool is_symmetric(double tol = 1e-12) const {
    const PotentialSpec m = reflected();
    if (kind_ == Kind::Analytic) {
      for (std::size_t j = 1; j <= analytic_.degree(); j += 2) {
        if (std::abs(analytic_[j]) > tol * (1.0 + std::abs(analytic_[0]))) return false;
      }
      return true;
    }
    if (m.regions_.size() != regions_.size()) return false;
    for (std::size_t i = 0; i < regions_.size(); ++i) {
      const auto& a = regions_[i];
      const auto& b = m.regions_[i];
      if (std::abs(a.interval.a() - b.interval.a()) > tol * (1.0 + std::abs(a.interval.a())) ||
          std::abs(a.interval.b() - b.interval.b()) > tol * (1.0 + std::abs(a.interval.b()))) {
        return false;
      }
      const std::size_t n = std::max(a.local.degree(), b.local.degree());
      for (std::size_t j = 0; j <= n; ++j) {
        if (std::abs(a.local[j] - b.local[j]) > tol * (1.0 + std::abs(a.local[j]))) return false;
      }
    }
    return true;
  }

 private:
  explicit PotentialSpec(Kind k) : kind_(k) {}

  const PotentialRegion& region_at(double x) const {
    for (const auto& r : regions_) {
      if (x < r.interval.b()) return r;
    }
    return regions_.back();
  }

  Kind kind_;
  PowerSeries analytic_;
  std::vector<PotentialRegion> regions_;
  std::optional<double> dirichlet_;
};

struct BoundaryValues {
  double psi = 0.0;
  double dpsi = 0.0;
};

/// One propagated region: the local series about region.a() and its edge data.
struct RegionSolution {
  Interval region;
  PowerSeries series;
  BoundaryValues left;
  BoundaryValues right;
};

struct PropagationOptions {
  double tol = 1e-10;
  std::size_t n_min = 16;
  std::size_t n_max = 4000;
  /// Regions longer than this are split into equal sub-steps.
  double max_step = std::numeric_limits<double>::infinity();
};

namespace detail {

// Local series for y'' + Q(y) y = 0 on [0, h], doubling the degree until both the
// last two terms and the residual at y = h are negligible against the term sums.
inline PowerSeries solve_local(const PowerSeries& q, Seeds seeds, double h, const PropagationOptions& opt) {
  const OdeCoefficients ode{PowerSeries::zero(), q, PowerSeries::zero()};
  const double tol = std::max(opt.tol, 1e-13);
  double q_abs = 0.0;
  for (std::size_t j = q.degree() + 1; j-- > 0;) q_abs = q_abs * h + std::abs(q[j]);
  for (std::size_t n = std::max<std::size_t>(opt.n_min, 4);; n *= 2) {
    const std::size_t deg = std::min(n, opt.n_max);
    const PowerSeries s = solve_series(ode, seeds, deg);
    double total = 0.0;
    for (std::size_t j = deg + 1; j-- > 0;) total = total * h + std::abs(s[j]);
    const auto term = [&](std::size_t j) {
      return s[j] == 0.0 ? 0.0 : std::exp(std::log(std::abs(s[j])) + static_cast<double>(j) * std::log(h));
    };
    const double tail = term(deg) + term(deg - 1);
    const double res = std::abs(ResidualFunction(ode, s)(h));
    if (tail <= tol * total && res <= tol * std::max(q_abs, 1.0) * total) return s;
    if (deg >= opt.n_max) {
      throw Error(ErrorCode::DegreeExhausted,
                  "local series did not converge within degree " + std::to_string(opt.n_max) +
                      " over a step of " + std::to_string(h));
    }
  }
}

inline std::vector<double> segment_edges(const PotentialSpec& spec, double lo, double hi, double max_step) {
  std::vector<double> knots{lo};
  for (double x : spec.breakpoints_between(lo, hi)) knots.push_back(x);
  knots.push_back(hi);
  std::vector<double> edges{lo};
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const double span = knots[i] - knots[i - 1];
    const auto pieces = std::isfinite(max_step)
                            ? static_cast<std::size_t>(std::max(1.0, std::ceil(span / max_step - 1e-9)))
                            : std::size_t{1};
    for (std::size_t k = 1; k < pieces; ++k) {
      edges.push_back(knots[i - 1] + span * static_cast<double>(k) / static_cast<double>(pieces));
    }
    edges.push_back(knots[i]);
  }
  return edges;
}

inline std::vector<RegionSolution> propagate_right(const PotentialSpec& spec, const PhysicalParams& pp,
                                                   double energy, double x_start, BoundaryValues start,
                                                   double x_end, const PropagationOptions& opt) {
  const std::vector<double> edges = segment_edges(spec, x_start, x_end, opt.max_step);
  std::vector<RegionSolution> out;
  out.reserve(edges.size() - 1);
  BoundaryValues bv = start;
  for (std::size_t i = 1; i < edges.size(); ++i) {
    const double l = edges[i - 1];
    const double r = edges[i];
    const SchrodingerProblem local(pp.mass, pp.hbar, spec.local_at(l), energy);
    PowerSeries s;
    try {
      s = solve_local(schrodinger_q(local), {bv.psi, bv.dpsi}, r - l, opt);
    } catch (const NonFiniteCoefficientError& e) {
      throw NonFiniteCoefficientError(e.last_valid_index(),
                                      "region " + std::to_string(i - 1) + ": " + e.what());
    }
    const BoundaryValues next{evaluate(s, r - l), evaluate(derivative(s), r - l)};
    if (!std::isfinite(next.psi) || !std::isfinite(next.dpsi)) {
      throw NonFiniteCoefficientError(s.degree(), "region " + std::to_string(i - 1) +
                                                      ": solution overflowed at the far edge");
    }
    out.push_back({Interval(l, r), std::move(s), bv, next});
    bv = next;
  }
  return out;
}

}  // namespace detail

/// Propagates (psi, psi') given at x_start to x_end, which may lie on either side.
/// Each region's series is expanded about its own left edge, seeded by the values
/// carried across the previous edge. Leftward propagation runs rightward on the
/// mirrored potential and maps the result back.
inline std::vector<RegionSolution> propagate(const PotentialSpec& spec, const PhysicalParams& pp, double energy,
                                             double x_start, BoundaryValues start, double x_end,
                                             const PropagationOptions& opt = {}) {
  if (!std::isfinite(start.psi) || !std::isfinite(start.dpsi)) {
    throw Error(ErrorCode::InvalidArgument, "boundary values must be finite");
  }
  if (x_start == x_end) return {};
  if (x_end > x_start) return detail::propagate_right(spec, pp, energy, x_start, start, x_end, opt);

  const auto mirrored = detail::propagate_right(spec.reflected(), pp, energy, -x_start,
                                                {start.psi, -start.dpsi}, -x_end, opt);
  std::vector<RegionSolution> out;
  out.reserve(mirrored.size());
  for (auto it = mirrored.rbegin(); it != mirrored.rend(); ++it) {
    const double len = it->region.length();
    out.push_back({Interval(-it->region.b(), -it->region.a()), reflect(recenter(it->series, len)),
                   {it->right.psi, -it->right.dpsi},
                   {it->left.psi, -it->left.dpsi}});
  }
  return out;
}

/// Left-to-right propagation across the whole piecewise domain.
inline std::vector<RegionSolution> propagate_piecewise(const PotentialSpec& spec, const PhysicalParams& pp,
                                                       double energy, BoundaryValues left_boundary,
                                                       const PropagationOptions& opt = {}) {
  const auto dom = spec.domain();
  if (!dom) {
    throw Error(ErrorCode::BadParams, "propagate_piecewise needs a piecewise potential");
  }
  return propagate(spec, pp, energy, dom->a(), left_boundary, dom->b(), opt);
}

inline PiecewiseSeries to_piecewise(const std::vector<RegionSolution>& regions) {
  std::vector<LocalSeries> pieces;
  pieces.reserve(regions.size());
  for (const auto& r : regions) pieces.push_back({r.region, r.series});
  return PiecewiseSeries(std::move(pieces));
}

/// For a constant-potential classically forbidden region, the ratio |A/B| of the
/// growing to decaying component in A e^{kappa y} + B e^{-kappa y}, from the left edge data.
inline double growth_contamination(const RegionSolution& region, const PotentialSpec& spec,
                                   const PhysicalParams& pp, double energy) {
  const double v = spec.value_at(region.region.a());
  if (!(v > energy)) {
    throw Error(ErrorCode::BadParams, "region is not classically forbidden at this energy");
  }
  const double kappa = std::sqrt(pp.q_scale() * (v - energy));
  const double grow = 0.5 * (region.left.psi + region.left.dpsi / kappa);
  const double decay = 0.5 * (region.left.psi - region.left.dpsi / kappa);
  return std::abs(grow) / std::abs(decay);
}

/// Signed tail constant: the median of -(j+1) c_{j+1}/c_j over the top quartile.
/// Positive means an e^{-alpha x}-like (decaying) tail, negative a growing one.
inline double tail_decay_estimate(const PowerSeries& s) {
  const std::size_t n = s.degree();
  if (n < 8) throw Error(ErrorCode::DegenerateTail, "series too short to fit a tail");
  std::vector<double> ratios;
  for (std::size_t j = n - n / 4 - 1; j < n; ++j) {
    if (s[j] == 0.0 || s[j + 1] == 0.0) continue;
    ratios.push_back(-static_cast<double>(j + 1) * s[j + 1] / s[j]);
  }
  if (ratios.empty()) throw Error(ErrorCode::DegenerateTail, "no usable coefficient ratios");
  std::nth_element(ratios.begin(), ratios.begin() + static_cast<std::ptrdiff_t>(ratios.size() / 2),
                   ratios.end());
  return ratios[ratios.size() / 2];
}

enum class Parity { Even, Odd };

inline std::string_view to_string(Parity p) noexcept { return p == Parity::Even ? "even" : "odd"; }

struct InfiniteWellLevel {
  double k;
  double energy;
  Parity parity;
};

/// Hard-wall well on [-a, a]: k_n = n pi / 2a, E_n = hbar^2 k_n^2 / 2m, with n >= 1.
/// Odd n are symmetric (cosine) states, even n antisymmetric (sine).
inline InfiniteWellLevel infinite_well_reference(int n, double a, double mass = 1.0, double hbar = 1.0) {
  if (n < 1) throw Error(ErrorCode::BadParams, "quantum number must be >= 1");
  if (!(a > 0.0) || !(mass > 0.0) || !(hbar > 0.0)) {
    throw Error(ErrorCode::BadParams, "well width, mass and hbar must be positive");
  }
  const double k = n * std::numbers::pi / (2.0 * a);
  return {k, hbar * hbar * k * k / (2.0 * mass), n % 2 == 1 ? Parity::Even : Parity::Odd};
}

/// alpha = (2 m E / hbar^2)^(1/3) for the field strength E (real cube root).
inline double airy_alpha(double efield, const PhysicalParams& pp) {
  return std::cbrt(pp.q_scale() * efield);
}

/// Series solution for V = efield * x at E = 0. Every c_{3k+2} vanishes.
inline PowerSeries airy_solution(double efield, const PhysicalParams& pp, Seeds seeds, std::size_t n) {
  if (efield == 0.0 || !std::isfinite(efield)) {
    throw Error(ErrorCode::BadParams, "field strength must be nonzero and finite");
  }
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "airy series needs degree >= 3");
  return solve_schrodinger(SchrodingerProblem(pp.mass, pp.hbar, PowerSeries{0.0, efield}, 0.0), seeds, n);
}

enum class StandardPotential { InfiniteWell, FiniteWell, Linear, Harmonic, Polynomial };

struct StandardParams {
  double a = 1.0;        // well half-width
  double depth = 1.0;    // finite well depth V0
  double efield = 1.0;   // linear slope
  double omega = 1.0;    // oscillator frequency
  double mass = 1.0;
  double hbar = 1.0;
  std::vector<double> coefficients;  // polynomial V_j
  std::optional<double> extent;      // finite well: computational half-width
  double tol = 1e-10;
};

/// Default truncation of a finite well's outer regions: the well edge plus the half-width
/// that leaves a residual norm fraction below tol for the decay constant at E = -V0/2.
inline double finite_well_extent(const StandardParams& p) {
  const double alpha = std::sqrt(p.mass * p.depth) / p.hbar;
  return p.a + 0.5 * estimate_interval(1.0, alpha, Tolerance(p.tol));
}

inline PotentialSpec build_standard(StandardPotential kind, const StandardParams& p) {
  if (!(p.mass > 0.0) || !(p.hbar > 0.0)) {
    throw Error(ErrorCode::BadParams, "mass and hbar must be positive");
  }
  switch (kind) {
    case StandardPotential::InfiniteWell:
      if (!(p.a > 0.0)) throw Error(ErrorCode::BadParams, "well half-width must be positive");
      return PotentialSpec::analytic(PowerSeries{0.0}).with_dirichlet(p.a);
    case StandardPotential::FiniteWell: {
      if (!(p.a > 0.0) || !(p.depth > 0.0)) {
        throw Error(ErrorCode::BadParams, "finite well needs positive half-width and depth");
      }
      const double ext = p.extent.value_or(finite_well_extent(p));
      if (!(ext > p.a)) throw Error(ErrorCode::BadParams, "extent must exceed the well half-width");
      return PotentialSpec::piecewise({{Interval(-ext, -p.a), PowerSeries{0.0}},
                                       {Interval(-p.a, p.a), PowerSeries{-p.depth}},
                                       {Interval(p.a, ext), PowerSeries{0.0}}});
    }
    case StandardPotential::Linear:
      if (p.efield == 0.0 || !std::isfinite(p.efield)) {
        throw Error(ErrorCode::BadParams, "field strength must be nonzero");
      }
      return PotentialSpec::analytic(PowerSeries{0.0, p.efield});
    case StandardPotential::Harmonic:
      if (!(p.omega > 0.0)) throw Error(ErrorCode::BadParams, "omega must be positive");
      return PotentialSpec::analytic(PowerSeries{0.0, 0.0, 0.5 * p.mass * p.omega * p.omega});
    case StandardPotential::Polynomial:
      if (p.coefficients.empty()) throw Error(ErrorCode::BadParams, "polynomial needs coefficients");
      return PotentialSpec::analytic(PowerSeries(p.coefficients));
  }
  throw Error(ErrorCode::BadParams, "unknown potential");
}

}  // namespace psse
