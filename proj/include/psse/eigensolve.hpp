#pragma once

// Bound-state energies by shooting: scan E for sign changes of the solution at the
// edge of the approximation interval, bisect each bracket, then rebuild the state
// on short patches so its integrals stay well conditioned.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "psse/error.hpp"
#include "psse/observables.hpp"
#include "psse/piecewise.hpp"
#include "psse/potentials.hpp"
#include "psse/recurrence.hpp"
#include "psse/series.hpp"

namespace psse {

enum class ParityMode { Even, Odd, Both, None };

/// How a trial solution is seeded at the origin.
enum class Shooting {
  Even,     // (c0, c1) = (1, 0), objective psi(b)
  Odd,      // (c0, c1) = (0, 1), objective psi(b)
  Matched,  // both seeds; objective is the 2x2 determinant of the endpoint values
};

inline std::string_view to_string(Shooting s) noexcept {
  switch (s) {
    case Shooting::Even: return "even";
    case Shooting::Odd: return "odd";
    case Shooting::Matched: return "none";
  }
  return "none";
}

enum class Direction { Rightward, Leftward };

struct ScanConfig {
  double e_min = 0.0;
  double e_max = 1.0;
  std::size_t grid_points = 64;
  /// Starting degree of origin-centred series; raised automatically if it does not
  /// converge at the endpoint.
  std::size_t degree = 200;
  /// Half-width b of the evaluation interval; 0 picks it from the tail estimate.
  double endpoint = 0.0;
  ParityMode parity = ParityMode::Both;
  double energy_tol = 1e-12;
  int max_bisections = 60;
  /// Local minima of |objective| below capture_factor * median are probed as near-tangent roots.
  double capture_factor = 1e-3;
  /// Series truncation, propagation and principal-fraction tolerance.
  double tol = 1e-10;
  std::size_t n_max = 4000;
  /// Maximum patch length used for piecewise shooting and for building states.
  double patch_step = 1.0;
  unsigned threads = 1;
  /// Side of the origin the parity objective shoots towards.
  Direction direction = Direction::Rightward;
  int max_doublings = 5;

  void validate() const {
    if (!std::isfinite(e_min) || !std::isfinite(e_max) || !(e_min < e_max)) {
      throw Error(ErrorCode::InvalidArgument, "energy range needs finite e_min < e_max");
    }
    if (grid_points < 8) throw Error(ErrorCode::InvalidArgument, "scan grid needs at least 8 points");
    if (degree < 2 || n_max < degree) {
      throw Error(ErrorCode::InvalidArgument, "degree must satisfy 2 <= degree <= n_max");
    }
    if (!(endpoint >= 0.0) || !std::isfinite(endpoint)) {
      throw Error(ErrorCode::InvalidArgument, "endpoint must be finite and non-negative");
    }
    if (!(patch_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "patch step must be positive");
    (void)Tolerance{tol};
  }
};

struct BoundProblem {
  PotentialSpec potential;
  PhysicalParams params;
};

struct Bracket {
  double lo;
  double hi;
  Shooting shooting;
  bool tangent = false;
};

struct Eigenstate {
  /// Node count (interior sign changes), counted from 0.
  int n = 0;
  double energy = 0.0;
  /// Normalized series about the origin (the central piece for piecewise potentials).
  PowerSeries wavefunction;
  Interval interval{-1.0, 1.0};
  /// Largest |psi| of the normalized state at the interval ends.
  double endpoint_value = 0.0;
  Shooting shooting = Shooting::Even;
  /// The normalized state as a chain of short local series over `interval`.
  PiecewiseSeries regions;
  /// Norm squared of the unit-seed solution over `interval`, before normalization.
  double seed_norm = 0.0;
};

struct BoundStates {
  std::vector<Eigenstate> states;
  std::vector<std::string> warnings;
  double endpoint = 0.0;
};

namespace detail {

template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline double endpoint_of(const BoundProblem& prob, const ScanConfig& cfg) {
  if (auto a = prob.potential.dirichlet_half_width()) return *a;
  if (!(cfg.endpoint > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "endpoint must be resolved before shooting");
  }
  return cfg.endpoint;
}

inline PropagationOptions propagation_options(const ScanConfig& cfg) {
  PropagationOptions opt;
  // Truncation errors of the patches feed straight into the energy, so they are held
  // well below the user tolerance; the extra terms are cheap on unit-length patches.
  opt.tol = std::min(cfg.tol, 1e-13);
  opt.n_max = cfg.n_max;
  opt.max_step = cfg.patch_step;
  return opt;
}

// Origin series of degree >= cfg.degree whose last two terms at |x_end| are negligible.
inline PowerSeries origin_series(const BoundProblem& prob, double energy, Seeds seeds, double x_end,
                                 const ScanConfig& cfg) {
  const SchrodingerProblem sp(prob.params.mass, prob.params.hbar, prob.potential.series(), energy);
  const double h = std::abs(x_end);
  const double lh = std::log(h);
  for (std::size_t n = cfg.degree;; n *= 2) {
    const std::size_t deg = std::min(n, cfg.n_max);
    PowerSeries s = solve_schrodinger(sp, seeds, deg);
    double total = 0.0;
    double tail = 0.0;
    for (std::size_t j = 0; j <= deg; ++j) {
      const double t = s[j] == 0.0 ? 0.0 : std::exp(std::log(std::abs(s[j])) + static_cast<double>(j) * lh);
      total += t;
      if (j + 2 > deg) tail += t;
    }
    if (tail <= cfg.tol * total) return s;
    if (deg >= cfg.n_max) {
      throw Error(ErrorCode::DegreeExhausted,
                  "origin series does not converge at x = " + std::to_string(x_end) +
                      " within degree " + std::to_string(cfg.n_max));
    }
  }
}

inline BoundaryValues shoot(const BoundProblem& prob, const ScanConfig& cfg, double energy, Seeds seeds,
                            double x_end) {
  // A single origin series is only trusted inside one patch: further out its terms
  // cancel and the endpoint value drowns in rounding noise near an eigenvalue.
  if (prob.potential.kind() == PotentialSpec::Kind::Analytic && std::abs(x_end) <= cfg.patch_step) {
    const PowerSeries s = origin_series(prob, energy, seeds, x_end, cfg);
    return {evaluate(s, x_end), evaluate(derivative(s), x_end)};
  }
  const auto regions = propagate(prob.potential, prob.params, energy, 0.0, {seeds.c0, seeds.c1}, x_end,
                                 propagation_options(cfg));
  return x_end > 0.0 ? regions.back().right : regions.front().left;
}

inline Seeds seeds_for(Shooting s) {
  return s == Shooting::Odd ? Seeds{0.0, 1.0} : Seeds{1.0, 0.0};
}

// Unit seed vector minimizing psi(a)^2 + psi(b)^2 for psi = c0 u + c1 v: the eigenvector of
// the smallest eigenvalue of G^T G with G = [[u(a), v(a)], [u(b), v(b)]].
inline Seeds matched_seeds(double ua, double va, double ub, double vb) {
  const double s = std::max({std::abs(ua), std::abs(va), std::abs(ub), std::abs(vb)});
  ua /= s;
  va /= s;
  ub /= s;
  vb /= s;
  const double m00 = ua * ua + ub * ub;
  const double m01 = ua * va + ub * vb;
  const double m11 = va * va + vb * vb;
  const double half_diff = 0.5 * (m00 - m11);
  const double lambda = 0.5 * (m00 + m11) - std::hypot(half_diff, m01);
  double c0 = m01;
  double c1 = lambda - m00;
  if (std::hypot(c0, c1) < 1e-300) {
    c0 = lambda - m11;
    c1 = m01;
  }
  if (std::hypot(c0, c1) < 1e-300) return {1.0, 0.0};
  const double r = std::hypot(c0, c1);
  return {c0 / r, c1 / r};
}

inline std::vector<Shooting> shootings_for(ParityMode mode) {
  switch (mode) {
    case ParityMode::Even: return {Shooting::Even};
    case ParityMode::Odd: return {Shooting::Odd};
    case ParityMode::Both: return {Shooting::Even, Shooting::Odd};
    case ParityMode::None: return {Shooting::Matched};
  }
  return {};
}

}  // namespace detail

/// Signed shooting objective at energy E. For parity seeds this is psi(b) of the
/// unnormalized solution (psi(-b) when shooting leftward); for matched shooting it is
/// the determinant u(a) v(b) - u(b) v(a) scaled to [-1, 1], whose zeros are exactly the
/// energies where some seed ratio makes both endpoint values vanish.
inline double endpoint_objective(const BoundProblem& prob, double energy, const ScanConfig& cfg,
                                 Shooting shooting) {
  const double b = detail::endpoint_of(prob, cfg);
  if (shooting == Shooting::Matched) {
    const double ub = detail::shoot(prob, cfg, energy, {1.0, 0.0}, b).psi;
    const double vb = detail::shoot(prob, cfg, energy, {0.0, 1.0}, b).psi;
    const double ua = detail::shoot(prob, cfg, energy, {1.0, 0.0}, -b).psi;
    const double va = detail::shoot(prob, cfg, energy, {0.0, 1.0}, -b).psi;
    const double na = std::hypot(ua, va);
    const double nb = std::hypot(ub, vb);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return (ua / na) * (vb / nb) - (ub / nb) * (va / na);
  }
  const double x_end = cfg.direction == Direction::Rightward ? b : -b;
  return detail::shoot(prob, cfg, energy, detail::seeds_for(shooting), x_end).psi;
}

/// Brackets for one shooting mode: every sign change on the uniform grid, plus
/// near-tangent local minima of |objective|. Returns an empty list when none are found.
inline std::vector<Bracket> scan_brackets(const BoundProblem& prob, const ScanConfig& cfg, Shooting shooting) {
  const std::size_t n = cfg.grid_points;
  std::vector<double> e(n);
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    e[i] = cfg.e_min + (cfg.e_max - cfg.e_min) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  detail::parallel_for(n, cfg.threads, [&](std::size_t i) { f[i] = endpoint_objective(prob, e[i], cfg, shooting); });

  std::vector<double> mags(n);
  for (std::size_t i = 0; i < n; ++i) mags[i] = std::abs(f[i]);
  std::vector<double> sorted = mags;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted.end());
  const double capture = cfg.capture_factor * sorted[n / 2];

  std::vector<Bracket> out;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (f[i] == 0.0) {
      out.push_back({e[i], e[i], shooting});
    } else if (f[i] * f[i + 1] < 0.0) {
      out.push_back({e[i], e[i + 1], shooting});
    }
  }
  if (f[n - 1] == 0.0) out.push_back({e[n - 1], e[n - 1], shooting});
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const bool local_min = mags[i] < mags[i - 1] && mags[i] < mags[i + 1];
    const bool crossing = f[i - 1] * f[i] <= 0.0 || f[i] * f[i + 1] <= 0.0;
    if (local_min && !crossing && mags[i] < capture) {
      out.push_back({e[i - 1], e[i + 1], shooting, true});
    }
  }
  std::sort(out.begin(), out.end(), [](const Bracket& a, const Bracket& b) { return a.lo < b.lo; });
  return out;
}

/// Brackets over every shooting mode the config requests. Throws EmptyScan if none.
inline std::vector<Bracket> scan_energies(const BoundProblem& prob, const ScanConfig& cfg) {
  cfg.validate();
  std::vector<Bracket> all;
  for (Shooting s : detail::shootings_for(cfg.parity)) {
    auto b = scan_brackets(prob, cfg, s);
    all.insert(all.end(), b.begin(), b.end());
  }
  if (all.empty()) {
    throw Error(ErrorCode::EmptyScan, "no sign change or near-zero minimum in [" +
                                          std::to_string(cfg.e_min) + ", " + std::to_string(cfg.e_max) +
                                          "]; widen the range, raise the degree or refine the grid");
  }
  return all;
}

namespace detail {

struct StateSampling {
  std::vector<double> x;
  std::vector<double> psi;
  std::vector<double> env;
};

inline StateSampling sample_state(const PiecewiseSeries& chain, double kappa_ref, std::size_t count) {
  const Interval dom = chain.domain();
  StateSampling s;
  s.x.resize(count);
  s.psi.resize(count);
  s.env.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = dom.a() + dom.length() * static_cast<double>(i) / static_cast<double>(count - 1);
    const auto& piece = chain.piece_at(x);
    const double v = piece(x);
    const double d = piece.slope(x);
    s.x[i] = x;
    s.psi[i] = v;
    s.env[i] = std::hypot(v, d / kappa_ref);
  }
  return s;
}

inline int count_nodes(const PiecewiseSeries& chain, std::size_t count = 4001) {
  const StateSampling s = sample_state(chain, 1.0, count);
  double peak = 0.0;
  for (double v : s.psi) peak = std::max(peak, std::abs(v));
  const double floor = 1e-7 * peak;
  int nodes = 0;
  int last_sign = 0;
  for (double v : s.psi) {
    if (std::abs(v) <= floor) continue;
    const int sign = v > 0.0 ? 1 : -1;
    if (last_sign != 0 && sign != last_sign) ++nodes;
    last_sign = sign;
  }
  return nodes;
}

}  // namespace detail

/// Rebuilds the state at a converged energy: patch propagation from the origin to +-b,
/// truncation to the principal fraction (envelope above sqrt(tol) of its peak), and
/// normalization over that interval.
inline Eigenstate build_state(const BoundProblem& prob, const ScanConfig& cfg, double energy, Shooting shooting) {
  const double b = detail::endpoint_of(prob, cfg);
  Seeds seeds = detail::seeds_for(shooting);
  if (shooting == Shooting::Matched) {
    const auto ub = detail::shoot(prob, cfg, energy, {1.0, 0.0}, b).psi;
    const auto vb = detail::shoot(prob, cfg, energy, {0.0, 1.0}, b).psi;
    const auto ua = detail::shoot(prob, cfg, energy, {1.0, 0.0}, -b).psi;
    const auto va = detail::shoot(prob, cfg, energy, {0.0, 1.0}, -b).psi;
    seeds = detail::matched_seeds(ua, va, ub, vb);
  }
  const PropagationOptions opt = detail::propagation_options(cfg);
  auto left = propagate(prob.potential, prob.params, energy, 0.0, {seeds.c0, seeds.c1}, -b, opt);
  const auto right = propagate(prob.potential, prob.params, energy, 0.0, {seeds.c0, seeds.c1}, b, opt);
  left.insert(left.end(), right.begin(), right.end());
  PiecewiseSeries chain = to_piecewise(left);

  double lo = -b;
  double hi = b;
  if (!prob.potential.dirichlet_half_width()) {
    const double v_edge = std::max(prob.potential.value_at(b), prob.potential.value_at(-b));
    const double kappa_ref = std::max(std::sqrt(prob.params.q_scale() * std::abs(v_edge - energy)), 1.0 / b);
    // Shooting leaves a growing remnant that dominates near +-b; the physical part of
    // each side ends at the envelope minimum between the origin and the endpoint.
    const auto s = detail::sample_state(chain, kappa_ref, 4001);
    const auto begin = s.env.begin();
    const auto origin = begin + static_cast<std::ptrdiff_t>(s.env.size() / 2);
    const auto l_min = static_cast<std::size_t>(std::min_element(begin, origin + 1) - begin);
    const auto r_min = static_cast<std::size_t>(std::min_element(origin, s.env.end()) - begin);
    const auto peak = static_cast<std::size_t>(
        std::max_element(begin + static_cast<std::ptrdiff_t>(l_min), begin + static_cast<std::ptrdiff_t>(r_min) + 1) -
        begin);
    const double cut = std::sqrt(cfg.tol) * s.env[peak];
    std::size_t r = peak;
    while (r < r_min && s.env[r] >= cut) ++r;
    std::size_t l = peak;
    while (l > l_min && s.env[l] >= cut) --l;
    lo = s.x[l];
    hi = s.x[r];
    chain = chain.clipped(lo, hi);
  }
  const Interval iv(lo, hi);
  const double raw_norm = norm_squared(chain);
  const PiecewiseSeries normalized = normalize(chain, 0.0);
  const double ref = seeds.c0 != 0.0 ? seeds.c0 : seeds.c1;
  const double factor = std::copysign(1.0 / std::sqrt(raw_norm), ref);

  PowerSeries central;
  if (prob.potential.kind() == PotentialSpec::Kind::Analytic) {
    central = scale(detail::origin_series(prob, energy, seeds, std::max(std::abs(lo), std::abs(hi)), cfg), factor);
  } else {
    central = scale(right.front().series, factor);
  }

  Eigenstate st;
  st.energy = energy;
  st.shooting = shooting;
  st.interval = iv;
  st.regions = normalized;
  st.wavefunction = std::move(central);
  st.seed_norm = raw_norm;
  st.endpoint_value = std::max(std::abs(normalized(lo)), std::abs(normalized(hi)));
  st.n = detail::count_nodes(normalized);
  return st;
}

/// Bisection on the signed objective. A bracket that loses its sign change is retried
/// once at twice the degree before failing with LostBracket.
inline Eigenstate refine_energy(const BoundProblem& prob, const ScanConfig& cfg, Bracket bracket) {
  ScanConfig run = cfg;
  auto f = [&](double e) { return endpoint_objective(prob, e, run, bracket.shooting); };

  double lo = bracket.lo;
  double hi = bracket.hi;
  double flo = f(lo);
  double fhi = f(hi);

  if (bracket.tangent) {
    constexpr int kProbes = 32;
    bool found = false;
    double prev_e = lo;
    double prev_f = flo;
    for (int i = 1; i <= kProbes && !found; ++i) {
      const double e = bracket.lo + (bracket.hi - bracket.lo) * i / kProbes;
      const double fe = f(e);
      if (prev_f * fe <= 0.0) {
        lo = prev_e;
        flo = prev_f;
        hi = e;
        fhi = fe;
        found = true;
      }
      prev_e = e;
      prev_f = fe;
    }
    if (!found) {
      throw Error(ErrorCode::LostBracket, "near-tangent minimum near E = " +
                                              std::to_string(0.5 * (bracket.lo + bracket.hi)) +
                                              " has no sign change");
    }
  }

  if (lo != hi && flo * fhi > 0.0) {
    run.degree = std::min(cfg.degree * 2, cfg.n_max);
    run.tol = std::max(cfg.tol * 1e-2, 1e-14);
    flo = f(lo);
    fhi = f(hi);
    if (flo * fhi > 0.0) {
      throw Error(ErrorCode::LostBracket, "sign change in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                              "] disappears at higher degree");
    }
  }

  for (int it = 0; it < cfg.max_bisections && lo != hi; ++it) {
    if (flo == 0.0) {
      hi = lo;
      break;
    }
    if (fhi == 0.0) {
      lo = hi;
      break;
    }
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0) && fm != 0.0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
    if (hi - lo <= cfg.energy_tol * std::max(std::abs(lo), std::abs(hi))) break;
  }
  const double energy = std::abs(flo) <= std::abs(fhi) ? lo : hi;
  return build_state(prob, run, energy, bracket.shooting);
}

namespace detail {

// First x > 0 where V(x) and V(-x) both reach e, scanning outward.
inline std::optional<double> turning_point(const PotentialSpec& v, double e) {
  for (double x = 0.01; x < 1e3; x *= 1.05) {
    if (v.value_at(x) >= e && v.value_at(-x) >= e) return x;
  }
  return std::nullopt;
}

inline double initial_endpoint(const BoundProblem& prob, const ScanConfig& cfg) {
  const double e_mid = 0.5 * (cfg.e_min + cfg.e_max);
  const Tolerance tau(cfg.tol);
  if (prob.potential.kind() == PotentialSpec::Kind::Piecewise) {
    const auto& regs = prob.potential.regions();
    const double edge = std::max(std::abs(regs.back().interval.a()), std::abs(regs.front().interval.b()));
    const double v_out = std::min(prob.potential.value_at(regs.back().interval.a()),
                                  prob.potential.value_at(regs.front().interval.a()));
    if (!(e_mid < v_out)) {
      throw Error(ErrorCode::BadParams, "scan midpoint is not below the outer potential; give an endpoint");
    }
    const double alpha = std::sqrt(prob.params.q_scale() * (v_out - e_mid));
    return edge + 0.5 * estimate_interval(1.0, alpha, tau);
  }
  const auto xt = turning_point(prob.potential, cfg.e_max);
  if (!xt) {
    throw Error(ErrorCode::BadParams, "potential does not confine the scan range; give an endpoint");
  }
  const double x1 = *xt + 1.0;
  const double barrier = std::min(prob.potential.value_at(x1), prob.potential.value_at(-x1));
  const double alpha = std::sqrt(prob.params.q_scale() * std::max(barrier - e_mid, 1e-12));
  return *xt + 0.5 * estimate_interval(1.0, alpha, tau);
}

inline void check_nodes(BoundStates& out, ParityMode mode) {
  const int step = (mode == ParityMode::Even || mode == ParityMode::Odd) ? 2 : 1;
  int expected = mode == ParityMode::Odd ? 1 : 0;
  for (const auto& s : out.states) {
    if (s.n != expected) {
      out.warnings.push_back("NodeGap: expected node count " + std::to_string(expected) + " at E = " +
                             std::to_string(s.energy) + ", found " + std::to_string(s.n));
      expected = s.n;
    }
    expected += step;
  }
}

inline BoundStates solve_at_endpoint(const BoundProblem& prob, const ScanConfig& cfg) {
  BoundStates out;
  out.endpoint = detail::endpoint_of(prob, cfg);
  const auto brackets = scan_energies(prob, cfg);
  std::vector<std::optional<Eigenstate>> refined(brackets.size());
  std::vector<std::string> failures(brackets.size());
  parallel_for(brackets.size(), cfg.threads, [&](std::size_t i) {
    try {
      refined[i] = refine_energy(prob, cfg, brackets[i]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::LostBracket || !brackets[i].tangent) throw;
      failures[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < brackets.size(); ++i) {
    if (refined[i]) {
      out.states.push_back(std::move(*refined[i]));
    } else if (!failures[i].empty()) {
      out.warnings.push_back(failures[i]);
    }
  }
  std::sort(out.states.begin(), out.states.end(),
            [](const Eigenstate& a, const Eigenstate& b) { return a.energy < b.energy; });
  std::vector<Eigenstate> unique;
  for (auto& s : out.states) {
    if (!unique.empty() && std::abs(s.energy - unique.back().energy) <=
                               1e-9 * std::max(1.0, std::abs(s.energy))) {
      continue;
    }
    unique.push_back(std::move(s));
  }
  out.states = std::move(unique);
  check_nodes(out, cfg.parity);
  return out;
}

inline bool same_spectrum(const BoundStates& a, const BoundStates& b, const Tolerance& tau) {
  if (a.states.size() != b.states.size()) return false;
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    if (!principal_fraction_check(a.states[i].energy, b.states[i].energy, tau).converged) return false;
    if (!principal_fraction_check(a.states[i].seed_norm, b.states[i].seed_norm, tau).converged) return false;
  }
  return true;
}

}  // namespace detail

/// Finds, refines and orders every bound state the scan brackets. With an explicit
/// endpoint (or hard walls) it solves once. Otherwise the endpoint starts at the tail
/// estimate and is doubled until energies and norms agree between b and 2b.
inline BoundStates solve_bound_states(const BoundProblem& prob, const ScanConfig& cfg) {
  cfg.validate();
  if (cfg.parity != ParityMode::None && !prob.potential.is_symmetric()) {
    throw Error(ErrorCode::BadParams, "parity shooting needs a symmetric potential; use parity none");
  }
  if (prob.potential.dirichlet_half_width() || cfg.endpoint > 0.0) {
    return detail::solve_at_endpoint(prob, cfg);
  }
  ScanConfig run = cfg;
  run.endpoint = detail::initial_endpoint(prob, cfg);
  BoundStates current = detail::solve_at_endpoint(prob, run);
  const Tolerance tau(cfg.tol);
  for (int d = 0; d < cfg.max_doublings; ++d) {
    ScanConfig wider = run;
    wider.endpoint = 2.0 * run.endpoint;
    BoundStates next;
    try {
      next = detail::solve_at_endpoint(prob, wider);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonFiniteCoefficient && e.code() != ErrorCode::DegreeExhausted) throw;
      current.warnings.push_back(std::string("endpoint doubling stopped: ") + e.what());
      return current;
    }
    const bool converged = detail::same_spectrum(current, next, tau);
    current = std::move(next);
    run = wider;
    if (converged) return current;
  }
  current.warnings.push_back("principal fraction not converged after " + std::to_string(cfg.max_doublings) +
                             " endpoint doublings");
  return current;
}

}  // namespace psse
