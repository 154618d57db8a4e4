#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "psse/error.hpp"
#include "psse/series.hpp"

namespace psse {

/// A series valid on `region`, written in the local coordinate y = x - region.a().
struct LocalSeries {
  Interval region;
  PowerSeries series;

  double operator()(double x) const { return evaluate(series, x - region.a()); }
  double slope(double x) const { return evaluate(derivative(series), x - region.a()); }
  double value_at_right() const { return evaluate(series, region.length()); }
  double slope_at_right() const { return evaluate(derivative(series), region.length()); }
};

/// Contiguous, ordered chain of local series.
class PiecewiseSeries {
 public:
  PiecewiseSeries() = default;

  explicit PiecewiseSeries(std::vector<LocalSeries> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) {
      throw Error(ErrorCode::InvalidArgument, "piecewise series needs at least one piece");
    }
    for (std::size_t i = 1; i < pieces_.size(); ++i) {
      if (pieces_[i].region.a() != pieces_[i - 1].region.b()) {
        throw Error(ErrorCode::InvalidArgument, "piecewise series pieces must be contiguous");
      }
    }
  }

  const std::vector<LocalSeries>& pieces() const noexcept { return pieces_; }
  bool empty() const noexcept { return pieces_.empty(); }
  Interval domain() const { return {pieces_.front().region.a(), pieces_.back().region.b()}; }

  std::size_t max_degree() const {
    std::size_t n = 0;
    for (const auto& p : pieces_) n = std::max(n, p.series.degree());
    return n;
  }

  const LocalSeries& piece_at(double x) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                               [](double v, const LocalSeries& p) { return v < p.region.b(); });
    if (it == pieces_.end()) return pieces_.back();
    return *it;
  }

  /// Evaluates the owning piece; points outside the domain use the nearest end piece.
  double operator()(double x) const { return piece_at(x)(x); }

  PiecewiseSeries scaled(double factor) const {
    std::vector<LocalSeries> out;
    out.reserve(pieces_.size());
    for (const auto& p : pieces_) out.push_back({p.region, scale(p.series, factor)});
    return PiecewiseSeries(std::move(out));
  }

  /// Pieces clipped to [lo, hi]; a clipped piece keeps its series recentred on its new left edge.
  PiecewiseSeries clipped(double lo, double hi) const {
    std::vector<LocalSeries> out;
    for (const auto& p : pieces_) {
      const double a = std::max(lo, p.region.a());
      const double b = std::min(hi, p.region.b());
      if (!(a < b)) continue;
      const double shift = a - p.region.a();
      out.push_back({Interval(a, b), shift == 0.0 ? p.series : recenter(p.series, shift)});
    }
    return PiecewiseSeries(std::move(out));
  }

 private:
  std::vector<LocalSeries> pieces_;
};

}  // namespace psse
