#pragma once

// Point-line duality in the slope-intercept chart: the point (a,b) maps to
// the line {y = ax + b}, the line {y = cx + d} maps to the point (-c,d),
// and incidence is preserved because both directions reduce to b = ca + d.
// Vertical lines have no chart coordinates and are rejected.

#include <span>
#include <utility>

#include "frostlab/geometry.hpp"

namespace frostlab {

struct SlopeInterceptLine {
    double slope = 0.0;      // c in {y = cx + d}
    double intercept = 0.0;  // d
};

SlopeInterceptLine dualize_point(const Point2& p);
Point2 dualize_line(const SlopeInterceptLine& l);

// Conversions to the angle-offset representation used by tubes. Lines within
// 1e-12 of vertical are outside the chart.
Line to_angle_form(const SlopeInterceptLine& l);
SlopeInterceptLine from_angle_form(const Line& l);

struct DualityIncidence {
    bool lhs = false;  // p on l
    bool rhs = false;  // dualize_line(l) on dualize_point(p)
    double lhs_residual = 0.0;
    double rhs_residual = 0.0;
};

// Both sides evaluated independently at absolute tolerance 1e-9 on the
// defining linear equation. The contract is lhs == rhs.
DualityIncidence check_duality_incidence(const Point2& p, const SlopeInterceptLine& l);

struct DistortionReport {
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    std::size_t pairs_used = 0;  // coincident pairs are skipped
};

// Ratio of line_metric(D(p), D(q)) to |p - q| over the sample pairs. On
// [0,1]^2 the ratios stay within a small constant band of 1 (measured, and
// pinned by a regression test, rather than proved here).
DistortionReport chart_metric_distortion(std::span<const std::pair<Point2, Point2>> sample);

}  // namespace frostlab
