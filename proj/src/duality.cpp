#include "frostlab/duality.hpp"

#include <cmath>
#include <stdexcept>

namespace frostlab {

namespace {
constexpr double kIncidenceTol = 1e-9;
constexpr double kVerticalTol = 1e-12;
}  // namespace

SlopeInterceptLine dualize_point(const Point2& p) { return {p.x, p.y}; }

Point2 dualize_line(const SlopeInterceptLine& l) { return {-l.slope, l.intercept}; }

Line to_angle_form(const SlopeInterceptLine& l) {
    double theta = std::atan(l.slope);  // in (-pi/2, pi/2); ctor canonicalizes
    return Line(theta, l.intercept * std::cos(theta));
}

SlopeInterceptLine from_angle_form(const Line& l) {
    double c = std::cos(l.theta);
    if (std::abs(c) < kVerticalTol)
        throw std::runtime_error("outside slope-intercept chart");
    return {std::tan(l.theta), l.offset / c};
}

DualityIncidence check_duality_incidence(const Point2& p, const SlopeInterceptLine& l) {
    DualityIncidence r;
    r.lhs_residual = std::abs(l.slope * p.x + l.intercept - p.y);
    Point2 dual_pt = dualize_line(l);
    SlopeInterceptLine dual_ln = dualize_point(p);
    r.rhs_residual = std::abs(dual_ln.slope * dual_pt.x + dual_ln.intercept - dual_pt.y);
    r.lhs = r.lhs_residual <= kIncidenceTol;
    r.rhs = r.rhs_residual <= kIncidenceTol;
    return r;
}

DistortionReport chart_metric_distortion(std::span<const std::pair<Point2, Point2>> sample) {
    DistortionReport rep;
    bool first = true;
    for (const auto& [p, q] : sample) {
        double base = dist(p, q);
        if (base == 0.0) continue;
        double lm = line_metric(to_angle_form(dualize_point(p)),
                                to_angle_form(dualize_point(q)));
        double ratio = lm / base;
        if (first || ratio < rep.min_ratio) rep.min_ratio = ratio;
        if (first || ratio > rep.max_ratio) rep.max_ratio = ratio;
        first = false;
        ++rep.pairs_used;
    }
    return rep;
}

}  // namespace frostlab
