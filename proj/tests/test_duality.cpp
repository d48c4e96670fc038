#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "doctest.h"
#include "frostlab/duality.hpp"

using namespace frostlab;

TEST_CASE("point and line duals take the textbook form") {
    SlopeInterceptLine l = dualize_point({2.0, 3.0});
    CHECK(l.slope == 2.0);
    CHECK(l.intercept == 3.0);
    Point2 p = dualize_line({-1.0, 0.5});
    CHECK(p.x == 1.0);
    CHECK(p.y == 0.5);
    // Double dual mirrors the first coordinate.
    Point2 q = dualize_line(dualize_point({2.0, 3.0}));
    CHECK(q.x == -2.0);
    CHECK(q.y == 3.0);
}

TEST_CASE("duality preserves incidence on seeded pairs") {
    std::mt19937_64 rng(31);
    auto coin = [&] { return (rng() >> 11) * 0x1p-53; };
    int mismatches = 0;
    for (int i = 0; i < 20000; ++i) {
        Point2 p{coin() * 2 - 1, coin() * 2 - 1};
        SlopeInterceptLine l{coin() * 2 - 1, coin() * 2 - 1};
        // Half the time force an exact incidence.
        if (i % 2 == 0) l.intercept = p.y - l.slope * p.x;
        DualityIncidence chk = check_duality_incidence(p, l);
        if (chk.lhs != chk.rhs) ++mismatches;
        if (i % 2 == 0) CHECK(chk.lhs);
    }
    CHECK(mismatches == 0);
}

TEST_CASE("angle form agrees with the slope-intercept chart") {
    Line h = to_angle_form({0.0, 2.0});
    CHECK(h.theta == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(h.offset == doctest::Approx(2.0).epsilon(1e-15));
    Line d = to_angle_form({1.0, 0.0});
    CHECK(d.theta == doctest::Approx(0.7853981633974483).epsilon(1e-15));
    CHECK(d.offset == doctest::Approx(0.0).epsilon(1e-15));

    std::mt19937_64 rng(17);
    auto coin = [&] { return (rng() >> 11) * 0x1p-53; };
    for (int i = 0; i < 5000; ++i) {
        SlopeInterceptLine l{std::tan((coin() - 0.5) * 3.0), coin() * 2 - 1};
        SlopeInterceptLine back = from_angle_form(to_angle_form(l));
        CHECK(back.slope == doctest::Approx(l.slope).epsilon(1e-9));
        CHECK(back.intercept == doctest::Approx(l.intercept).epsilon(1e-9));
        // The two forms mark the same points as incident.
        Point2 p{coin() * 2 - 1, 0.0};
        p.y = l.slope * p.x + l.intercept;
        CHECK(std::fabs(to_angle_form(l).signed_dist(p)) < 1e-9);
    }
}

TEST_CASE("vertical lines have no slope-intercept form") {
    Line vertical(1.5707963267948966, 0.25);
    CHECK_THROWS_WITH(from_angle_form(vertical), "outside slope-intercept chart");
}

TEST_CASE("chart distortion on a horizontal pair is exactly one") {
    // (0,0) vs (0,1): dual lines y = 0 and y = 1, line distance 1 = point
    // distance.
    std::vector<std::pair<Point2, Point2>> pairs{{{0.0, 0.0}, {0.0, 1.0}}};
    DistortionReport rep = chart_metric_distortion(pairs);
    CHECK(rep.pairs_used == 1);
    CHECK(rep.min_ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.max_ratio == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("chart distortion is bounded on the unit chart") {
    std::mt19937_64 rng(4);
    auto coin = [&] { return (rng() >> 11) * 0x1p-53; };
    std::vector<std::pair<Point2, Point2>> pairs;
    for (int i = 0; i < 2000; ++i)
        pairs.push_back({{coin() * 2 - 1, coin() * 2 - 1},
                         {coin() * 2 - 1, coin() * 2 - 1}});
    // Coincident pair is skipped, not a division by zero.
    pairs.push_back({{0.3, 0.3}, {0.3, 0.3}});
    DistortionReport rep = chart_metric_distortion(pairs);
    CHECK(rep.pairs_used == 2000);
    CHECK(rep.min_ratio > 0.0);
    CHECK(rep.min_ratio <= rep.max_ratio);
    // On |slope| <= 1 the chart is bi-Lipschitz with modest constants.
    CHECK(rep.min_ratio > 0.1);
    CHECK(rep.max_ratio < 10.0);
}
