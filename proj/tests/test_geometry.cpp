#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "frostlab/geometry.hpp"

using namespace frostlab;

TEST_CASE("scale basics") {
    CHECK(Scale(0).value() == 1.0);
    CHECK(Scale(4).value() == 1.0 / 16);
    CHECK_THROWS_WITH(Scale(-1), "scale out of range");
}

TEST_CASE("point set separation check") {
    // Spacing exactly delta passes (closed condition)...
    std::vector<Point2> pts{{0.0, 0.0}, {0.25, 0.0}, {0.5, 0.0}};
    CHECK_NOTHROW(PointSet(pts, Scale(2)));
    // ...anything closer does not.
    pts.push_back({0.6, 0.0});
    CHECK_THROWS_AS(PointSet(pts, Scale(2)), std::invalid_argument);
    // unchecked() takes the same data without the promise.
    PointSet raw = PointSet::unchecked(pts, Scale(2));
    CHECK(raw.size() == 4);
    CHECK_FALSE(raw.separation_checked());
}

TEST_CASE("points must sit in the ambient window") {
    std::vector<Point2> pts{{3.0, 0.0}};
    CHECK_THROWS_AS(PointSet(pts, Scale(1)), std::invalid_argument);
}

TEST_CASE("covering numbers on crafted sets") {
    std::vector<Point2> pts{{0.0, 0.0}, {0.3, 0.3}, {0.9, 0.9}};
    CHECK(covering_number(pts, Scale(1)) == 2);  // cells (0,0),(0,0),(1,1)
    CHECK(covering_number(pts, Scale(2)) == 3);
    CHECK(covering_number(pts, Scale(0)) == 1);
    CHECK(covering_number(std::vector<Point2>{}, Scale(3)) == 0);
}

TEST_CASE("dyadic cells are sorted and unique") {
    std::vector<Point2> pts{{0.9, 0.9}, {0.1, 0.1}, {0.12, 0.1}};
    auto cells = dyadic_cells_meeting(pts, 2);
    REQUIRE(cells.size() == 2);
    CHECK(cells[0] == DyadicCell{2, 0, 0});
    CHECK(cells[1] == DyadicCell{2, 3, 3});
}

TEST_CASE("morton key interleaves x into even bits") {
    CHECK(morton_key(0, 0, 4) == 0);
    CHECK(morton_key(1, 0, 4) == 1);
    CHECK(morton_key(0, 1, 4) == 2);
    CHECK(morton_key(3, 5, 4) == 39);  // 0b100111
}

TEST_CASE("window chart round trip") {
    Point2 p{-1.3, 0.7};
    Point2 q = unit_to_window(window_to_unit(p));
    CHECK(q.x == doctest::Approx(p.x).epsilon(1e-15));
    CHECK(q.y == doctest::Approx(p.y).epsilon(1e-15));
    CHECK(in_unit_square(window_to_unit(p)));
}

TEST_CASE("line canonicalization folds the angle to [0,pi)") {
    constexpr double pi = 3.14159265358979323846;
    Line l(pi + 0.3, 0.5);
    CHECK(l.theta == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(l.offset == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("line metric worked values") {
    Line flat0(0.0, 0.0), flat1(0.0, 1.0), vert(1.5707963267948966, 0.0);
    CHECK(line_metric(flat0, flat0) == 0.0);
    CHECK(line_metric(flat0, flat1) == doctest::Approx(1.0).epsilon(1e-12));
    // Orthogonal directions: projection difference has operator norm 1.
    CHECK(line_metric(flat0, vert) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("line metric triangle inequality on random triples") {
    std::mt19937_64 rng(7);
    auto coin = [&] { return (rng() >> 11) * 0x1p-53; };
    for (int i = 0; i < 10000; ++i) {
        Line a(coin() * 3.0, coin() * 2.0 - 1.0);
        Line b(coin() * 3.0, coin() * 2.0 - 1.0);
        Line c(coin() * 3.0, coin() * 2.0 - 1.0);
        const double ab = line_metric(a, b), bc = line_metric(b, c),
                     ac = line_metric(a, c);
        CHECK(ac <= ab + bc + 1e-12);
        CHECK(ab == line_metric(b, a));  // symmetric
    }
}

TEST_CASE("tube membership is closed at the boundary") {
    Tube t(Line(0.0, 0.0), 0.125);  // horizontal strip |y| <= 1/8
    CHECK(tube_contains(t, {0.4, 0.125}));
    CHECK(tube_contains(t, {-1.0, -0.125}));
    CHECK_FALSE(tube_contains(t, {0.0, 0.1251}));
    CHECK_THROWS_AS(Tube(Line(0.0, 0.0), 0.0), std::invalid_argument);
}

TEST_CASE("point grid ball queries match brute force") {
    std::mt19937_64 rng(99);
    auto coin = [&] { return (rng() >> 11) * 0x1p-53; };
    std::vector<Point2> pts;
    for (int i = 0; i < 500; ++i) pts.push_back({coin() * 2 - 1, coin() * 2 - 1});
    PointGrid grid(pts, 0.1);
    std::vector<int> hits;
    for (int trial = 0; trial < 200; ++trial) {
        Point2 c{coin() * 2 - 1, coin() * 2 - 1};
        const double r = coin() * 0.5;
        grid.ball(c, r, hits);
        std::size_t brute = 0;
        for (const auto& p : pts)
            if (dist(p, c) <= r) ++brute;
        CHECK(hits.size() == brute);
        CHECK(grid.count_ball(c, r) == brute);
        CHECK(grid.any_within(c, r) == (brute > 0));
    }
}

TEST_CASE("subset keeps scale and order") {
    std::vector<Point2> pts{{0.0, 0.0}, {0.5, 0.0}, {0.0, 0.5}};
    PointSet P(pts, Scale(1));
    std::vector<int> idx{2, 0};
    PointSet S = P.subset(idx);
    REQUIRE(S.size() == 2);
    CHECK(S[0] == Point2{0.0, 0.5});
    CHECK(S[1] == Point2{0.0, 0.0});
    CHECK(S.scale() == Scale(1));
}
