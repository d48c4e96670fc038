#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "frostlab/generators.hpp"
#include "frostlab/regularity.hpp"

using namespace frostlab;

TEST_CASE("cantor product size and scale") {
    PointSet P = cantor_product({4, {0, 1, 2}}, 3);
    CHECK(P.size() == 729);  // (3^3)^2
    CHECK(P.scale() == Scale(6));  // 4^-3 = 2^-6
    CHECK(P.separation_checked());
    for (const auto& p : P.points()) {
        CHECK(p.x >= 0.0);
        CHECK(p.x < 1.0);
    }
    // Base 3 refines to the next power of two: 3^-2 -> 2^-4.
    PointSet Q = cantor_product({3, {0, 2}}, 2);
    CHECK(Q.size() == 16);
    CHECK(Q.scale() == Scale(4));
}

TEST_CASE("cantor product validates its pattern") {
    CHECK_THROWS_WITH(cantor_product({4, {}}, 3), "digit pattern must be nonempty");
    CHECK_THROWS_WITH(cantor_product({4, {0, 5}}, 3), "digit outside base");
    CHECK_THROWS_WITH(cantor_product({1, {0}}, 3), "digit base must be at least 2");
    CHECK_THROWS_WITH(cantor_product({4, {0, 1, 2, 3}}, 13),
                      "generator output too large");
}

TEST_CASE("line sets stay on their line and pass regularity") {
    Line l(0.35, 0.1);
    PointSet P = set_on_line(0.8, Scale(9), l);
    CHECK(P.size() >= 100);  // ~2^{0.8 * 9} = ~150
    CHECK(P.size() <= 500);
    for (const auto& p : P.points()) CHECK(std::fabs(l.signed_dist(p)) < 1e-9);
    CHECK(verify_delta_set(P, 0.8).best_C <= 8.0 + 1e-9);
    CHECK_THROWS_WITH(set_on_line(1.2, Scale(6), l), "a line carries at most dimension 1");
}

TEST_CASE("grid set covers the unit square") {
    PointSet P = grid_set(Scale(2));
    CHECK(P.size() == 16);
    CHECK(covering_number(P, Scale(2)) == 16);
}

TEST_CASE("random delta sets are seeded and regular") {
    PointSet a = random_delta_set(1.0, Scale(8), 7);
    PointSet b = random_delta_set(1.0, Scale(8), 7);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    PointSet c = random_delta_set(1.0, Scale(8), 8);
    CHECK(a.points() != c.points());
    CHECK(verify_delta_set(a, 1.0).best_C <= 32.0 + 1e-9);
    // The binding size window: s = 1.5, m = 8 gives 2^10..2^14 points.
    PointSet big = random_delta_set(1.5, Scale(8), 3);
    CHECK(big.size() >= 1024);
    CHECK(big.size() <= 16384);
}

TEST_CASE("furstenberg config builds tubes with per-tube point sets") {
    FurstenbergConfig fc = furstenberg_config(0.5, 1.0, Scale(8), 5);
    CHECK(fc.gamma == doctest::Approx(1.0).epsilon(1e-12));  // s + min(s,t)
    CHECK(fc.tubes.tubes.size() >= 1);
    CHECK(fc.per_tube.size() == fc.tubes.tubes.size());
    // Every per-tube point lies inside its tube.
    for (std::size_t i = 0; i < fc.per_tube.size(); ++i)
        for (const auto& p : fc.per_tube[i].points())
            CHECK(tube_contains(fc.tubes.tubes[i], p));
    // The union set keeps one representative per occupied delta-cell.
    CHECK(fc.union_set.size() >= fc.per_tube[0].size() / 2);
    CHECK(covering_number(fc.union_set, Scale(8)) == fc.union_set.size());

    // t = 0: a single tube.
    FurstenbergConfig single = furstenberg_config(0.5, 0.0, Scale(8), 5);
    CHECK(single.tubes.tubes.size() == 1);
    CHECK(single.gamma == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("furstenberg determinism") {
    FurstenbergConfig a = furstenberg_config(0.5, 0.5, Scale(9), 11);
    FurstenbergConfig b = furstenberg_config(0.5, 0.5, Scale(9), 11);
    CHECK(a.union_set.points() == b.union_set.points());
    REQUIRE(a.tubes.tubes.size() == b.tubes.tubes.size());
    for (std::size_t i = 0; i < a.tubes.tubes.size(); ++i) {
        CHECK(a.tubes.tubes[i].axis.theta == b.tubes.tubes[i].axis.theta);
        CHECK(a.tubes.tubes[i].axis.offset == b.tubes.tubes[i].axis.offset);
    }
}

TEST_CASE("seeded measures are valid and reproducible") {
    DyadicMeasure a = seeded_measure(2, 5, 2, 21);
    DyadicMeasure b = seeded_measure(2, 5, 2, 21);
    REQUIRE(a.cells().size() == b.cells().size());
    for (std::size_t i = 0; i < a.cells().size(); ++i) {
        CHECK(a.cells()[i].path == b.cells()[i].path);
        CHECK(a.cells()[i].mass == b.cells()[i].mass);
    }
    CHECK(a.total_mass() <= 1.0 + 1e-12);
    CHECK(a.cells().size() <= 768);
    DyadicMeasure d1 = seeded_measure(1, 9, 2, 4);
    CHECK(d1.dim() == 1);
    CHECK(d1.depth() == 18);
}

TEST_CASE("generator dispatch covers every kind") {
    GeneratorSpec spec;
    spec.kind = "cantor_product";
    spec.pattern = {4, {0, 3}};
    spec.depth = 3;
    CHECK(generate(spec).size() == 64);
    CHECK(spec.nominal_dimension() == doctest::Approx(1.0).epsilon(1e-12));

    spec.kind = "grid";
    spec.scale_exp = 3;
    CHECK(generate(spec).size() == 64);

    spec.kind = "random_delta";
    spec.s = 1.0;
    spec.scale_exp = 7;
    CHECK(generate(spec).size() == random_delta_set(1.0, Scale(7), spec.seed).size());

    spec.kind = "on_line";
    spec.s = 0.8;
    spec.scale_exp = 8;
    CHECK(generate(spec).size() >= 50);

    spec.kind = "furstenberg";
    spec.s = 0.5;
    spec.t = 0.5;
    spec.scale_exp = 8;
    CHECK(generate(spec).size() ==
          furstenberg_config(0.5, 0.5, Scale(8), spec.seed).union_set.size());

    spec.kind = "nonsense";
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);
}
