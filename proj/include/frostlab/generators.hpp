#pragma once

// Deterministic and seeded constructions of the test configurations: Cantor
// digit products, thinned sets on a line, seeded branching sets of a target
// regularity, tube families carrying per-tube line sets, and seeded block
// measures. All randomness comes from std::mt19937_64 raw outputs, so the
// same seed reproduces the same bytes on any platform.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "frostlab/geometry.hpp"
#include "frostlab/io.hpp"
#include "frostlab/uniformization.hpp"

namespace frostlab {

struct DigitPattern {
    int base = 2;
    std::vector<int> digits;  // subset of {0, ..., base-1}
};

// Product C x C of the Cantor set keeping the given digits to the given
// depth; the scale is b^{-depth} refined down to the nearest power of two.
PointSet cantor_product(const DigitPattern& pattern, int depth);

// Cantor-style thinned set on a line: ~delta^{-s} points on a length-2
// segment, balanced so that verify_delta_set(s) stays under best_C <= 8.
PointSet set_on_line(double s, Scale delta, const Line& line);

// Full grid of spacing delta over [0,1)^2.
PointSet grid_set(Scale delta);

// Seeded branching set: roughly 2^s of every cell's 4 children survive per
// level. The output is re-verified and regenerated with derived seeds until
// verify_delta_set(s) reports best_C <= 32 (up to 5 attempts).
PointSet random_delta_set(double s, Scale delta, std::uint64_t seed);

struct FurstenbergConfig {
    TubeSet tubes;
    std::vector<PointSet> per_tube;
    PointSet union_set;  // one representative per occupied delta-cell; not
                         // separation-checked, regression input only
    double gamma = 0.0;  // s + min{s,t}
};

// Tube family from a seeded chart set (slope-intercept points dualized to
// lines, thickened by delta), each tube carrying a seeded (delta,s)-set
// along its axis. t = 0 degenerates to a single tube.
FurstenbergConfig furstenberg_config(double s, double t, Scale delta,
                                     std::uint64_t seed);

// Seeded sparse block measure for the uniformization pipeline: a branching
// subtree with 1-3 children per support cell per block level, mild mass
// tilts, and occasional below-floor "dust" children that the light-cube
// discard is expected to remove.
DyadicMeasure seeded_measure(int dim, int block_size, int blocks, std::uint64_t seed);

struct GeneratorSpec {
    std::string kind;  // cantor_product | on_line | random_delta | furstenberg | grid
    DigitPattern pattern{4, {0, 1, 2}};
    int depth = 4;
    double s = 1.0;
    double t = 1.0;
    int scale_exp = 8;
    std::uint64_t seed = 1;
    double line_theta = 0.0;
    double line_offset = 0.0;

    double nominal_dimension() const;
    void validate() const;
};

// Dispatch on spec.kind; furstenberg yields the union set here.
PointSet generate(const GeneratorSpec& spec);

// Portable helpers over the raw engine stream.
inline std::size_t rand_index(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}
inline double rand_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace frostlab
