#pragma once

// Radial projections and their exceptional-set scans.
//
// Directions are parametrized by the circle S^1 ~ [0,1): the direction of
// y seen from x is atan2(y2-x2, y1-x1) / 2pi (mod 1). An ArcSet is a set of
// dyadic arcs [i 2^-k, (i+1) 2^-k) of that parametrization.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "frostlab/geometry.hpp"
#include "frostlab/io.hpp"

namespace frostlab {

struct ArcSet {
    int depth = 0;
    std::vector<std::uint64_t> arcs;  // sorted, unique, each < 2^depth

    std::size_t size() const { return arcs.size(); }

    // Arc count after coarsening to depth j <= depth.
    std::size_t covering(int j) const;
};

// Dyadic arcs at the given depth hit by directions from x to the points of K.
// Throws if some point of K is closer to x than K's scale.
ArcSet radial_project(const Point2& x, const PointSet& K, int depth);

// Truncated dyadic content: cheapest cover of the set by dyadic cells of side
// >= delta, where a cell of side l costs l^sigma. Computed by the obvious
// tree recursion (each occupied node pays min(own cost, sum of children)).
// Comparable to the honest content up to the factor 2^sigma * 3 in the plane
// and 2^sigma * 2 on the circle.
double content_estimate(const ArcSet& S, double sigma);
// Point-set version; requires S inside the unit square.
double content_estimate(std::span<const Point2> S, double sigma, Scale delta);

// Least-squares slope of log2(count) against the scale exponent.
struct DimensionFit {
    double slope = 0.0;
    double residual = 0.0;  // root-mean-square residual of the fit
    std::size_t n_scales = 0;
};

// counts: scale exponent m -> covering count at scale 2^-m. Requires at least
// 3 scales and all counts >= 1.
DimensionFit estimate_dimension(const std::map<int, std::uint64_t>& counts);

struct HeavyTube {
    Tube tube;
    std::uint64_t arc_index = 0;   // heavy arc this tube came from
    std::size_t arc_count = 0;     // points of K in the whole arc's cone
    std::size_t tube_count = 0;    // points of K in the returned tube
    std::size_t declared_min = 0;  // pigeonhole floor: ceil(arc_count / splits)
};

// Arcs at the given depth whose direction count is at least
// Delta^{Sigma+eps} |K| (Delta = 2^-depth), each converted to a width-Delta
// tube through x: the arc's cone is split into enough sub-arcs that one
// width-Delta tube through x covers each, and the heaviest sub-tube is kept.
std::vector<HeavyTube> heavy_directions(const Point2& x, const PointSet& K, double Sigma,
                                        double eps, int depth);

struct ScanReport {
    double sigma = 0.0;
    std::vector<int> ladder;  // scale exponents scanned
    std::size_t n_viewpoints = 0;
    double t_emp = 0.0;          // box-dimension estimate of K over the ladder
    double t_emp_residual = 0.0;
    double exc_slope = 0.0;      // box-dimension estimate of the exceptional sets
    double exc_residual = 0.0;
    bool exc_slope_defined = false;  // false when < 3 scales had survivors
    double bound = 0.0;              // max(1 + sigma - t_emp, 0)
    // Per scale: exceptional viewpoint counts at thresholds
    // delta^{-(sigma-0.05)}, delta^-sigma, delta^{-(sigma+0.05)}, and the
    // covering number of the exceptional set at that scale.
    struct ScaleRow {
        int m = 0;
        std::uint64_t k_covering = 0;
        std::size_t exc_lo = 0, exc_mid = 0, exc_hi = 0;
        std::uint64_t exc_covering = 0;
    };
    std::vector<ScaleRow> rows;
    // CSV with one row per (scale, viewpoint): arc count and exceptional flag.
    std::string per_viewpoint_csv;
    std::string summary_csv;
};

// Scan every viewpoint against K across the ladder of scales: a viewpoint is
// exceptional at scale 2^-m if its direction count is at most 2^{m sigma}.
// Viewpoints closer than min_dist to K are dropped (their ids are skipped).
// Threads: 0 = auto (FROSTLAB_THREADS or hardware).
ScanReport exceptional_scan(const PointSet& K, const PointSet& viewpoints, double sigma,
                            const std::vector<int>& ladder, double min_dist, int threads = 0);

// Worker-count resolution shared by all threaded scans: explicit value, else
// the FROSTLAB_THREADS environment variable, else hardware concurrency.
int resolve_threads(int threads);

}  // namespace frostlab
