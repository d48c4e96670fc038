#pragma once

// Core planar types for dyadic-scale geometry: scales 2^-m, point sets with a
// separation scale, lines in angle/offset form, tubes, and dyadic cells.
// Everything lives in the ambient window [-2,2]^2; dyadic machinery works on
// grids anchored at the origin, so sets contained in [0,1)^2 need no
// normalization and window-wide data can be mapped by window_to_unit().

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace frostlab {

inline constexpr double kWindowLo = -2.0;
inline constexpr double kWindowHi = 2.0;

// A dyadic scale 2^-exponent. Exponent 0 is the unit scale.
struct Scale {
    int exponent = 0;

    Scale() = default;
    explicit Scale(int m) : exponent(m) {
        if (m < 0) throw std::invalid_argument("scale out of range");
    }
    double value() const { return std::ldexp(1.0, -exponent); }
    friend bool operator==(const Scale&, const Scale&) = default;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline double dist(const Point2& a, const Point2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

inline double dist_sq(const Point2& a, const Point2& b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

inline bool in_window(const Point2& p) {
    return p.x >= kWindowLo && p.x <= kWindowHi && p.y >= kWindowLo && p.y <= kWindowHi;
}

inline bool in_unit_square(const Point2& p) {
    return p.x >= 0.0 && p.x < 1.0 && p.y >= 0.0 && p.y < 1.0;
}

// Fixed affine chart taking the ambient window onto [0,1)^2. Applied
// explicitly by callers that need dyadic cells for window-wide data; reports
// record when it has been used.
inline Point2 window_to_unit(const Point2& p) {
    return {(p.x - kWindowLo) / (kWindowHi - kWindowLo),
            (p.y - kWindowLo) / (kWindowHi - kWindowLo)};
}

inline Point2 unit_to_window(const Point2& p) {
    return {p.x * (kWindowHi - kWindowLo) + kWindowLo,
            p.y * (kWindowHi - kWindowLo) + kWindowLo};
}

// A line in angle/offset form: direction angle theta in [0,pi), signed offset
// a along the unit normal n(theta) = (-sin theta, cos theta). The line is
// { p : p . n(theta) = a }; (theta + pi, a) is canonicalized to (theta, -a).
struct Line {
    double theta = 0.0;
    double offset = 0.0;

    Line() = default;
    Line(double th, double a) : theta(th), offset(a) { canonicalize(); }

    void canonicalize() {
        constexpr double pi = 3.14159265358979323846;
        theta = std::fmod(theta, 2.0 * pi);
        if (theta < 0.0) theta += 2.0 * pi;
        if (theta >= pi) {
            theta -= pi;
            offset = -offset;
        }
    }
    std::array<double, 2> direction() const { return {std::cos(theta), std::sin(theta)}; }
    std::array<double, 2> normal() const { return {-std::sin(theta), std::cos(theta)}; }
    double signed_dist(const Point2& p) const {
        return p.x * -std::sin(theta) + p.y * std::cos(theta) - offset;
    }
};

// Closed tube: all points within distance `width` of the axis line. A
// "delta-tube" in the usual sense has width = delta (total thickness 2*delta).
struct Tube {
    Line axis;
    double width = 0.0;

    Tube() = default;
    Tube(Line ax, double w) : axis(ax), width(w) {
        if (!(w > 0.0)) throw std::invalid_argument("tube width must be positive");
    }
};

inline bool tube_contains(const Tube& t, const Point2& p) {
    return std::fabs(t.axis.signed_dist(p)) <= t.width;
}

// Distance between lines: operator norm of the difference of the orthogonal
// projections onto the two direction subspaces, plus the Euclidean gap
// between the feet of the perpendiculars dropped from the origin. The
// projection part equals |sin(theta1 - theta2)|; we compute it from the
// closed-form eigenvalues of the symmetric 2x2 difference so the returned
// value is exactly the matrix norm it claims to be. Both terms are invariant
// under re-orienting either line, so the value depends only on the lines
// themselves, not on the (theta, offset) representatives.
inline double line_metric(const Line& l1, const Line& l2) {
    const auto e1 = l1.direction(), e2 = l2.direction();
    // M = e1 e1^T - e2 e2^T, symmetric [[a,b],[b,c]].
    const double a = e1[0] * e1[0] - e2[0] * e2[0];
    const double b = e1[0] * e1[1] - e2[0] * e2[1];
    const double c = e1[1] * e1[1] - e2[1] * e2[1];
    const double half_tr = 0.5 * (a + c);
    const double rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    const double op_norm = std::fabs(half_tr) + rad;
    const auto n1 = l1.normal(), n2 = l2.normal();
    const double fx = l1.offset * n1[0] - l2.offset * n2[0];
    const double fy = l1.offset * n1[1] - l2.offset * n2[1];
    return op_norm + std::hypot(fx, fy);
}

// Dyadic cell at depth k: [ix,ix+1) x [iy,iy+1) scaled by 2^-k inside the
// unit square. iy is ignored for 1-dimensional (arc) cells.
struct DyadicCell {
    int depth = 0;
    std::uint64_t ix = 0;
    std::uint64_t iy = 0;

    friend bool operator==(const DyadicCell&, const DyadicCell&) = default;
    friend bool operator<(const DyadicCell& a, const DyadicCell& b) {
        if (a.depth != b.depth) return a.depth < b.depth;
        if (a.ix != b.ix) return a.ix < b.ix;
        return a.iy < b.iy;
    }
};

// Interleave low `depth` bits of ix and iy (x bits in even positions).
std::uint64_t morton_key(std::uint64_t ix, std::uint64_t iy, int depth);

// delta-separated point set tagged with its scale. Separation is checked on
// construction (closed condition, with a 1e-9 relative slack for coordinates
// that are not exactly representable, e.g. points spaced along tilted lines).
class PointSet {
  public:
    // Empty placeholder at unit scale; real sets come from the checked
    // constructor or unchecked().
    PointSet() = default;

    PointSet(std::vector<Point2> pts, Scale scale);

    // For raw point clouds (box-counting inputs, viewpoint pools) that carry a
    // scale tag but make no separation promise.
    static PointSet unchecked(std::vector<Point2> pts, Scale scale);

    const std::vector<Point2>& points() const { return pts_; }
    Scale scale() const { return scale_; }
    double delta() const { return scale_.value(); }
    std::size_t size() const { return pts_.size(); }
    bool empty() const { return pts_.empty(); }
    const Point2& operator[](std::size_t i) const { return pts_[i]; }
    bool separation_checked() const { return separation_checked_; }

    // Subset by indices; keeps the scale tag (subsets stay separated).
    PointSet subset(std::span<const int> idx) const;

  private:
    std::vector<Point2> pts_;
    Scale scale_;
    bool separation_checked_ = false;
};

// Number of cells of the side-r dyadic grid (anchored at the origin, tiling
// the plane) that meet the set. For sets inside [0,1)^2 these are exactly the
// depth-r dyadic cells of the unit square.
std::size_t covering_number(std::span<const Point2> pts, Scale r);
inline std::size_t covering_number(const PointSet& ps, Scale r) {
    return covering_number(std::span<const Point2>(ps.points()), r);
}

// Dyadic cells of the unit square at depth k meeting the set. Requires the
// set to sit inside [0,1)^2 (apply window_to_unit first for window data).
// Result is sorted by (ix, iy) with no duplicates.
std::vector<DyadicCell> dyadic_cells_meeting(std::span<const Point2> pts, int depth);

// Uniform hash grid over the window (plus slack) for neighborhood queries.
class PointGrid {
  public:
    PointGrid(std::span<const Point2> pts, double cell_size);

    // Indices of points within Euclidean distance r of c (closed ball).
    void ball(const Point2& c, double r, std::vector<int>& out) const;
    std::size_t count_ball(const Point2& c, double r) const;
    // True if some point lies within distance r of c.
    bool any_within(const Point2& c, double r) const;

    double cell_size() const { return g_; }

  private:
    bool use_cells(double r) const;
    std::int64_t cell_of(double v) const {
        return static_cast<std::int64_t>(std::floor(v / g_));
    }
    static std::uint64_t key(std::int64_t cx, std::int64_t cy) {
        return (static_cast<std::uint64_t>(cx + (1LL << 31)) << 32) |
               static_cast<std::uint64_t>(cy + (1LL << 31));
    }
    std::span<const Point2> pts_;
    double g_;
    std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

}  // namespace frostlab
