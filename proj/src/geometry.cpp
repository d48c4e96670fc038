#include "frostlab/geometry.hpp"

#include <algorithm>
#include <unordered_set>

namespace frostlab {

std::uint64_t morton_key(std::uint64_t ix, std::uint64_t iy, int depth) {
    std::uint64_t key = 0;
    for (int b = 0; b < depth; ++b) {
        key |= ((ix >> b) & 1u) << (2 * b);
        key |= ((iy >> b) & 1u) << (2 * b + 1);
    }
    return key;
}

PointSet::PointSet(std::vector<Point2> pts, Scale scale) : pts_(std::move(pts)), scale_(scale) {
    for (const Point2& p : pts_)
        if (!in_window(p)) throw std::invalid_argument("point outside the ambient window");
    const double d = scale_.value();
    const double min_sq = d * d * (1.0 - 1e-9);
    PointGrid grid(pts_, d);
    std::vector<int> near;
    for (std::size_t i = 0; i < pts_.size(); ++i) {
        grid.ball(pts_[i], d, near);
        for (int j : near) {
            if (static_cast<std::size_t>(j) == i) continue;
            if (dist_sq(pts_[i], pts_[static_cast<std::size_t>(j)]) < min_sq)
                throw std::invalid_argument("points closer than the separation scale");
        }
    }
    separation_checked_ = true;
}

PointSet PointSet::unchecked(std::vector<Point2> pts, Scale scale) {
    PointSet ps;
    ps.pts_ = std::move(pts);
    ps.scale_ = scale;
    ps.separation_checked_ = false;
    return ps;
}

PointSet PointSet::subset(std::span<const int> idx) const {
    PointSet ps;
    ps.pts_.reserve(idx.size());
    for (int i : idx) ps.pts_.push_back(pts_[static_cast<std::size_t>(i)]);
    ps.scale_ = scale_;
    ps.separation_checked_ = separation_checked_;
    return ps;
}

std::size_t covering_number(std::span<const Point2> pts, Scale r) {
    const double g = r.value();
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(pts.size());
    for (const Point2& p : pts) {
        const auto cx = static_cast<std::int64_t>(std::floor(p.x / g));
        const auto cy = static_cast<std::int64_t>(std::floor(p.y / g));
        seen.insert((static_cast<std::uint64_t>(cx + (1LL << 31)) << 32) |
                    static_cast<std::uint64_t>(cy + (1LL << 31)));
    }
    return seen.size();
}

std::vector<DyadicCell> dyadic_cells_meeting(std::span<const Point2> pts, int depth) {
    if (depth < 0 || depth > 62) throw std::invalid_argument("scale out of range");
    const double scale = std::ldexp(1.0, depth);
    std::vector<DyadicCell> cells;
    cells.reserve(pts.size());
    for (const Point2& p : pts) {
        if (!in_unit_square(p)) throw std::invalid_argument("point outside window");
        cells.push_back(DyadicCell{depth, static_cast<std::uint64_t>(p.x * scale),
                                   static_cast<std::uint64_t>(p.y * scale)});
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
}

PointGrid::PointGrid(std::span<const Point2> pts, double cell_size) : pts_(pts), g_(cell_size) {
    if (!(g_ > 0.0)) throw std::invalid_argument("grid cell size must be positive");
    cells_.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        cells_[key(cell_of(pts[i].x), cell_of(pts[i].y))].push_back(static_cast<int>(i));
}

// Queries scan the covered grid cells when the ball is small relative to the
// cell size, and fall back to a linear pass over the points when the cell
// window would be larger than the point set itself (radii many cells wide).
bool PointGrid::use_cells(double r) const {
    const double span = 2.0 * r / g_ + 2.0;
    return span * span <= static_cast<double>(pts_.size()) + 9.0;
}

void PointGrid::ball(const Point2& c, double r, std::vector<int>& out) const {
    out.clear();
    const double r_sq = r * r;
    if (!use_cells(r)) {
        for (std::size_t i = 0; i < pts_.size(); ++i)
            if (dist_sq(pts_[i], c) <= r_sq) out.push_back(static_cast<int>(i));
        return;
    }
    const std::int64_t x0 = cell_of(c.x - r), x1 = cell_of(c.x + r);
    const std::int64_t y0 = cell_of(c.y - r), y1 = cell_of(c.y + r);
    for (std::int64_t cx = x0; cx <= x1; ++cx)
        for (std::int64_t cy = y0; cy <= y1; ++cy) {
            auto it = cells_.find(key(cx, cy));
            if (it == cells_.end()) continue;
            for (int i : it->second)
                if (dist_sq(pts_[static_cast<std::size_t>(i)], c) <= r_sq) out.push_back(i);
        }
}

std::size_t PointGrid::count_ball(const Point2& c, double r) const {
    const double r_sq = r * r;
    std::size_t n = 0;
    if (!use_cells(r)) {
        for (const Point2& p : pts_)
            if (dist_sq(p, c) <= r_sq) ++n;
        return n;
    }
    const std::int64_t x0 = cell_of(c.x - r), x1 = cell_of(c.x + r);
    const std::int64_t y0 = cell_of(c.y - r), y1 = cell_of(c.y + r);
    for (std::int64_t cx = x0; cx <= x1; ++cx)
        for (std::int64_t cy = y0; cy <= y1; ++cy) {
            auto it = cells_.find(key(cx, cy));
            if (it == cells_.end()) continue;
            for (int i : it->second)
                if (dist_sq(pts_[static_cast<std::size_t>(i)], c) <= r_sq) ++n;
        }
    return n;
}

bool PointGrid::any_within(const Point2& c, double r) const {
    const double r_sq = r * r;
    if (!use_cells(r)) {
        for (const Point2& p : pts_)
            if (dist_sq(p, c) <= r_sq) return true;
        return false;
    }
    const std::int64_t x0 = cell_of(c.x - r), x1 = cell_of(c.x + r);
    const std::int64_t y0 = cell_of(c.y - r), y1 = cell_of(c.y + r);
    for (std::int64_t cx = x0; cx <= x1; ++cx)
        for (std::int64_t cy = y0; cy <= y1; ++cy) {
            auto it = cells_.find(key(cx, cy));
            if (it == cells_.end()) continue;
            for (int i : it->second)
                if (dist_sq(pts_[static_cast<std::size_t>(i)], c) <= r_sq) return true;
        }
    return false;
}

}  // namespace frostlab
