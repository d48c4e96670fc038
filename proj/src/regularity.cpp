#include "frostlab/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "frostlab/radial.hpp"

namespace frostlab {

namespace {

// Cell key on the plane-wide grid at depth j (side 2^-j), offset so indices
// stay positive inside the window.
inline std::uint64_t cell_key(const Point2& p, int j) {
    const double scale = std::ldexp(1.0, j);
    const auto ix = static_cast<std::int64_t>(std::floor(p.x * scale));
    const auto iy = static_cast<std::int64_t>(std::floor(p.y * scale));
    return (static_cast<std::uint64_t>(ix + (1LL << 31)) << 32) |
           static_cast<std::uint64_t>(iy + (1LL << 31));
}

inline std::int64_t floor_div2(std::int64_t v, int shift) { return v >> shift; }

// Decompose a key back into signed cell indices.
inline void key_to_cell(std::uint64_t key, std::int64_t& ix, std::int64_t& iy) {
    ix = static_cast<std::int64_t>(key >> 32) - (1LL << 31);
    iy = static_cast<std::int64_t>(key & 0xffffffffu) - (1LL << 31);
}

inline std::uint64_t make_key(std::int64_t ix, std::int64_t iy) {
    return (static_cast<std::uint64_t>(ix + (1LL << 31)) << 32) |
           static_cast<std::uint64_t>(iy + (1LL << 31));
}

// Shared scan over the tested family of balls. `Counter` supplies the
// numerator for a given (center, radius); `quick_ub` a cheap upper bound used
// to skip candidates that provably cannot beat the current best.
struct FamilyScan {
    const PointSet& P;
    int m;                            // delta = 2^-m
    std::vector<std::uint64_t> occ;   // occupied delta-cells, sorted keys
    std::vector<std::vector<std::uint64_t>> occ_at;  // per depth: occupied cells
    // Per depth: cell -> number of delta-cells under it (for ball-normalized
    // counts) and cell -> number of points under it (for Katz-Tao counts).
    std::vector<std::unordered_map<std::uint64_t, std::uint32_t>> cellcnt;
    std::vector<std::unordered_map<std::uint64_t, std::uint32_t>> ptcnt;
    // Point ids per delta-cell, for the boundary cells of large-ball counts.
    std::unordered_map<std::uint64_t, std::vector<int>> ids;
    PointGrid grid;

    explicit FamilyScan(const PointSet& ps)
        : P(ps), m(ps.scale().exponent), grid(ps.points(), ps.delta()) {
        const auto& pts = P.points();
        std::unordered_set<std::uint64_t> occset;
        occset.reserve(pts.size());
        for (const Point2& p : pts) occset.insert(cell_key(p, m));
        occ.assign(occset.begin(), occset.end());
        std::sort(occ.begin(), occ.end());
        ids.reserve(occ.size());
        for (std::size_t i = 0; i < pts.size(); ++i)
            ids[cell_key(pts[i], m)].push_back(static_cast<int>(i));

        cellcnt.resize(static_cast<std::size_t>(m) + 1);
        ptcnt.resize(static_cast<std::size_t>(m) + 1);
        occ_at.resize(static_cast<std::size_t>(m) + 1);
        for (int j = 0; j <= m; ++j) {
            auto& cc = cellcnt[static_cast<std::size_t>(j)];
            std::int64_t ix, iy;
            for (std::uint64_t key : occ) {
                key_to_cell(key, ix, iy);
                ++cc[make_key(floor_div2(ix, m - j), floor_div2(iy, m - j))];
            }
            auto& pc = ptcnt[static_cast<std::size_t>(j)];
            for (const Point2& p : P.points()) ++pc[cell_key(p, j)];
            auto& oa = occ_at[static_cast<std::size_t>(j)];
            oa.reserve(cc.size());
            for (const auto& [k, v] : cc) oa.push_back(k);
            std::sort(oa.begin(), oa.end());
        }
    }

    // Upper bound for the number of points (or delta-cells) in B(c, 2^-j)
    // from the 3x3 block of depth-j cells covering the ball.
    std::uint64_t block_ub(const Point2& c, int j, bool cells) const {
        const double scale = std::ldexp(1.0, j);
        const auto bx = static_cast<std::int64_t>(std::floor(c.x * scale));
        const auto by = static_cast<std::int64_t>(std::floor(c.y * scale));
        const auto& table = cells ? cellcnt[static_cast<std::size_t>(j)]
                                  : ptcnt[static_cast<std::size_t>(j)];
        std::uint64_t ub = 0;
        for (std::int64_t dx = -1; dx <= 1; ++dx)
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                auto it = table.find(make_key(bx + dx, by + dy));
                if (it != table.end()) ub += it->second;
            }
        return ub;
    }

    // Exact |P n B(c,r)| and |P n B(c,r)|_delta. Small balls query the
    // delta-grid directly; large balls descend the per-depth tables as a
    // quadtree: subtrees whose cell lies entirely inside the closed ball are
    // counted in bulk, subtrees clear of the ball are dropped, and only the
    // O(r/delta) boundary cells fall through to individual points. The
    // boundary cells test points with the same closed-ball predicate as the
    // grid path, so the two paths agree exactly.
    void exact_counts(const Point2& c, double r, std::uint64_t& pts_in,
                      std::uint64_t& cells_in, std::vector<int>& scratch,
                      std::unordered_set<std::uint64_t>& cellset) const {
        const double span = 2.0 * r / P.delta();
        if (span * span <= 64.0) {
            grid.ball(c, r, scratch);
            pts_in = scratch.size();
            cellset.clear();
            for (int i : scratch)
                cellset.insert(cell_key(P[static_cast<std::size_t>(i)], m));
            cells_in = cellset.size();
            return;
        }
        pts_in = 0;
        cells_in = 0;
        std::int64_t ix, iy;
        for (std::uint64_t key : occ_at[0]) {
            key_to_cell(key, ix, iy);
            descend(c, r * r, 0, ix, iy, pts_in, cells_in);
        }
    }

    void descend(const Point2& c, double r_sq, int j, std::int64_t ix, std::int64_t iy,
                 std::uint64_t& pts_in, std::uint64_t& cells_in) const {
        const std::uint64_t key = make_key(ix, iy);
        const auto& cc = cellcnt[static_cast<std::size_t>(j)];
        const auto hit = cc.find(key);
        if (hit == cc.end()) return;  // no points below this cell
        const double side = std::ldexp(1.0, -j);
        const double x0 = static_cast<double>(ix) * side, x1 = x0 + side;
        const double y0 = static_cast<double>(iy) * side, y1 = y0 + side;
        // Farthest corner inside the ball: everything below counts.
        const double fx = std::max(std::fabs(c.x - x0), std::fabs(c.x - x1));
        const double fy = std::max(std::fabs(c.y - y0), std::fabs(c.y - y1));
        if (fx * fx + fy * fy <= r_sq) {
            cells_in += hit->second;
            pts_in += ptcnt[static_cast<std::size_t>(j)].at(key);
            return;
        }
        // Nearest cell point outside the ball: nothing below counts.
        const double nx = c.x - std::clamp(c.x, x0, x1);
        const double ny = c.y - std::clamp(c.y, y0, y1);
        if (nx * nx + ny * ny > r_sq) return;
        if (j == m) {
            bool any = false;
            for (int i : ids.at(key))
                if (dist_sq(P[static_cast<std::size_t>(i)], c) <= r_sq) {
                    ++pts_in;
                    any = true;
                }
            if (any) ++cells_in;
            return;
        }
        for (int dx = 0; dx < 2; ++dx)
            for (int dy = 0; dy < 2; ++dy)
                descend(c, r_sq, j + 1, ix * 2 + dx, iy * 2 + dy, pts_in, cells_in);
    }
};

RegularityReport run_verify(const PointSet& P, double s, bool katz_tao) {
    if (P.empty()) throw std::invalid_argument("empty set has no regularity constant");
    FamilyScan scan(P);
    const int m = scan.m;
    const double delta = P.delta();
    const std::size_t covering = scan.occ.size();

    RegularityReport rep;
    rep.kind = katz_tao ? "katz_tao" : "ball";
    rep.s = s;
    rep.delta_exp = m;
    rep.n_points = P.size();
    rep.covering = covering;

    std::vector<int> scratch;
    std::unordered_set<std::uint64_t> cellset;
    double best = -1.0;

    // Radii fine -> coarse; the fine radii both seed a strong incumbent for
    // pruning and carry the witnesses for typical sets.
    for (int j = m; j >= 0; --j) {
        const double r = std::ldexp(1.0, -j);
        const double denom = katz_tao ? std::pow(r / delta, s)
                                      : std::pow(r, s) * static_cast<double>(covering);
        // Candidate centers: occupied side-r cell centers, then points of P.
        const auto& oa = scan.occ_at[static_cast<std::size_t>(j)];
        const std::size_t n_centers = oa.size() + P.size();
        for (std::size_t ci = 0; ci < n_centers; ++ci) {
            Point2 c;
            if (ci < oa.size()) {
                std::int64_t ix, iy;
                key_to_cell(oa[ci], ix, iy);
                c = Point2{(static_cast<double>(ix) + 0.5) * r,
                           (static_cast<double>(iy) + 0.5) * r};
            } else {
                c = P[ci - oa.size()];
            }
            const double ub =
                static_cast<double>(scan.block_ub(c, j, !katz_tao)) / denom;
            if (ub <= best) continue;
            std::uint64_t pts_in = 0, cells_in = 0;
            scan.exact_counts(c, r, pts_in, cells_in, scratch, cellset);
            const double ratio =
                static_cast<double>(katz_tao ? pts_in : cells_in) / denom;
            if (ratio > best) {
                best = ratio;
                rep.witness_center = c;
                rep.witness_radius_exp = j;
            }
        }
    }
    rep.best_C = best;
    return rep;
}

}  // namespace

RegularityReport verify_delta_set(const PointSet& P, double s) {
    return run_verify(P, s, false);
}

RegularityReport verify_katz_tao(const PointSet& P, double s) {
    return run_verify(P, s, true);
}

namespace {

// Capacity floor((r/delta)^t) for r = 2^{j} delta, clamped to the set size.
std::uint64_t kt_cap(int level_gap, double t, std::size_t n) {
    const double v = std::pow(std::ldexp(1.0, level_gap), t);
    if (v >= static_cast<double>(n)) return n;
    return static_cast<std::uint64_t>(std::floor(v + 1e-9));
}

// Per-color spatial index: for every depth, cell -> member point ids.
struct ColorIndex {
    std::vector<std::unordered_map<std::uint64_t, std::vector<int>>> at;
    std::size_t size = 0;

    explicit ColorIndex(int m) : at(static_cast<std::size_t>(m) + 1) {}

    void insert(const Point2& p, int id, int m) {
        for (int j = 0; j <= m; ++j) at[static_cast<std::size_t>(j)][cell_key(p, j)].push_back(id);
        ++size;
    }

    // Members within distance r (closed) of c, via the 3x3 block at depth j.
    void in_ball(const PointSet& P, const Point2& c, double r, int j,
                 std::vector<int>& out) const {
        out.clear();
        const double scale = std::ldexp(1.0, j);
        const auto bx = static_cast<std::int64_t>(std::floor(c.x * scale));
        const auto by = static_cast<std::int64_t>(std::floor(c.y * scale));
        const double r_sq = r * r * (1.0 + 1e-12);
        const auto& table = at[static_cast<std::size_t>(j)];
        for (std::int64_t dx = -1; dx <= 1; ++dx)
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                auto it = table.find(make_key(bx + dx, by + dy));
                if (it == table.end()) continue;
                for (int id : it->second)
                    if (dist_sq(P[static_cast<std::size_t>(id)], c) <= r_sq) out.push_back(id);
            }
    }
};

}  // namespace

DecompositionReport katz_tao_decompose(const PointSet& P, double t, double C, double eps) {
    if (P.empty()) throw std::invalid_argument("empty set has no regularity constant");
    const int m = P.scale().exponent;
    const double delta = P.delta();
    const auto n = P.size();

    DecompositionReport rep;
    rep.t = t;
    rep.C = C;
    rep.eps = eps;
    rep.delta_exp = m;
    rep.H = std::pow(4.0, t + 1.0) * C * static_cast<double>(n) * std::pow(delta, t);
    if (rep.H < 1.0) throw std::invalid_argument("input violates (delta,t,C) premise");

    const RegularityReport premise = verify_delta_set(P, t);
    rep.premise_measured_C = premise.best_C;
    rep.premise_ok = premise.best_C <= C * (1.0 + 1e-12);

    // Capacities per radius 2^-j; monotone in the level gap m - j.
    std::vector<std::uint64_t> cap(static_cast<std::size_t>(m) + 1);
    for (int j = 0; j <= m; ++j) cap[static_cast<std::size_t>(j)] = kt_cap(m - j, t, n);

    // Morton processing order (ties by input index).
    std::vector<int> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
    std::vector<std::uint64_t> mkey(n);
    const double fine = std::ldexp(1.0, m);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ix = static_cast<std::uint64_t>(std::floor((P[i].x - kWindowLo) * fine));
        const auto iy = static_cast<std::uint64_t>(std::floor((P[i].y - kWindowLo) * fine));
        mkey[i] = morton_key(ix, iy, std::min(m + 2, 31));
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return mkey[static_cast<std::size_t>(a)] <
                                                mkey[static_cast<std::size_t>(b)]; });

    std::vector<ColorIndex> colors;
    std::vector<std::vector<int>> parts;
    std::vector<int> members;

    auto feasible = [&](const ColorIndex& col, const Point2& p) {
        for (int j = m; j >= 0; --j) {
            const std::uint64_t c = cap[static_cast<std::size_t>(j)];
            if (c >= col.size + 1) break;  // caps only grow toward coarse scales
            const double r = std::ldexp(1.0, -j);
            // Grid-cell centers near p whose ball would contain p.
            const auto bx = static_cast<std::int64_t>(std::floor(p.x / r));
            const auto by = static_cast<std::int64_t>(std::floor(p.y / r));
            const double rr = r * (1.0 + 1e-12);
            for (std::int64_t dx = -1; dx <= 1; ++dx)
                for (std::int64_t dy = -1; dy <= 1; ++dy) {
                    const Point2 cen{(static_cast<double>(bx + dx) + 0.5) * r,
                                     (static_cast<double>(by + dy) + 0.5) * r};
                    if (dist(cen, p) > rr) continue;
                    col.in_ball(P, cen, r, j, members);
                    if (members.size() + 1 > c) return false;
                }
            // Balls centered at p and at already-colored members near p.
            col.in_ball(P, p, r, j, members);
            if (members.size() + 1 > c) return false;
            const std::vector<int> near = members;
            for (int id : near) {
                col.in_ball(P, P[static_cast<std::size_t>(id)], r, j, members);
                if (members.size() + 1 > c) return false;
            }
        }
        return true;
    };

    for (int idx : order) {
        const Point2& p = P[static_cast<std::size_t>(idx)];
        std::size_t chosen = colors.size();
        for (std::size_t ci = 0; ci < colors.size(); ++ci) {
            if (feasible(colors[ci], p)) {
                chosen = ci;
                break;
            }
        }
        if (chosen == colors.size()) {
            colors.emplace_back(m);
            parts.emplace_back();
        }
        colors[chosen].insert(p, idx, m);
        parts[chosen].push_back(idx);
    }

    rep.parts = std::move(parts);
    rep.N = rep.parts.size();
    rep.bound_rhs = C * static_cast<double>(n) * std::pow(delta, t - eps);
    rep.bound_ok = static_cast<double>(rep.N) <= rep.bound_rhs;
    for (const auto& part : rep.parts) {
        const PointSet sub = P.subset(part);
        rep.part_best_C.push_back(verify_katz_tao(sub, t).best_C);
    }
    return rep;
}

ExtractionReport extract_regular_subset(const PointSet& A, double s, double kappa) {
    if (A.empty()) throw std::invalid_argument("empty set has no regularity constant");
    ExtractionReport rep;
    rep.s = s;
    rep.kappa = kappa;
    rep.content = content_estimate(std::span<const Point2>(A.points()), s, A.scale());
    if (rep.content < kappa) throw std::invalid_argument("insufficient content");

    const int m = A.scale().exponent;
    std::vector<std::uint64_t> cap(static_cast<std::size_t>(m) + 1);
    for (int j = 0; j <= m; ++j) cap[static_cast<std::size_t>(j)] = kt_cap(m - j, s, A.size());
    std::vector<std::unordered_map<std::uint64_t, std::uint64_t>> counts(
        static_cast<std::size_t>(m) + 1);

    for (std::size_t i = 0; i < A.size(); ++i) {
        const Point2& p = A[i];
        bool ok = true;
        for (int j = m; j >= 0 && ok; --j) {
            if (cap[static_cast<std::size_t>(j)] >= A.size()) break;
            if (counts[static_cast<std::size_t>(j)][cell_key(p, j)] + 1 >
                cap[static_cast<std::size_t>(j)])
                ok = false;
        }
        if (!ok) continue;
        for (int j = m; j >= 0; --j) {
            if (cap[static_cast<std::size_t>(j)] >= A.size()) break;
            ++counts[static_cast<std::size_t>(j)][cell_key(p, j)];
        }
        rep.kept.push_back(static_cast<int>(i));
    }
    return rep;
}

}  // namespace frostlab
