#include "frostlab/incidence.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "frostlab/duality.hpp"

namespace frostlab {

namespace {

// Uniform bucket grid over the point cloud. Tubes are rasterized column by
// column (or row by row when closer to vertical): the slab's span across
// each column is solved exactly and padded, so no cell holding an incident
// point is ever skipped. Exactness comes from the final per-point test,
// which is the same predicate the brute-force loop uses.
class BucketGrid {
  public:
    BucketGrid(std::span<const Point2> pts, double delta) : pts_(pts) {
        double maxx = pts[0].x, maxy = pts[0].y;
        minx_ = pts[0].x;
        miny_ = pts[0].y;
        for (const auto& p : pts) {
            minx_ = std::min(minx_, p.x);
            miny_ = std::min(miny_, p.y);
            maxx = std::max(maxx, p.x);
            maxy = std::max(maxy, p.y);
        }
        double diam = std::max(maxx - minx_, maxy - miny_);
        cell_ = std::max(delta, diam / 256.0);
        if (!(cell_ > 0.0)) cell_ = 1.0;
        ncx_ = static_cast<int>((maxx - minx_) / cell_) + 1;
        ncy_ = static_cast<int>((maxy - miny_) / cell_) + 1;
        ids_.assign(static_cast<std::size_t>(ncx_) * ncy_, {});
        for (std::size_t i = 0; i < pts.size(); ++i) {
            int gx = std::min(static_cast<int>((pts[i].x - minx_) / cell_), ncx_ - 1);
            int gy = std::min(static_cast<int>((pts[i].y - miny_) / cell_), ncy_ - 1);
            ids_[static_cast<std::size_t>(gx) * ncy_ + gy].push_back(static_cast<int>(i));
        }
    }

    // Ascending ids of the points inside the tube.
    void hits(const Tube& tb, std::vector<int>& out) const {
        out.clear();
        const auto nrm = tb.axis.normal();
        const Point2 n{nrm[0], nrm[1]};
        const double w = tb.width;
        const double pad = 1e-7;
        const double near = w + cell_ * 0.7071067811865476 + pad;
        auto visit = [&](int gx, int gy) {
            if (gx < 0 || gx >= ncx_ || gy < 0 || gy >= ncy_) return;
            Point2 center{minx_ + (gx + 0.5) * cell_, miny_ + (gy + 0.5) * cell_};
            if (std::abs(tb.axis.signed_dist(center)) > near) return;
            for (int id : ids_[static_cast<std::size_t>(gx) * ncy_ + gy])
                if (tube_contains(tb, pts_[id])) out.push_back(id);
        };
        if (std::abs(n.y) >= std::abs(n.x)) {
            for (int gx = 0; gx < ncx_; ++gx) {
                double lo = std::numeric_limits<double>::infinity(), hi = -lo;
                for (double x : {minx_ + gx * cell_, minx_ + (gx + 1) * cell_})
                    for (double sw : {-w, w}) {
                        double y = (tb.axis.offset + sw - n.x * x) / n.y;
                        lo = std::min(lo, y);
                        hi = std::max(hi, y);
                    }
                int g0 = static_cast<int>(std::floor((lo - pad - miny_) / cell_));
                int g1 = static_cast<int>(std::floor((hi + pad - miny_) / cell_));
                for (int gy = std::max(g0, 0); gy <= std::min(g1, ncy_ - 1); ++gy)
                    visit(gx, gy);
            }
        } else {
            for (int gy = 0; gy < ncy_; ++gy) {
                double lo = std::numeric_limits<double>::infinity(), hi = -lo;
                for (double y : {miny_ + gy * cell_, miny_ + (gy + 1) * cell_})
                    for (double sw : {-w, w}) {
                        double x = (tb.axis.offset + sw - n.y * y) / n.x;
                        lo = std::min(lo, x);
                        hi = std::max(hi, x);
                    }
                int g0 = static_cast<int>(std::floor((lo - pad - minx_) / cell_));
                int g1 = static_cast<int>(std::floor((hi + pad - minx_) / cell_));
                for (int gx = std::max(g0, 0); gx <= std::min(g1, ncx_ - 1); ++gx)
                    visit(gx, gy);
            }
        }
        std::sort(out.begin(), out.end());
    }

  private:
    std::span<const Point2> pts_;
    double minx_ = 0.0, miny_ = 0.0, cell_ = 1.0;
    int ncx_ = 1, ncy_ = 1;
    std::vector<std::vector<int>> ids_;
};

// Dual-chart positions of the tube axes, or nullopt if any axis is vertical.
std::vector<Point2> chart_points(const std::vector<Tube>& tubes, bool skip_vertical,
                                 bool& all_in_chart) {
    std::vector<Point2> out;
    all_in_chart = true;
    for (const auto& tb : tubes) {
        try {
            out.push_back(dualize_line(from_angle_form(tb.axis)));
        } catch (const std::runtime_error&) {
            all_in_chart = false;
            if (!skip_vertical) return {};
        }
    }
    return out;
}

}  // namespace

KeyValueBlock IncidenceReport::to_block() const {
    KeyValueBlock b;
    b.add("count", count);
    b.add("method", method == CountMethod::grid ? "grid" : "brute");
    b.add("s", s);
    b.add("t", t);
    b.add("eps", eps);
    b.add("kappa", kappa);
    b.add("bound_rhs", bound_rhs);
    b.add("satisfied", satisfied);
    b.add("vacuous", vacuous);
    b.add("premise_verified", premise_verified);
    b.add("premise_points_ok", premise_P_ok);
    b.add("premise_tubes_ok", premise_T_ok);
    b.add("measured_C_points", measured_C_points);
    b.add("measured_C_tubes", measured_C_tubes);
    return b;
}

IncidenceReport count_incidences(const PointSet& P, const TubeSet& T, CountMethod method) {
    IncidenceReport rep;
    rep.method = method;
    if (P.empty() || T.tubes.empty()) return rep;
    if (method == CountMethod::brute) {
        for (const auto& tb : T.tubes)
            for (std::size_t i = 0; i < P.size(); ++i)
                if (tube_contains(tb, P[i])) ++rep.count;
        return rep;
    }
    BucketGrid grid(P.points(), P.delta());
    std::vector<int> hit;
    for (const auto& tb : T.tubes) {
        grid.hits(tb, hit);
        rep.count += hit.size();
    }
    return rep;
}

IncidenceReport check_fu_ren(const PointSet& P, const TubeSet& T, double s, double t,
                             double eps) {
    IncidenceReport rep = count_incidences(P, T, CountMethod::grid);
    rep.s = s;
    rep.t = t;
    rep.eps = eps;
    const double delta = P.delta();
    const double den = s + t - 1.0;
    // At s+t <= 1 the second branch of the min degenerates; kappa stays 1/2
    // and the exponent below turns nonpositive, making the bound vacuous.
    rep.kappa = den > 0.0 ? std::min(0.5, 1.0 / den) : 0.5;
    const double expo = rep.kappa * den - 5.0 * eps;
    rep.vacuous = expo <= 0.0;
    rep.bound_rhs = static_cast<double>(P.size()) * static_cast<double>(T.tubes.size()) *
                    std::pow(delta, expo);
    rep.satisfied = static_cast<double>(rep.count) <= rep.bound_rhs * (1.0 + 1e-12);

    const double c_required = std::pow(delta, -eps) * (1.0 + 1e-9);
    if (!P.empty()) {
        RegularityReport rp = verify_delta_set(P, s);
        rep.measured_C_points = rp.best_C;
        rep.premise_P_ok = rp.best_C <= c_required;
    }
    bool in_chart = false;
    std::vector<Point2> chart = chart_points(T.tubes, false, in_chart);
    if (in_chart && !chart.empty()) {
        PointSet dual = PointSet::unchecked(std::move(chart), P.scale());
        RegularityReport rt = verify_delta_set(dual, t);
        rep.measured_C_tubes = rt.best_C;
        rep.premise_T_ok = rt.best_C <= c_required;
    }
    rep.premise_verified = rep.premise_P_ok && rep.premise_T_ok;
    return rep;
}

MultiplicityBuckets multiplicity_buckets(const std::vector<AnchoredTubes>& per_anchor,
                                         const PointSet& F, double eps, double tau,
                                         double s_report) {
    const double delta = F.delta();
    const int m = F.scale().exponent;
    const double n = static_cast<double>(F.size());
    if (n > std::pow(delta, -3.0) * (1.0 + 1e-9))
        throw std::runtime_error("cardinality exceeds bucket range");

    MultiplicityBuckets out;
    out.eps = eps;
    out.tau = tau;
    out.L = std::max(1, 3 * m);
    out.range_note =
        "multiplicity ranges are half-open [2^(j-1), 2^j); the top bucket is closed "
        "on the right so a full-cardinality tube still lands inside";

    // The union of the anchor families, deduplicated at delta/4 resolution so
    // the same tube seen from several anchors is one tube with an anchor count.
    const double q = delta / 4.0;
    auto key_of = [&](const Tube& tb) {
        return std::array<std::int64_t, 3>{static_cast<std::int64_t>(std::llround(tb.axis.theta / q)),
                                           static_cast<std::int64_t>(std::llround(tb.axis.offset / q)),
                                           static_cast<std::int64_t>(std::llround(tb.width / q))};
    };
    std::vector<Tube> distinct;
    std::vector<int> anchor_count;
    std::map<std::array<std::int64_t, 3>, int> seen;
    std::vector<int> last_anchor;
    for (std::size_t ai = 0; ai < per_anchor.size(); ++ai) {
        for (const auto& tb : per_anchor[ai].tubes) {
            auto [it, fresh] = seen.try_emplace(key_of(tb), static_cast<int>(distinct.size()));
            if (fresh) {
                distinct.push_back(tb);
                anchor_count.push_back(0);
                last_anchor.push_back(-1);
            }
            int id = it->second;
            if (last_anchor[static_cast<std::size_t>(id)] != static_cast<int>(ai)) {
                last_anchor[static_cast<std::size_t>(id)] = static_cast<int>(ai);
                ++anchor_count[static_cast<std::size_t>(id)];
            }
        }
    }

    out.buckets.resize(static_cast<std::size_t>(out.L));
    for (int j = 1; j <= out.L; ++j) out.buckets[static_cast<std::size_t>(j - 1)].j = j;
    std::vector<std::vector<int>> covered(static_cast<std::size_t>(out.L));

    const double high_thr = std::pow(delta, -tau / 2.0) - 1e-9;
    if (!F.empty() && !distinct.empty()) {
        BucketGrid grid(F.points(), delta);
        std::vector<int> hit;
        for (std::size_t i = 0; i < distinct.size(); ++i) {
            grid.hits(distinct[i], hit);
            if (hit.empty()) continue;
            int j = static_cast<int>(std::bit_width(hit.size()));
            j = std::min(j, out.L);
            auto& b = out.buckets[static_cast<std::size_t>(j - 1)];
            b.tubes.tubes.push_back(distinct[i]);
            if (static_cast<double>(anchor_count[i]) >= high_thr) ++b.high_count;
            auto& cov = covered[static_cast<std::size_t>(j - 1)];
            cov.insert(cov.end(), hit.begin(), hit.end());
        }
    }

    std::vector<char> in_kept(F.size(), 0);
    for (int j = 1; j <= out.L; ++j) {
        auto& b = out.buckets[static_cast<std::size_t>(j - 1)];
        auto& cov = covered[static_cast<std::size_t>(j - 1)];
        std::sort(cov.begin(), cov.end());
        cov.erase(std::unique(cov.begin(), cov.end()), cov.end());
        b.covered = cov;
        double sz = static_cast<double>(cov.size());
        b.kept = sz >= 2.0 * std::pow(delta, eps) * n - 1e-9;
        b.mass_ok = b.tubes.tubes.empty() || sz >= std::pow(delta, 2.0 * eps) * n - 1e-9;
        if (!b.tubes.tubes.empty()) {
            bool in_chart = false;
            std::vector<Point2> chart = chart_points(b.tubes.tubes, true, in_chart);
            if (!chart.empty()) {
                PointSet dual = PointSet::unchecked(std::move(chart), F.scale());
                b.tube_regularity = verify_delta_set(dual, s_report);
            }
        }
        if (b.kept)
            for (int id : cov) in_kept[static_cast<std::size_t>(id)] = 1;
    }
    for (std::size_t i = 0; i < F.size(); ++i)
        if (!in_kept[i]) out.f_bad.push_back(static_cast<int>(i));
    return out;
}

}  // namespace frostlab
