#include "frostlab/radial.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace frostlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

std::size_t ArcSet::covering(int j) const {
    if (j > depth || j < 0) throw std::invalid_argument("scale out of range");
    const int shift = depth - j;
    std::size_t n = 0;
    std::uint64_t last = ~0ull;
    for (std::uint64_t a : arcs) {  // arcs sorted, so shifted values are too
        const std::uint64_t coarse = a >> shift;
        if (coarse != last) {
            ++n;
            last = coarse;
        }
    }
    return n;
}

namespace {

// Direction of y seen from x as a circle coordinate in [0,1).
inline double circle_coord(const Point2& x, const Point2& y) {
    double u = std::atan2(y.y - x.y, y.x - x.x) / kTwoPi;
    if (u < 0.0) u += 1.0;
    if (u >= 1.0) u = 0.0;  // guard against rounding at the wrap
    return u;
}

}  // namespace

ArcSet radial_project(const Point2& x, const PointSet& K, int depth) {
    if (depth < 0 || depth > 62) throw std::invalid_argument("scale out of range");
    const double min_sq = K.delta() * K.delta();
    const double scale = std::ldexp(1.0, depth);
    const std::uint64_t mask = (depth == 0) ? 0 : ((1ull << depth) - 1);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(K.size());
    for (const Point2& y : K.points()) {
        if (dist_sq(x, y) < min_sq) throw std::invalid_argument("viewpoint too close to K");
        const auto idx = static_cast<std::uint64_t>(circle_coord(x, y) * scale);
        seen.insert(idx & (depth == 0 ? 0ull : mask));
    }
    ArcSet out;
    out.depth = depth;
    out.arcs.assign(seen.begin(), seen.end());
    std::sort(out.arcs.begin(), out.arcs.end());
    return out;
}

double content_estimate(const ArcSet& S, double sigma) {
    if (S.arcs.empty()) return 0.0;
    // Bottom-up over the implicit binary tree of occupied arcs: each level
    // replaces groups of children by min(parent side^sigma, group sum).
    std::vector<std::pair<std::uint64_t, double>> level;
    level.reserve(S.size());
    const double leaf_cost = std::pow(std::ldexp(1.0, -S.depth), sigma);
    for (std::uint64_t a : S.arcs) level.emplace_back(a, leaf_cost);
    for (int j = S.depth; j > 0; --j) {
        const double parent_cost = std::pow(std::ldexp(1.0, -(j - 1)), sigma);
        std::vector<std::pair<std::uint64_t, double>> up;
        up.reserve(level.size() / 2 + 1);
        std::size_t i = 0;
        while (i < level.size()) {
            const std::uint64_t parent = level[i].first >> 1;
            double sum = 0.0;
            while (i < level.size() && (level[i].first >> 1) == parent) {
                sum += level[i].second;
                ++i;
            }
            up.emplace_back(parent, std::min(parent_cost, sum));
        }
        level = std::move(up);
    }
    double total = 0.0;
    for (const auto& [idx, cost] : level) total += cost;
    return std::min(total, 1.0);
}

double content_estimate(std::span<const Point2> S, double sigma, Scale delta) {
    if (S.empty()) return 0.0;
    const int m = delta.exponent;
    std::vector<std::pair<std::uint64_t, double>> level;
    {
        std::unordered_set<std::uint64_t> occ;
        occ.reserve(S.size());
        const double scale = std::ldexp(1.0, m);
        for (const Point2& p : S) {
            if (!in_unit_square(p))
                throw std::invalid_argument("set outside unit window (normalize first)");
            occ.insert(morton_key(static_cast<std::uint64_t>(p.x * scale),
                                  static_cast<std::uint64_t>(p.y * scale), m));
        }
        const double leaf_cost = std::pow(std::ldexp(1.0, -m), sigma);
        level.reserve(occ.size());
        for (std::uint64_t k : occ) level.emplace_back(k, leaf_cost);
        std::sort(level.begin(), level.end());
    }
    for (int j = m; j > 0; --j) {
        const double parent_cost = std::pow(std::ldexp(1.0, -(j - 1)), sigma);
        std::vector<std::pair<std::uint64_t, double>> up;
        up.reserve(level.size() / 4 + 1);
        std::size_t i = 0;
        while (i < level.size()) {
            const std::uint64_t parent = level[i].first >> 2;
            double sum = 0.0;
            while (i < level.size() && (level[i].first >> 2) == parent) {
                sum += level[i].second;
                ++i;
            }
            up.emplace_back(parent, std::min(parent_cost, sum));
        }
        level = std::move(up);
    }
    double total = 0.0;
    for (const auto& [idx, cost] : level) total += cost;
    return std::min(total, 1.0);
}

DimensionFit estimate_dimension(const std::map<int, std::uint64_t>& counts) {
    if (counts.size() < 3) throw std::invalid_argument("fewer than 3 scales");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(counts.size());
    for (const auto& [m, c] : counts) {
        if (c < 1) throw std::invalid_argument("covering count must be at least 1");
        const double x = m, y = std::log2(static_cast<double>(c));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fewer than 3 scales");
    DimensionFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.n_scales = counts.size();
    const double intercept = (sy - fit.slope * sx) / n;
    double ss = 0.0;
    for (const auto& [m, c] : counts) {
        const double e = std::log2(static_cast<double>(c)) - (fit.slope * m + intercept);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

std::vector<HeavyTube> heavy_directions(const Point2& x, const PointSet& K, double Sigma,
                                        double eps, int depth) {
    if (depth < 1 || depth > 40) throw std::invalid_argument("scale out of range");
    const double Delta = std::ldexp(1.0, -depth);
    const double min_sq = K.delta() * K.delta();
    const double scale = std::ldexp(1.0, depth);
    const std::uint64_t n_arcs = 1ull << depth;

    std::unordered_map<std::uint64_t, std::vector<int>> arc_members;
    double r_max = 0.0;
    for (std::size_t i = 0; i < K.size(); ++i) {
        const Point2& y = K[i];
        if (dist_sq(x, y) < min_sq) throw std::invalid_argument("viewpoint too close to K");
        r_max = std::max(r_max, dist(x, y));
        const auto idx =
            static_cast<std::uint64_t>(circle_coord(x, y) * scale) & (n_arcs - 1);
        arc_members[idx].push_back(static_cast<int>(i));
    }

    const double threshold =
        std::pow(Delta, Sigma + eps) * static_cast<double>(K.size());
    // Enough sub-arcs that one width-Delta tube through x covers each
    // sub-cone out to distance r_max: sin(pi Delta / splits) * r_max <= Delta.
    const int splits = std::max(1, static_cast<int>(std::ceil(kPi * r_max)));

    std::vector<std::uint64_t> heavy;
    for (const auto& [idx, members] : arc_members)
        if (static_cast<double>(members.size()) >= threshold) heavy.push_back(idx);
    std::sort(heavy.begin(), heavy.end());

    std::vector<HeavyTube> out;
    out.reserve(heavy.size());
    for (std::uint64_t idx : heavy) {
        const auto& members = arc_members[idx];
        // Sub-bucket members by angle within the arc; keep the heaviest.
        std::vector<std::vector<int>> sub(static_cast<std::size_t>(splits));
        for (int i : members) {
            const double u = circle_coord(x, K[static_cast<std::size_t>(i)]);
            double frac = u * scale - static_cast<double>(idx);
            frac = std::min(std::max(frac, 0.0), 1.0 - 1e-15);
            sub[static_cast<std::size_t>(frac * splits)].push_back(i);
        }
        std::size_t pick = 0;
        for (std::size_t k = 1; k < sub.size(); ++k)
            if (sub[k].size() > sub[pick].size()) pick = k;

        const double mid =
            (static_cast<double>(idx) + (static_cast<double>(pick) + 0.5) / splits) /
            scale;
        const double ang = mid * kTwoPi;
        // Line through x with direction angle `ang` (offset = x . n).
        Line axis(ang, 0.0);
        axis.offset = x.x * -std::sin(axis.theta) + x.y * std::cos(axis.theta);

        HeavyTube ht;
        ht.tube = Tube(axis, Delta);
        ht.arc_index = idx;
        ht.arc_count = members.size();
        ht.declared_min = (members.size() + static_cast<std::size_t>(splits) - 1) /
                          static_cast<std::size_t>(splits);
        std::size_t cnt = 0;
        for (int i : sub[pick])
            if (tube_contains(ht.tube, K[static_cast<std::size_t>(i)])) ++cnt;
        ht.tube_count = cnt;
        out.push_back(ht);
    }
    return out;
}

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    if (const char* env = std::getenv("FROSTLAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

ScanReport exceptional_scan(const PointSet& K, const PointSet& viewpoints, double sigma,
                            const std::vector<int>& ladder, double min_dist, int threads) {
    if (ladder.size() < 4) throw std::invalid_argument("ladder too short for regression");
    std::vector<int> lad = ladder;
    std::sort(lad.begin(), lad.end());
    const int max_m = lad.back();
    if (max_m > 30) throw std::invalid_argument("scale out of range");

    ScanReport rep;
    rep.sigma = sigma;
    rep.ladder = lad;

    // Drop viewpoints that sit closer than min_dist to K.
    const PointGrid kgrid(K.points(), std::max(min_dist, K.delta()));
    std::vector<int> keep;
    for (std::size_t i = 0; i < viewpoints.size(); ++i)
        if (!kgrid.any_within(viewpoints[i], min_dist)) keep.push_back(static_cast<int>(i));
    rep.n_viewpoints = keep.size();

    // Arc counts at every ladder scale for every kept viewpoint: mark arcs at
    // the finest depth in a bitset, then fold upward.
    const std::uint64_t n_fine = 1ull << max_m;
    const std::size_t words = static_cast<std::size_t>((n_fine + 63) / 64);
    const double fine_scale = std::ldexp(1.0, max_m);
    std::vector<std::vector<std::uint32_t>> arc_counts(
        lad.size(), std::vector<std::uint32_t>(keep.size(), 0));

    const int n_threads = resolve_threads(threads);
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        std::vector<std::uint64_t> bits(words);
        for (;;) {
            const std::size_t vi = cursor.fetch_add(1);
            if (vi >= keep.size()) break;
            const Point2 x = viewpoints[static_cast<std::size_t>(keep[vi])];
            std::fill(bits.begin(), bits.end(), 0ull);
            for (const Point2& y : K.points()) {
                const auto idx =
                    static_cast<std::uint64_t>(circle_coord(x, y) * fine_scale) &
                    (n_fine - 1);
                bits[idx >> 6] |= 1ull << (idx & 63);
            }
            // Count at the finest scale, then fold pairs for coarser ones.
            for (std::size_t li = lad.size(); li-- > 0;) {
                const int shift = max_m - lad[li];
                if (shift == 0) {
                    std::uint32_t c = 0;
                    for (std::uint64_t w : bits) c += static_cast<std::uint32_t>(std::popcount(w));
                    arc_counts[li][vi] = c;
                } else {
                    const std::uint64_t n_arcs = n_fine >> shift;
                    std::uint32_t c = 0;
                    for (std::uint64_t a = 0; a < n_arcs; ++a) {
                        const std::uint64_t lo = a << shift, hi = ((a + 1) << shift) - 1;
                        bool hit = false;
                        for (std::uint64_t w = lo >> 6; w <= hi >> 6 && !hit; ++w)
                            if (bits[w]) {
                                // Word overlaps the arc range; test precisely.
                                const std::uint64_t first = std::max(lo, w << 6);
                                const std::uint64_t last = std::min(hi, (w << 6) + 63);
                                std::uint64_t mask = ~0ull;
                                mask >>= 63 - (last - (w << 6));
                                mask &= ~0ull << (first - (w << 6));
                                hit = (bits[w] & mask) != 0;
                            }
                        if (hit) ++c;
                    }
                    arc_counts[li][vi] = c;
                }
            }
        }
    };
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // K's own covering counts across the ladder.
    std::map<int, std::uint64_t> k_counts;
    for (int m : lad) k_counts[m] = covering_number(K, Scale(m));
    const DimensionFit k_fit = estimate_dimension(k_counts);
    rep.t_emp = k_fit.slope;
    rep.t_emp_residual = k_fit.residual;
    rep.bound = std::max(1.0 + sigma - rep.t_emp, 0.0);

    CsvWriter per_view({"scale_exp", "viewpoint_id", "covering_count", "exceptional_flag"});
    std::map<int, std::uint64_t> exc_counts;
    for (std::size_t li = 0; li < lad.size(); ++li) {
        const int m = lad[li];
        const double thr_mid = std::pow(2.0, m * sigma);
        const double thr_lo = std::pow(2.0, m * (sigma - 0.05));
        const double thr_hi = std::pow(2.0, m * (sigma + 0.05));
        ScanReport::ScaleRow row;
        row.m = m;
        row.k_covering = k_counts[m];
        std::vector<Point2> exc;
        for (std::size_t vi = 0; vi < keep.size(); ++vi) {
            const double c = arc_counts[li][vi];
            const bool is_exc = c <= thr_mid;
            if (c <= thr_lo) ++row.exc_lo;
            if (is_exc) {
                ++row.exc_mid;
                exc.push_back(viewpoints[static_cast<std::size_t>(keep[vi])]);
            }
            if (c <= thr_hi) ++row.exc_hi;
            per_view.row({std::to_string(m), std::to_string(keep[vi]),
                          std::to_string(arc_counts[li][vi]), is_exc ? "1" : "0"});
        }
        row.exc_covering = covering_number(exc, Scale(m));
        if (row.exc_covering > 0) exc_counts[m] = row.exc_covering;
        rep.rows.push_back(row);
    }

    if (exc_counts.size() >= 3) {
        const DimensionFit efit = estimate_dimension(exc_counts);
        rep.exc_slope = efit.slope;
        rep.exc_residual = efit.residual;
        rep.exc_slope_defined = true;
    } else {
        // Too few scales with survivors: slope 0 by convention, noted below.
        rep.exc_slope = 0.0;
        rep.exc_residual = 0.0;
        rep.exc_slope_defined = false;
    }

    CsvWriter summary({"scale_exp", "k_covering", "exc_lo", "exc_mid", "exc_hi",
                       "exc_covering"});
    for (const auto& row : rep.rows)
        summary.row({std::to_string(row.m), std::to_string(row.k_covering),
                     std::to_string(row.exc_lo), std::to_string(row.exc_mid),
                     std::to_string(row.exc_hi), std::to_string(row.exc_covering)});
    rep.per_viewpoint_csv = per_view.text();
    rep.summary_csv = summary.text();
    return rep;
}

}  // namespace frostlab
