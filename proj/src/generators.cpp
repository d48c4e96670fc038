#include "frostlab/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "frostlab/duality.hpp"
#include "frostlab/regularity.hpp"

namespace frostlab {

namespace {

// Balanced dyadic thinning on [0,1): refine level by level, targeting
// round(2^{s k}) surviving intervals at level k. The surplus over the parent
// count is spread by an even stride; which child survives a non-split parent
// is the caller's choice (fixed left for the deterministic generator, coin
// flips for the seeded variant).
std::vector<std::uint64_t> thinned_line_indices(double s, int m, std::mt19937_64* rng) {
    std::vector<std::uint64_t> cur{0};
    for (int k = 1; k <= m; ++k) {
        double want = std::round(std::exp2(s * k));
        auto parents = cur.size();
        auto target = static_cast<std::size_t>(
            std::min(want, static_cast<double>(parents) * 2.0));
        target = std::clamp<std::size_t>(target, parents, parents * 2);
        std::size_t splits = target - parents;  // parents keeping both children
        std::vector<std::uint64_t> next;
        next.reserve(target);
        std::size_t done = 0;
        for (std::size_t i = 0; i < parents; ++i) {
            bool split = (i + 1) * splits / parents > done;
            if (split) {
                ++done;
                next.push_back(cur[i] << 1);
                next.push_back(cur[i] << 1 | 1);
            } else {
                std::uint64_t child = rng ? (*rng)() & 1 : 0;
                next.push_back(cur[i] << 1 | child);
            }
        }
        cur = std::move(next);
    }
    return cur;
}

PointSet line_points(const std::vector<std::uint64_t>& idx, int m, const Line& line) {
    const auto n = line.normal();
    const Point2 base{n[0] * line.offset, n[1] * line.offset};
    const auto dir = line.direction();
    const double step = std::exp2(-m);
    std::vector<Point2> pts;
    pts.reserve(idx.size());
    for (std::uint64_t i : idx) {
        double u = 2.0 * (static_cast<double>(i) + 0.5) * step - 1.0;  // [-1, 1)
        pts.push_back({base.x + u * dir[0], base.y + u * dir[1]});
    }
    return PointSet(std::move(pts), Scale(m));
}

// One level of the branching set: which of the 4 children each cell keeps.
// Two survivors prefer a diagonal pair, which keeps neighbouring occupied
// cells rare and the measured regularity constant small.
void pick_children(std::mt19937_64& rng, int b, int out[4]) {
    static constexpr int diag[2][2] = {{0, 3}, {1, 2}};
    switch (b) {
        case 1:
            out[0] = static_cast<int>(rng() % 4);
            break;
        case 2: {
            const int* d = diag[rng() % 2];
            out[0] = d[0];
            out[1] = d[1];
            break;
        }
        case 3: {
            int skip = static_cast<int>(rng() % 4);
            int w = 0;
            for (int c = 0; c < 4; ++c)
                if (c != skip) out[w++] = c;
            break;
        }
        default:
            for (int c = 0; c < 4; ++c) out[c] = c;
            break;
    }
}

PointSet branching_set(double s, int m, std::mt19937_64& rng) {
    struct Cell {
        std::uint64_t ix, iy;
    };
    std::vector<Cell> cur{{0, 0}};
    for (int k = 1; k <= m; ++k) {
        double want = std::round(std::exp2(s * k));
        auto parents = cur.size();
        double q = std::min(want / static_cast<double>(parents), 4.0);
        std::vector<Cell> next;
        next.reserve(static_cast<std::size_t>(q * static_cast<double>(parents)) + 4);
        std::size_t acc = 0;
        int kids[4];
        for (std::size_t i = 0; i < parents; ++i) {
            auto upto = static_cast<std::size_t>(
                std::llround(q * static_cast<double>(i + 1)));
            int b = std::clamp<int>(static_cast<int>(upto - acc), 1, 4);
            acc += static_cast<std::size_t>(b);
            pick_children(rng, b, kids);
            for (int j = 0; j < b; ++j) {
                int c = kids[j];
                next.push_back({cur[i].ix << 1 | static_cast<unsigned>(c & 1),
                                cur[i].iy << 1 | static_cast<unsigned>(c >> 1)});
            }
        }
        cur = std::move(next);
    }
    const double delta = std::exp2(-m);
    std::vector<Point2> pts;
    pts.reserve(cur.size());
    for (const auto& c : cur)
        pts.push_back({(static_cast<double>(c.ix) + 0.5) * delta,
                       (static_cast<double>(c.iy) + 0.5) * delta});
    return PointSet(std::move(pts), Scale(m));
}

}  // namespace

PointSet cantor_product(const DigitPattern& pattern, int depth) {
    if (pattern.base < 2) throw std::invalid_argument("digit base must be at least 2");
    if (pattern.digits.empty()) throw std::invalid_argument("digit pattern must be nonempty");
    std::vector<int> digits = pattern.digits;
    std::sort(digits.begin(), digits.end());
    digits.erase(std::unique(digits.begin(), digits.end()), digits.end());
    for (int d : digits)
        if (d < 0 || d >= pattern.base)
            throw std::invalid_argument("digit outside base");
    if (depth < 1) throw std::invalid_argument("depth must be positive");
    double n1 = std::pow(static_cast<double>(digits.size()), depth);
    if (n1 * n1 > 0x1.0p25) throw std::invalid_argument("generator output too large");

    std::vector<double> axis{0.0};
    double w = 1.0;
    for (int k = 0; k < depth; ++k) {
        w /= pattern.base;
        std::vector<double> next;
        next.reserve(axis.size() * digits.size());
        for (double v : axis)
            for (int d : digits) next.push_back(v + d * w);
        axis = std::move(next);
    }
    std::sort(axis.begin(), axis.end());

    int m = static_cast<int>(
        std::ceil(depth * std::log2(static_cast<double>(pattern.base)) - 1e-9));
    std::vector<Point2> pts;
    pts.reserve(axis.size() * axis.size());
    for (double x : axis)
        for (double y : axis) pts.push_back({x, y});
    return PointSet(std::move(pts), Scale(m));
}

PointSet set_on_line(double s, Scale delta, const Line& line) {
    if (s > 1.0) throw std::invalid_argument("a line carries at most dimension 1");
    if (s < 0.0) throw std::invalid_argument("exponent out of range");
    return line_points(thinned_line_indices(s, delta.exponent, nullptr), delta.exponent,
                       line);
}

PointSet grid_set(Scale delta) {
    const auto n = static_cast<std::size_t>(std::exp2(delta.exponent));
    if (n * n > (1u << 25)) throw std::invalid_argument("generator output too large");
    const double d = delta.value();
    std::vector<Point2> pts;
    pts.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            pts.push_back({static_cast<double>(i) * d, static_cast<double>(j) * d});
    return PointSet(std::move(pts), delta);
}

PointSet random_delta_set(double s, Scale delta, std::uint64_t seed) {
    if (s <= 0.0 || s > 2.0) throw std::invalid_argument("exponent out of range");
    double worst = 0.0;
    for (int attempt = 0; attempt < 5; ++attempt) {
        std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(attempt));
        PointSet P = branching_set(s, delta.exponent, rng);
        RegularityReport rep = verify_delta_set(P, s);
        if (rep.best_C <= 32.0) return P;
        worst = std::max(worst, rep.best_C);
    }
    std::ostringstream msg;
    msg << "seeded set failed regularity after 5 attempts (best_C up to " << worst
        << " > 32)";
    throw std::runtime_error(msg.str());
}

FurstenbergConfig furstenberg_config(double s, double t, Scale delta,
                                     std::uint64_t seed) {
    if (s <= 0.0 || s > 1.0) throw std::invalid_argument("exponent out of range");
    if (t < 0.0 || t > 2.0) throw std::invalid_argument("exponent out of range");
    FurstenbergConfig cfg;
    cfg.gamma = s + std::min(s, t);
    const double d = delta.value();

    std::vector<Point2> chart;
    if (t == 0.0) {
        std::mt19937_64 rng(seed);
        chart.push_back({rand_unit(rng) * 0.5, rand_unit(rng) * 0.5});
    } else {
        chart = random_delta_set(t, delta, seed).points();
    }

    // One thinning pattern shared by every tube (the product-type witness):
    // fibers at the same arclength then line up across nearby tubes, so the
    // union's covering keeps the clean 2^{gamma m} growth through coarse
    // scales instead of smearing into extra cells tube by tube.
    std::mt19937_64 rng(seed ^ 0xda3e39cb94b95bdbULL);
    const std::vector<std::uint64_t> fiber =
        thinned_line_indices(s, delta.exponent, &rng);
    std::map<std::pair<std::int64_t, std::int64_t>, Point2> rep;
    for (const auto& q : chart) {
        Line axis = to_angle_form(dualize_point(q));
        cfg.tubes.tubes.push_back({axis, d});
        PointSet on_axis = line_points(fiber, delta.exponent, axis);
        for (const auto& p : on_axis.points())
            rep.try_emplace({static_cast<std::int64_t>(std::floor(p.x / d)),
                             static_cast<std::int64_t>(std::floor(p.y / d))},
                            p);
        cfg.per_tube.push_back(std::move(on_axis));
    }
    std::vector<Point2> uni;
    uni.reserve(rep.size());
    for (const auto& [cell, p] : rep) uni.push_back(p);
    cfg.union_set = PointSet::unchecked(std::move(uni), delta);
    return cfg;
}

DyadicMeasure seeded_measure(int dim, int block_size, int blocks, std::uint64_t seed) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("dimension must be 1 or 2");
    std::mt19937_64 rng(seed);
    const int digits = dim == 2 ? 4 : 2;
    const std::size_t support_cap = 768;

    std::vector<MeasureCell> cur{{"", 1.0}};
    for (int k = 1; k <= blocks; ++k) {
        const double ell = std::exp2(-static_cast<double>(k) * block_size);
        const double dust_mass = std::pow(ell, dim + 2 + 0.5);
        std::vector<MeasureCell> next;
        for (const auto& cell : cur) {
            int b = cur.size() >= support_cap ? 1 : 1 + static_cast<int>(rng() % 3);
            std::vector<std::string> kids;
            while (static_cast<int>(kids.size()) < b) {
                std::string suffix(static_cast<std::size_t>(block_size), '0');
                for (char& c : suffix) c = static_cast<char>('0' + rng() % digits);
                if (std::find(kids.begin(), kids.end(), suffix) == kids.end())
                    kids.push_back(suffix);
            }
            std::vector<double> wt(kids.size());
            double sum = 0.0;
            for (double& v : wt) {
                v = 0.5 + 0.5 * rand_unit(rng);
                sum += v;
            }
            double keep = 0.90 + 0.08 * rand_unit(rng);  // mild leak per level
            for (std::size_t i = 0; i < kids.size(); ++i)
                next.push_back({cell.path + kids[i], cell.mass * keep * wt[i] / sum});
            if (rng() % 4 == 0) {
                std::string suffix(static_cast<std::size_t>(block_size), '0');
                for (char& c : suffix) c = static_cast<char>('0' + rng() % digits);
                if (std::find(kids.begin(), kids.end(), suffix) == kids.end())
                    next.push_back({cell.path + suffix, dust_mass});
            }
        }
        cur = std::move(next);
    }
    return DyadicMeasure(dim, block_size, blocks, std::move(cur));
}

double GeneratorSpec::nominal_dimension() const {
    if (kind == "cantor_product") {
        std::vector<int> d = pattern.digits;
        std::sort(d.begin(), d.end());
        d.erase(std::unique(d.begin(), d.end()), d.end());
        return 2.0 * std::log2(static_cast<double>(d.size())) /
               std::log2(static_cast<double>(pattern.base));
    }
    if (kind == "on_line" || kind == "random_delta") return s;
    if (kind == "grid") return 2.0;
    if (kind == "furstenberg") return s + std::min(s, t);
    throw std::invalid_argument("unknown generator kind: " + kind);
}

void GeneratorSpec::validate() const {
    nominal_dimension();  // throws on unknown kind / bad pattern
    if (scale_exp < 1) throw std::invalid_argument("scale out of range");
}

PointSet generate(const GeneratorSpec& spec) {
    spec.validate();
    if (spec.kind == "cantor_product") return cantor_product(spec.pattern, spec.depth);
    if (spec.kind == "on_line")
        return set_on_line(spec.s, Scale(spec.scale_exp),
                           Line(spec.line_theta, spec.line_offset));
    if (spec.kind == "random_delta")
        return random_delta_set(spec.s, Scale(spec.scale_exp), spec.seed);
    if (spec.kind == "grid") return grid_set(Scale(spec.scale_exp));
    return furstenberg_config(spec.s, spec.t, Scale(spec.scale_exp), spec.seed).union_set;
}

}  // namespace frostlab
