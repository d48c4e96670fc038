#include "frostlab/uniformization.hpp"

#include "frostlab/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace frostlab {

namespace {

// --- decimal strings ------------------------------------------------------
// Cell indices at depth 156 need ~47 decimal digits, so the file format
// carries them as digit strings and we do the base-2 conversion by hand.

bool dec_is_zero(const std::string& s) {
    return s.find_first_not_of('0') == std::string::npos;
}

std::string dec_normalize(std::string s) {
    std::size_t i = s.find_first_not_of('0');
    if (i == std::string::npos) return "0";
    return s.substr(i);
}

// In-place divide by two, returning the remainder bit.
int dec_div2(std::string& s) {
    int carry = 0;
    for (char& c : s) {
        int v = carry * 10 + (c - '0');
        c = static_cast<char>('0' + v / 2);
        carry = v % 2;
    }
    s = dec_normalize(std::move(s));
    return carry;
}

// In-place s = 2*s + bit.
void dec_double_add(std::string& s, int bit) {
    int carry = bit;
    for (auto it = s.rbegin(); it != s.rend(); ++it) {
        int v = (*it - '0') * 2 + carry;
        *it = static_cast<char>('0' + v % 10);
        carry = v / 10;
    }
    if (carry) s.insert(s.begin(), static_cast<char>('0' + carry));
}

void require_digits(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw std::runtime_error("malformed measure line");
}

// Key=value pairs embedded in header comments ("# ... dim=2 T=26 ...").
bool comment_value(const std::string& comment, const std::string& key, std::string& out) {
    std::istringstream in(comment);
    std::string tok;
    while (in >> tok) {
        if (tok.rfind(key + "=", 0) == 0) {
            out = tok.substr(key.size() + 1);
            return true;
        }
    }
    return false;
}

// Group equal level-`depth` prefixes of a path-sorted cell list.
std::vector<MeasureCell> aggregate_cells(const std::vector<MeasureCell>& cells, int depth) {
    std::vector<MeasureCell> out;
    for (const auto& c : cells) {
        std::string prefix = c.path.substr(0, static_cast<std::size_t>(depth));
        if (!out.empty() && out.back().path == prefix)
            out.back().mass += c.mass;
        else
            out.push_back({std::move(prefix), c.mass});
    }
    return out;
}

}  // namespace

std::string indices_to_path(int dim, int depth, const std::string& ix_dec,
                            const std::string& iy_dec) {
    require_digits(ix_dec);
    if (dim == 2) require_digits(iy_dec);
    std::string x = dec_normalize(ix_dec);
    std::string y = dim == 2 ? dec_normalize(iy_dec) : std::string("0");
    std::vector<int> xb(static_cast<std::size_t>(depth)), yb(xb.size());
    for (int i = 0; i < depth; ++i) {
        xb[static_cast<std::size_t>(i)] = dec_div2(x);  // least significant first
        yb[static_cast<std::size_t>(i)] = dec_div2(y);
    }
    if (!dec_is_zero(x) || !dec_is_zero(y))
        throw std::runtime_error("cell index out of range");
    std::string path(static_cast<std::size_t>(depth), '0');
    for (int level = 0; level < depth; ++level) {
        int bx = xb[static_cast<std::size_t>(depth - 1 - level)];
        int by = yb[static_cast<std::size_t>(depth - 1 - level)];
        path[static_cast<std::size_t>(level)] =
            static_cast<char>('0' + (dim == 2 ? (by << 1 | bx) : bx));
    }
    return path;
}

void path_to_indices(int dim, const std::string& path, std::string& ix_dec,
                     std::string& iy_dec) {
    ix_dec = "0";
    iy_dec = "0";
    for (char c : path) {
        int digit = c - '0';
        dec_double_add(ix_dec, digit & 1);
        if (dim == 2) dec_double_add(iy_dec, digit >> 1);
    }
}

DyadicMeasure::DyadicMeasure(int dim, int block_size, int blocks,
                             std::vector<MeasureCell> cells)
    : dim_(dim), T_(block_size), m_(blocks), cells_(std::move(cells)) {
    if (dim_ != 1 && dim_ != 2) throw std::invalid_argument("dimension must be 1 or 2");
    if (T_ < 1 || m_ < 1) throw std::invalid_argument("block layout must be positive");
    const std::size_t want = static_cast<std::size_t>(depth());
    const char max_digit = static_cast<char>('0' + (dim_ == 2 ? 3 : 1));
    std::erase_if(cells_, [](const MeasureCell& c) { return c.mass == 0.0; });
    for (const auto& c : cells_) {
        if (c.path.size() != want) throw std::invalid_argument("cell path has wrong depth");
        for (char d : c.path)
            if (d < '0' || d > max_digit)
                throw std::invalid_argument("cell path has invalid digit");
        if (!(c.mass > 0.0)) throw std::invalid_argument("cell mass must be positive");
    }
    std::sort(cells_.begin(), cells_.end(),
              [](const MeasureCell& a, const MeasureCell& b) { return a.path < b.path; });
    for (std::size_t i = 1; i < cells_.size(); ++i)
        if (cells_[i].path == cells_[i - 1].path)
            throw std::invalid_argument("duplicate measure cell");
    for (const auto& c : cells_) total_ += c.mass;
    if (cells_.empty()) throw std::invalid_argument("measure has no mass");
    if (total_ > 1.0 + 1e-12) throw std::invalid_argument("measure mass exceeds one");
}

std::vector<MeasureCell> DyadicMeasure::masses_at(int depth) const {
    if (depth < 0 || depth > this->depth())
        throw std::invalid_argument("depth outside the measure");
    return aggregate_cells(cells_, depth);
}

std::vector<MeasureCell> DyadicMeasure::restrict_to(
    int depth, const std::vector<std::string>& keep) const {
    std::vector<MeasureCell> out;
    for (const auto& c : cells_)
        if (std::binary_search(keep.begin(), keep.end(),
                               c.path.substr(0, static_cast<std::size_t>(depth))))
            out.push_back(c);
    return out;
}

void save_measure(const std::string& path, const DyadicMeasure& mu) {
    std::ostringstream out;
    out << "# frostlab measure dim=" << mu.dim() << " T=" << mu.block_size()
        << " m=" << mu.blocks() << "\n";
    out << "# depth ix" << (mu.dim() == 2 ? " iy" : "") << " mass\n";
    for (const auto& c : mu.cells()) {
        std::string ix, iy;
        path_to_indices(mu.dim(), c.path, ix, iy);
        out << mu.depth() << ' ' << ix;
        if (mu.dim() == 2) out << ' ' << iy;
        out << ' ' << fmt_double(c.mass) << "\n";
    }
    write_text_file(path, out.str());
}

DyadicMeasure load_measure(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    int dim = 0, T = 0, m = 0;
    std::vector<MeasureCell> raw;
    std::vector<std::array<std::string, 4>> lines;  // depth ix iy mass
    std::string line;
    while (std::getline(in, line)) {
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        if (line[start] == '#') {
            std::string v;
            if (comment_value(line, "dim", v)) dim = std::atoi(v.c_str());
            if (comment_value(line, "T", v)) T = std::atoi(v.c_str());
            if (comment_value(line, "m", v)) m = std::atoi(v.c_str());
            continue;
        }
        std::istringstream row(line);
        std::vector<std::string> tok;
        std::string t;
        while (row >> t) tok.push_back(t);
        if (tok.size() != 3 && tok.size() != 4)
            throw std::runtime_error("malformed measure line");
        if (dim == 0) dim = static_cast<int>(tok.size()) - 2;
        if (tok.size() != static_cast<std::size_t>(dim) + 2)
            throw std::runtime_error("malformed measure line");
        lines.push_back({tok[0], tok[1], dim == 2 ? tok[2] : std::string(),
                         tok[dim == 2 ? 3 : 2]});
    }
    if (lines.empty()) throw std::runtime_error("measure file has no cells");
    int depth = std::atoi(lines.front()[0].c_str());
    if (depth < 1) throw std::runtime_error("malformed measure line");
    if (T == 0) T = depth;  // untagged files are treated as a single block
    if (m == 0) m = depth / std::max(T, 1);
    if (m * T != depth) throw std::runtime_error("measure depth not a multiple of the block size");
    raw.reserve(lines.size());
    for (const auto& tok : lines) {
        if (std::atoi(tok[0].c_str()) != depth)
            throw std::runtime_error("measure cells have mixed depths");
        char* end = nullptr;
        double mass = std::strtod(tok[3].c_str(), &end);
        if (end == tok[3].c_str() || *end != '\0')
            throw std::runtime_error("malformed measure line");
        raw.push_back({indices_to_path(dim, depth, tok[1], tok[2]), mass});
    }
    return DyadicMeasure(dim, T, m, std::move(raw));
}

void UniformityProfile::validate() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("dimension must be 1 or 2");
    if (block_size < 1) throw std::invalid_argument("block layout must be positive");
    if (k_lo < 0 || blocks < k_lo) throw std::invalid_argument("profile block range is empty");
    if (phis.size() != static_cast<std::size_t>(blocks - k_lo + 1))
        throw std::invalid_argument("profile levels must match the block range");
    for (double p : phis) {
        if (p < -1e-9 || p > dim + 2 + 1e-9)
            throw std::invalid_argument("profile exponent out of range");
        if (eta > 0.0) {
            double ratio = p / eta;
            if (std::abs(ratio - std::round(ratio)) > 1e-6)
                throw std::invalid_argument("profile exponent not a multiple of eta");
        }
    }
}

void save_profile(const std::string& path, const UniformityProfile& prof) {
    prof.validate();
    std::ostringstream out;
    out << "# frostlab profile dim=" << prof.dim << " T=" << prof.block_size
        << " eta=" << fmt_double(prof.eta) << " m=" << prof.blocks << "\n";
    out << "# k phi\n";
    for (int k = prof.k_lo; k <= prof.k_hi(); ++k)
        out << k << ' ' << fmt_double(prof.phi(k)) << "\n";
    write_text_file(path, out.str());
}

UniformityProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    UniformityProfile prof;
    prof.dim = 2;
    prof.eta = 0.0;
    prof.block_size = 1;
    std::vector<std::pair<int, double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        if (line[start] == '#') {
            std::string v;
            if (comment_value(line, "dim", v)) prof.dim = std::atoi(v.c_str());
            if (comment_value(line, "T", v)) prof.block_size = std::atoi(v.c_str());
            if (comment_value(line, "eta", v)) prof.eta = std::strtod(v.c_str(), nullptr);
            continue;
        }
        std::istringstream row(line);
        int k;
        double phi;
        if (!(row >> k >> phi)) throw std::runtime_error("malformed profile line");
        rows.emplace_back(k, phi);
    }
    if (rows.empty()) throw std::runtime_error("profile file has no levels");
    std::sort(rows.begin(), rows.end());
    prof.k_lo = rows.front().first;
    prof.blocks = rows.back().first;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].first != prof.k_lo + static_cast<int>(i))
            throw std::runtime_error("profile levels must be contiguous");
        prof.phis.push_back(rows[i].second);
    }
    prof.validate();
    return prof;
}

int min_block_size(int dim, double eta) {
    if (eta <= 0.0 || eta >= 1.0) throw std::invalid_argument("eta must lie in (0,1)");
    return static_cast<int>(std::ceil(std::log2(10.0 * dim / eta) / eta - 1e-12));
}

UniformityCheck check_uniform(const DyadicMeasure& mu, const UniformityProfile& prof) {
    prof.validate();
    if (prof.dim != mu.dim() || prof.block_size != mu.block_size() ||
        prof.k_hi() > mu.blocks())
        throw std::invalid_argument("profile does not match the measure");
    for (int k = prof.k_hi(); k >= prof.k_lo; --k) {
        const int level = k * prof.block_size;
        const double phi = prof.phi(k);
        for (const auto& cell : mu.masses_at(level)) {
            // mu(Q) in [l^{phi+eta}, l^phi] compared as exponents of l = 2^{-level}
            double e = -std::log2(cell.mass) / level;
            if (e < phi - 1e-9 || e > phi + prof.eta + 1e-9)
                return {false, k, cell.path, cell.mass};
        }
    }
    return {};
}

UniformizeResult uniformize(const DyadicMeasure& mu, double eta) {
    if (eta <= 0.0 || eta >= 1.0) throw std::invalid_argument("eta must lie in (0,1)");
    const int d = mu.dim(), T = mu.block_size(), m = mu.blocks();
    const int total_depth = m * T;
    if (T < min_block_size(d, eta)) throw std::runtime_error("block size below T0");
    if (std::log2(mu.total_mass()) < -eta * total_depth - 1e-9)
        throw std::runtime_error("mass below admissible floor");

    const int k_lo = static_cast<int>(std::ceil(eta * m - 1e-12));
    const int c_max = static_cast<int>(std::floor((d + 2) / eta + 1e-9));

    std::vector<UniformizeResult::LevelLog> levels;
    levels.reserve(static_cast<std::size_t>(m - k_lo + 1));
    std::vector<double> phis(static_cast<std::size_t>(m - k_lo + 1), 0.0);
    std::vector<MeasureCell> survivors = mu.cells();

    // Finest block level first: coarser restrictions later remove whole
    // cells of this level, never part of one, so the mass window certified
    // here stays valid for every surviving cell.
    for (int k = m; k >= k_lo; --k) {
        const int level = k * T;
        auto groups = aggregate_cells(survivors, level);

        double light_mass = 0.0, heavy_mass = 0.0;
        std::vector<double> class_mass(static_cast<std::size_t>(c_max + 1), 0.0);
        std::vector<int> cls(groups.size(), -1);
        for (std::size_t i = 0; i < groups.size(); ++i) {
            double lg = std::log2(groups[i].mass);
            if (lg < -static_cast<double>(level) * (d + 2) - 1e-9) {
                light_mass += groups[i].mass;  // below l^{d+2}: discard outright
                continue;
            }
            double e = -lg / level;
            int c = static_cast<int>(std::floor(e / eta + 1e-9));
            c = std::clamp(c, 0, c_max);
            cls[i] = c;
            class_mass[static_cast<std::size_t>(c)] += groups[i].mass;
            heavy_mass += groups[i].mass;
        }

        int best = 0;
        for (int c = 1; c <= c_max; ++c)
            if (class_mass[static_cast<std::size_t>(c)] >
                class_mass[static_cast<std::size_t>(best)])
                best = c;  // ties resolve toward the smaller exponent
        if (class_mass[static_cast<std::size_t>(best)] <= 0.0)
            throw std::logic_error("uniformization lost all mass");

        std::vector<std::string> keep;
        for (std::size_t i = 0; i < groups.size(); ++i)
            if (cls[i] == best) keep.push_back(groups[i].path);
        std::vector<MeasureCell> next;
        for (const auto& c : survivors)
            if (std::binary_search(keep.begin(), keep.end(),
                                   c.path.substr(0, static_cast<std::size_t>(level))))
                next.push_back(c);
        survivors = std::move(next);

        phis[static_cast<std::size_t>(k - k_lo)] = best * eta;
        levels.push_back({k, light_mass,
                          heavy_mass - class_mass[static_cast<std::size_t>(best)],
                          class_mass[static_cast<std::size_t>(best)], best * eta});
    }

    UniformizeResult res{DyadicMeasure(d, T, m, std::move(survivors)),
                         UniformityProfile{d, T, m, eta, k_lo, std::move(phis)},
                         std::move(levels)};
    if (std::log2(res.measure.total_mass()) < -2.0 * eta * total_depth - 1e-6)
        throw std::logic_error("uniformized mass below guarantee");
    UniformityCheck chk = check_uniform(res.measure, res.profile);
    if (!chk.ok) throw std::logic_error("uniformization produced a non-uniform measure");
    return res;
}

StableScaleResult stable_scale_search(const UniformityProfile& prof, double eps) {
    prof.validate();
    if (eps <= 0.0 || eps > 1.0) throw std::invalid_argument("eps must lie in (0,1]");
    int k_cur = prof.k_hi();
    if (k_cur < prof.k_lo) throw std::runtime_error("profile too shallow for eps");
    int steps = 0;
    const int max_steps = static_cast<int>(std::ceil((prof.dim + 2) / eps)) + 1;
    for (;;) {
        // Window [Delta, Delta^eps] in block indices: k in [ceil(eps*k_cur), k_cur].
        int k_floor = static_cast<int>(std::ceil(eps * k_cur - 1e-12));
        if (k_floor < prof.k_lo)
            throw std::runtime_error("profile too shallow for eps");
        int next = -1;
        for (int k = k_cur - 1; k >= k_floor; --k) {
            if (prof.phi(k) < prof.phi(k_cur) - eps - 1e-9) {
                next = k;  // nearest coarser scale whose exponent drops
                break;
            }
        }
        if (next < 0) break;
        k_cur = next;
        if (++steps > max_steps)
            throw std::logic_error("stable-scale descent failed to terminate");
    }
    return {Scale(k_cur * prof.block_size), prof.phi(k_cur), k_cur, steps};
}

}  // namespace frostlab
