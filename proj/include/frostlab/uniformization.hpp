#pragma once

// Block-uniform measures on the dyadic grid of [0,1)^d, d = 1 or 2.
//
// A measure is stored by its cells at the finest depth m*T; coarser masses
// are prefix sums. Cells are addressed by digit paths from the root ('0'/'1'
// per level on the line, quadrant digits '0'..'3' in the plane, y-bit high),
// so depths far beyond 64 bits per axis work fine. A profile Phi assigns to
// each block level k in {ceil(eta m), ..., m} an exponent phi(k) in
// eta*N intersect [0, d+2]; the measure is (Phi,T,eta)-uniform when every
// level-kT cell satisfies l(Q)^{phi(k)+eta} <= mu(Q) <= l(Q)^{phi(k)} or
// carries no mass.

#include <cstdint>
#include <string>
#include <vector>

#include "frostlab/geometry.hpp"

namespace frostlab {

struct MeasureCell {
    std::string path;  // digit path, one char per depth level
    double mass = 0.0;
};

class DyadicMeasure {
  public:
    // cells must have paths of length blocks*block_size over the digit
    // alphabet of the dimension; zero-mass cells are dropped, duplicates are
    // an error, total mass must lie in (0, 1].
    DyadicMeasure(int dim, int block_size, int blocks, std::vector<MeasureCell> cells);

    int dim() const { return dim_; }
    int block_size() const { return T_; }
    int blocks() const { return m_; }
    int depth() const { return m_ * T_; }
    double total_mass() const { return total_; }
    const std::vector<MeasureCell>& cells() const { return cells_; }  // sorted by path

    // Masses aggregated at the given depth (<= depth()), sorted by path.
    std::vector<MeasureCell> masses_at(int depth) const;

    // Restriction to the cells whose level-`depth` prefix is in `keep`
    // (keep must be sorted). Returns the surviving finest cells.
    std::vector<MeasureCell> restrict_to(int depth,
                                         const std::vector<std::string>& keep) const;

  private:
    int dim_, T_, m_;
    double total_ = 0.0;
    std::vector<MeasureCell> cells_;
};

void save_measure(const std::string& path, const DyadicMeasure& mu);
DyadicMeasure load_measure(const std::string& path);

// Decimal cell indices <-> digit paths (used by the measure file format).
std::string indices_to_path(int dim, int depth, const std::string& ix_dec,
                            const std::string& iy_dec);
void path_to_indices(int dim, const std::string& path, std::string& ix_dec,
                     std::string& iy_dec);

struct UniformityProfile {
    int dim = 2;
    int block_size = 1;  // T
    int blocks = 1;      // m
    double eta = 0.0;
    int k_lo = 0;                // ceil(eta m)
    std::vector<double> phis;    // phi(k) for k = k_lo .. m

    double phi(int k) const { return phis.at(static_cast<std::size_t>(k - k_lo)); }
    int k_hi() const { return k_lo + static_cast<int>(phis.size()) - 1; }
    void validate() const;  // phi(k) in eta*N intersect [0, dim+2]
};

void save_profile(const std::string& path, const UniformityProfile& prof);
UniformityProfile load_profile(const std::string& path);

// Smallest admissible block size for the uniformization step.
int min_block_size(int dim, double eta);  // ceil(log2(10 d / eta) / eta)

struct UniformityCheck {
    bool ok = true;
    int violation_k = -1;
    std::string violation_path;
    double violation_mass = 0.0;
};

// Exponent comparisons carry a 1e-9 tolerance; levels are checked fine to
// coarse and cells in path order, so the first reported violation is stable.
UniformityCheck check_uniform(const DyadicMeasure& mu, const UniformityProfile& prof);

struct UniformizeResult {
    DyadicMeasure measure;      // the uniform restriction mu'
    UniformityProfile profile;  // the exponents phi(k) realized by mu'
    struct LevelLog {
        int k = 0;
        double light_discarded = 0.0;  // always <= 2^{-2kT}
        double class_discarded = 0.0;
        double retained = 0.0;
        double phi = 0.0;
    };
    std::vector<LevelLog> levels;  // k = m down to ceil(eta m)
};

// Restrict mu level by level (finest block first): drop cells lighter than
// l(Q)^{d+2}, split the rest into exponent classes of width eta, and keep the
// class of maximal mass (ties toward the smaller exponent). The result
// passes check_uniform and keeps mass at least delta^{2 eta}.
UniformizeResult uniformize(const DyadicMeasure& mu, double eta);

struct StableScaleResult {
    Scale Delta;        // the stable scale 2^{-kT}
    double Sigma = 0.0; // phi at the stable scale
    int k_index = 0;    // block index of Delta
    int steps = 0;      // descent steps taken
};

// Walk down the profile from the finest scale: accept the current scale
// Delta_j unless some coarser ladder scale rho in [Delta_j, Delta_j^eps] has
// phi(rho) < phi(Delta_j) - eps, in which case descend to the nearest such
// scale. Terminates after at most (dim+2)/eps steps.
StableScaleResult stable_scale_search(const UniformityProfile& prof, double eps);

}  // namespace frostlab
