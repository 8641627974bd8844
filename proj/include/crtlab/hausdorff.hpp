#ifndef CRTLAB_HAUSDORFF_HPP
#define CRTLAB_HAUSDORFF_HPP

#include "crtlab/gauge.hpp"
#include "crtlab/tree.hpp"

#include <optional>
#include <vector>

namespace crtlab {

struct Crossing {
    double time;
    long long level;  // value at the crossing is level * 2^-n
};

/// Largest n allowed on this path: 2^-n >= 16 max |e(i+1) - e(i)|.
int crossing_resolution_cap(const TreeIndex& idx);

/// T_0 = 0 and successive times where e has moved by exactly 2^-n since the previous crossing.
std::vector<Crossing> crossing_times(const TreeIndex& idx, int n);

struct CoverElement {
    double start;
    double end;
    double diameter;
    /// False when every point coded in [start, end) was already visited before start.
    bool effective;
};

struct Covering {
    int n = 0;
    std::vector<CoverElement> elements;

    std::size_t effective_count() const;
};

struct Band {
    double lo;
    double hi;
};

/// Intervals [T_k, T_{k+1}), optionally restricted to e(T_k) in band.
Covering crossing_covering(const TreeIndex& idx, int n, std::optional<Band> band = std::nullopt);

/// Intervals [T_2k, T_2k+1] of alternating hit-a / move-2^-n stopping times.
Covering level_crossing_covering(const TreeIndex& idx, double a, int n);

/// Sum of g(diameter) over effective elements with positive diameter.
double covering_sum(const Covering& cov, const GaugeFunction& g);

/// Exact diameter of the tree points coded by times in [s, t], with linear interpolation.
double interval_diameter(const TreeIndex& idx, double s, double t);

enum class MeasureKind { Mass, Level };

struct DensityStats {
    std::vector<int> n_values;
    /// ratios[p][k] = mu(B(x_p, 2^-n_k)) / g(2^-n_k)
    std::vector<std::vector<double>> ratios;
    std::vector<double> median, q90, max;
    /// Number of largest n values used for the limsup proxy.
    int proxy_top = 3;
    std::string gauge;
};

struct DensityRequest {
    MeasureKind measure = MeasureKind::Mass;
    /// Grid indices (mass) or atom positions (level).
    std::vector<std::size_t> points;
    const LevelSetAtoms* atoms = nullptr;
    std::vector<int> n_values;
    std::size_t stride = 1;
};

DensityStats density_scan(const TreeIndex& idx, const DensityRequest& req, const GaugeFunction& g);

struct HausdorffBounds {
    std::optional<double> lower;
    std::optional<double> upper;
};

HausdorffBounds hausdorff_bounds(const DensityStats& stats, double total_mass, double doubling, double threshold);

/// sum_n g(2^-n)^-(alpha-1) for the h_u family converges iff u (alpha - 1) > 1.
bool series_converges(double alpha, double u);

struct ConjectureRow {
    std::size_t tree_id;
    double u;
    int n;
    double covering_sum;
    bool series_converges;
};

struct ConjectureEnsemble {
    std::size_t n_trees = 4;
    std::uint64_t n_scale = 64;
    double c_height = 1.0;
    SeedSpec seed;
    unsigned workers = 1;
};

std::vector<ConjectureRow> conjecture_scan(const BranchingMechanism& mech, const std::vector<double>& u_grid,
                                           const std::vector<int>& n_values, const ConjectureEnsemble& ens);

}  // namespace crtlab

#endif
