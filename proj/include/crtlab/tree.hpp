#ifndef CRTLAB_TREE_HPP
#define CRTLAB_TREE_HPP

#include "crtlab/excursion.hpp"
#include "crtlab/random.hpp"

#include <cstddef>
#include <vector>

namespace crtlab {

/**
 * Range-minimum view of an excursion path.
 *
 * Minima inside blocks of kBlock samples are found by a scan; a sparse table
 * over block minima answers the rest, so memory stays near (L/kBlock) log L
 * words even for paths of 10^8 samples.
 */
class TreeIndex {
public:
    static constexpr std::size_t kBlock = 32;

    explicit TreeIndex(ExcursionPath path);

    const ExcursionPath& path() const { return path_; }
    std::size_t size() const { return path_.values.size(); }
    double value(std::size_t i) const { return path_.values[i]; }
    double dt() const { return path_.dt; }
    double duration() const { return path_.duration(); }
    double height() const { return height_; }

    /// min of values[i..j] (inclusive, either order).
    double range_min(std::size_t i, std::size_t j) const;

    /// d_e(s, t) = e(s) + e(t) - 2 m_e(s, t) on grid indices.
    double dist(std::size_t s, std::size_t t) const;

    /// Same on real times in [0, duration], with linear interpolation between grid points.
    double dist_at(double s, double t) const;
    double value_at(double t) const;
    double range_min_at(double s, double t) const;

private:
    ExcursionPath path_;
    double height_ = 0.0;
    std::vector<std::vector<double>> table_;  // table_[k][b] = min of blocks b .. b + 2^k - 1

    double scan(std::size_t i, std::size_t j) const;
};

/**
 * m(B(center, eps)) with trapezoid weights on the grid (total mass = duration).
 * With stride > 1 only indices congruent to center mod stride are tested, each
 * weighted stride * dt.
 */
double mass_ball(const TreeIndex& idx, std::size_t center, double eps, std::size_t stride = 1);

struct LevelAtom {
    std::size_t index;  // last grid index at or below the level before the excursion
    double weight;
};

struct LevelSetAtoms {
    double level = 0.0;
    double eps = 0.0;
    std::vector<LevelAtom> atoms;

    double total_weight() const;
};

/// Vertices at level a with descendants reaching a + eps, weighted 1 / v(eps).
LevelSetAtoms level_set(const TreeIndex& idx, double a, double eps);

/// Weight of atoms t with m_e(center, t) >= a - eps/2. `center` is a position in atoms.atoms.
double local_time_ball(const TreeIndex& idx, const LevelSetAtoms& atoms, std::size_t center, double eps);

/// Excursions of e above a, shifted to start and end at 0, whose height exceeds min_height.
std::vector<ExcursionPath> subtrees_above(const TreeIndex& idx, double a, double min_height);

/// m-distributed grid index.
std::size_t sample_mass_point(const TreeIndex& idx, Rng& rng);

/// Position in atoms.atoms drawn proportionally to weight.
std::size_t sample_level_point(const LevelSetAtoms& atoms, Rng& rng);

}  // namespace crtlab

#endif
