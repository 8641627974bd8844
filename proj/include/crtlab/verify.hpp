#ifndef CRTLAB_VERIFY_HPP
#define CRTLAB_VERIFY_HPP

#include "crtlab/analytic.hpp"
#include "crtlab/random.hpp"

#include <map>
#include <string>
#include <vector>

namespace crtlab {

enum class CheckKind {
    WithinTolerance,  // |statistic - target| <= tolerance
    AtMost,           // statistic <= tolerance
    AtLeast,          // statistic >= tolerance
};

struct Check {
    std::string name;
    double statistic = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    CheckKind kind = CheckKind::WithinTolerance;

    bool pass() const;
};

struct ExperimentReport {
    std::string name;
    /// The first check is the headline; the verdict is the conjunction of all checks.
    std::vector<Check> checks;
    double uncertainty = 0.0;

    std::uint64_t seed = 0;
    std::uint64_t replicates = 0;
    std::string sizes;
    double alpha = 2.0;
    double c = 1.0;
    double runtime_seconds = 0.0;
    std::map<std::string, double> metrics;
    std::string note;

    bool verdict() const;
    const Check& headline() const { return checks.front(); }
};

/// Calibration constant of the canonical law's population scaling (fit by `crtlab calibrate`).
inline constexpr double kPopulationKappa = 1.0;

struct PitmanParams {
    std::size_t n_samples = 100000;
    double dx = 1e-3;
};
ExperimentReport verify_pitman(const PitmanParams& p, const SeedSpec& seed, unsigned workers = 1);

struct DowncrossingParams {
    double a = 1.0;
    double eps = 0.5;
    std::size_t n_samples = 10000;
    double dx = 1e-3;
};
ExperimentReport verify_downcrossing_exponential(const DowncrossingParams& p, const SeedSpec& seed,
                                                 unsigned workers = 1);

/// Local time at a accumulated by Brownian motion from a before it first hits a - eps.
/// Uses the exact bridge law of local time over each grid step.
double downcrossing_local_time(double a, double eps, double dx, Rng& rng);

struct RayKnightParams {
    double alpha = 2.0;
    double x = 1.0;
    double t = 1.0;
    double lambda = 1.0;
    std::uint64_t n_scale = 200;
    std::size_t n_reps = 2000;
    double kappa = kPopulationKappa;
};
ExperimentReport verify_ray_knight(const RayKnightParams& p, const SeedSpec& seed, unsigned workers = 1);

/// Exact E[exp(-lambda X_t)] of the rescaled GW population, by iterating the generating function.
double ray_knight_discrete_laplace(const RayKnightParams& p);

/// Least-squares kappa over a (t, lambda) grid at alpha = 2 against the c = 1/2 formula.
double calibrate_kappa(std::uint64_t n_scale);

struct CrossingParams {
    int n_level = 10;
    std::size_t n_reps = 10000;
    std::uint64_t max_len = 1000000;
};
ExperimentReport verify_crossing_identity(const CrossingParams& p, const SeedSpec& seed, unsigned workers = 1);

struct PointedBallParams {
    BranchingMechanism mech{1.5, 1.0};
    double a = 1.0;
    double eps = 1.0;  // the pair is (eps, eps / 2)
    std::uint64_t n_scale = 60;
    std::size_t n_points = 1000;  // per radius
};
ExperimentReport verify_pointed_ball_law(const PointedBallParams& p, const SeedSpec& seed, unsigned workers = 1);

struct LevelBallParams {
    BranchingMechanism mech{1.5, 1.0};
    double a = 1.0;
    double lambda = 1.0;
    double eps = 1.0;
    std::vector<std::uint64_t> n_scales{100, 400};
    std::size_t n_points = 2000;  // per scale
};
ExperimentReport verify_level_ball_law(const LevelBallParams& p, const SeedSpec& seed, unsigned workers = 1);

struct SmallMassParams {
    BranchingMechanism mech{2.0, 1.0};
    double gamma_max = 1e6;
    std::vector<double> gamma_mc{1.0, 4.0, 16.0};
    std::uint64_t n_scale = 200;
    std::size_t n_trees = 2000;
};
ExperimentReport verify_small_mass_tail(const SmallMassParams& p, const SeedSpec& seed, unsigned workers = 1);

struct CtParams {
    std::size_t n_samples = 1000;
    double eta = 1e-3;  // relative step: dt = eta * max(R, floor)^2
    int n_lo = 4;
    int n_hi = 12;
};
ExperimentReport verify_ct_occupation(const CtParams& p, const SeedSpec& seed, unsigned workers = 1);

struct CrtDensityParams {
    std::uint64_t n_steps = std::uint64_t{1} << 24;
    std::size_t n_paths = 5;
    std::size_t n_points = 200;
    int n_lo = 6;
    int n_hi = 10;
};
ExperimentReport verify_crt_density(const CrtDensityParams& p, const SeedSpec& seed, unsigned workers = 1);

struct StableDensityParams {
    BranchingMechanism mech{1.5, 1.0};
    double u = -4.0;
    double c_height = 1.0 / 64.0;
    std::uint64_t n_scale = 8192;
    std::size_t n_trees = 5;
    std::size_t n_points = 200;
    int n_lo = 8;
    int n_hi = 10;
};
ExperimentReport verify_stable_density(const StableDensityParams& p, const SeedSpec& seed, unsigned workers = 1);

/// Sizes for every experiment of the suite.
struct SuiteParams {
    PitmanParams pitman;
    DowncrossingParams downcrossing;
    RayKnightParams ray_knight;
    CrossingParams crossing;
    PointedBallParams pointed_ball;
    LevelBallParams level_ball;
    SmallMassParams small_mass;
    CtParams ct;
    CrtDensityParams crt_density;
    StableDensityParams stable_density;
};

const std::vector<std::string>& experiment_names();

/// Runs the named experiments (all when `only` is empty) with seeds derived from master_seed.
/// Throws std::invalid_argument on an unknown name.
std::vector<ExperimentReport> run_suite(const SuiteParams& params, std::uint64_t master_seed,
                                        const std::vector<std::string>& only, unsigned workers = 1);

/// One flat JSON object per report; runtime is left out so the lines are reproducible.
std::string report_json_line(const ExperimentReport& r);

/// Summary object with verdict counts and per-experiment runtimes.
std::string suite_summary_json(const std::vector<ExperimentReport>& reports);

}  // namespace crtlab

#endif
