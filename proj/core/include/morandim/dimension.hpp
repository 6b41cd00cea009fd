#ifndef MORANDIM_DIMENSION_HPP
#define MORANDIM_DIMENSION_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "morandim/filtration.hpp"
#include "morandim/geometry.hpp"
#include "morandim/symbolic.hpp"

namespace morandim::dimension {

enum class Route { Moran, Filtration, Paircount };

std::string to_string(Route route);

/// A dimension value together with the full finite sequence it was
/// truncated from. Limits inferior are not computable from finite data,
/// so `value` is fixed to the minimum of the last `tail_window` sequence
/// entries and the whole sequence plus tail diagnostics stay attached for
/// audit.
struct DimensionEstimate {
    double value = 0.0;
    std::vector<double> sequence;  // a_n
    std::vector<double> numer_log; // log of the squared-mass sum at n
    std::vector<double> denom_log; // log of the scale at n
    int tail_window = 5;
    Route route = Route::Moran;
    struct Diagnostics {
        double tail_variance = 0.0;
        double window_min = 0.0;
        double window_max = 0.0;
    } diagnostics;
    std::vector<std::string> warnings;
};

/// Scaling exponent of the level-n squared cylinder masses against beta_n,
/// the geometric mean of level-n diameters. For level-homogeneous ratio
/// tables beta_n is the common diameter and the Bernoulli sequence is
/// constant. A level-comparability trend violation (diameter spread not
/// tracking a single scale per level) attaches a warning instead of
/// blocking the estimate.
DimensionEstimate cordim_moran(const symbolic::ProductMeasureSpec& measure,
                               const geometry::MoranGeometrySpec& geom, int n_max,
                               int tail_window);

/// Scaling exponent of the squared stopping-set masses against delta_n.
/// Mass sums are accumulated in log-sum-exp form.
DimensionEstimate cordim_filtration(const symbolic::ProductMeasureSpec& measure,
                                    const filtration::GeneralFiltration& filt,
                                    int tail_window);

/// Empirical correlation-integral curve from sampled points: for each r on
/// the grid of minimal level diameters, the fraction of ordered sample
/// pairs at distance <= r. Pair counting sorts once and sweeps, so the cost
/// is O(N log N + grid). The slope is fit by least squares over the widest
/// interior sub-range whose local slopes vary by less than 10%, which
/// bounds the bias of the log-periodic oscillation these measures exhibit.
struct CorrelationIntegralCurve {
    std::vector<double> r;               // descending grid
    std::vector<double> estimate;        // pair fraction per r
    std::vector<std::uint64_t> pair_counts; // ordered pair counts per r
    std::vector<int> dropped;            // grid indices dropped from the fit
    std::vector<double> local_slopes;    // between consecutive kept grid points
    int fit_first = 0;                   // kept-point index range of the fit
    int fit_last = 0;
    double slope = 0.0;
    double slope_stderr = 0.0;
    std::uint64_t n_samples = 0;
    std::vector<std::string> warnings;
};

CorrelationIntegralCurve cordim_paircount(const symbolic::ProductMeasureSpec& measure,
                                          const geometry::MoranGeometrySpec& geom,
                                          std::uint64_t n_samples, int path_depth,
                                          int r_levels, std::uint64_t seed);

/// Per-level ratios of log cylinder mass to log interval diameter along one
/// path, with tail-window min/max as the lower/upper proxies. The
/// scale-regularity trend verdict of the geometry is attached so consumers
/// know whether the upper proxy estimates an equality or only a lower
/// bound.
struct LocalDimensionSample {
    symbolic::Word path;
    std::vector<double> sequence; // b_n
    double lower = 0.0;
    double upper = 0.0;
    int tail_window = 5;
    bool scale_regular = true;    // no trend violation observed
    double scale_trend_gap = 0.0;
};

LocalDimensionSample local_dim_sequence(const symbolic::ProductMeasureSpec& measure,
                                        const geometry::MoranGeometrySpec& geom,
                                        const symbolic::Word& path, int tail_window);

/// Essential-infimum proxy: minimum over sampled paths of the per-path
/// lower local dimension proxy, with the empirical distribution attached.
struct LowerHausdorffEstimate {
    double value = 0.0;
    std::vector<double> per_path_lower;
    std::vector<double> per_path_upper;
    int argmin_path = 0;
};

LowerHausdorffEstimate lower_hausdorff_estimate(const symbolic::ProductMeasureSpec& measure,
                                                const geometry::MoranGeometrySpec& geom,
                                                int n_paths, int depth, int tail_window,
                                                std::uint64_t seed);

/// Truncated point potential: average of distance^(-s) over samples from
/// the measure, excluding (and separately accounting) samples within
/// epsilon of x. Sampling is stratified on the level at which a sample
/// first leaves x's cylinder chain, with distances computed in
/// parent-relative coordinates, so deep strata neither distort the mean
/// nor lose precision. At s = 0 the untruncated value is the total mass.
struct PotentialEstimate {
    double s = 0.0;
    double x = 0.0;
    double epsilon = 0.0;
    double value = 0.0;
    double std_error = 0.0;
    double excluded_mass = 0.0; // measure of the sampled-excluded plus sub-scale region
    std::uint64_t n_samples = 0;
};

PotentialEstimate potential_estimate(const symbolic::ProductMeasureSpec& measure,
                                     const geometry::MoranGeometrySpec& geom, double s,
                                     double x, std::uint64_t n_samples, double epsilon,
                                     std::uint64_t seed);

/// Truncated pair energy along a decreasing epsilon ladder, with a
/// divergence-trend verdict. Values are non-decreasing down the ladder by
/// construction (the same samples are reused across rungs).
///
/// The divergence flag compares the total growth across the ladder against
/// the growth a critically (logarithmically) divergent energy would show
/// on the same rungs, log eps_last / log eps_first, floored at 1.5; the
/// trend must also keep growing through the tail half of the ladder.
/// Growth strictly beyond the critical log-law is the signature of a
/// power-law divergent energy, i.e. of s above the correlation dimension.
struct EnergyEstimate {
    double s = 0.0;
    std::vector<double> epsilon;
    std::vector<double> value;
    std::vector<double> std_error;
    std::vector<double> excluded_mass;
    std::uint64_t n_samples = 0;
    double observed_growth = 0.0;
    double critical_growth = 0.0;
    bool divergence_flag = false;
};

/// Pair sampler stratified on the first level where the two coordinates
/// disagree. Stratum probabilities are exact for product measures; pair
/// distances are kept as logs of parent-relative separations. One sampler
/// instance is reused across exponents so bisection decisions share their
/// sample noise.
class EnergySampler {
public:
    EnergySampler(const symbolic::ProductMeasureSpec& measure,
                  const geometry::MoranGeometrySpec& geom, std::uint64_t n_samples,
                  double min_epsilon, std::uint64_t seed);
    ~EnergySampler();
    EnergySampler(EnergySampler&&) noexcept;
    EnergySampler& operator=(EnergySampler&&) noexcept;

    EnergyEstimate evaluate(double s, const std::vector<double>& epsilon_ladder) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

EnergyEstimate energy_estimate(const symbolic::ProductMeasureSpec& measure,
                               const geometry::MoranGeometrySpec& geom, double s,
                               std::uint64_t n_samples,
                               const std::vector<double>& epsilon_ladder, std::uint64_t seed);

/// Brackets the divergence threshold of the truncated energy by bisection
/// on the divergence flag. The endpoints must disagree (no divergence at
/// s_lo, divergence at s_hi).
struct EnergyBracket {
    double lo = 0.0;
    double hi = 0.0;
    struct Eval {
        double s;
        bool flag;
        double observed_growth;
        double critical_growth;
    };
    std::vector<Eval> evals;
};

EnergyBracket cordim_energy(const symbolic::ProductMeasureSpec& measure,
                            const geometry::MoranGeometrySpec& geom, double s_lo, double s_hi,
                            double tol, std::uint64_t n_samples,
                            const std::vector<double>& epsilon_ladder, std::uint64_t seed);

struct ConsistencyBudgets {
    int n_max = 30;
    std::uint64_t samples = 100000;
    int path_depth = 40;
    int r_levels = 12;
    int tail_window = 5;
    std::uint64_t seed = 0;
    int paths = 100;
    int local_depth = 10000;
    double route_tol = 0.02;     // exact-route pairwise agreement
    double paircount_tol = 0.05; // sampled route against exact routes
    double order_tol = 0.02;     // correlation vs lower Hausdorff ordering
};

/// Runs every correlation-dimension route plus the lower-Hausdorff
/// estimate, then checks pairwise route agreement and the ordering
/// "correlation dimension <= lower Hausdorff dimension". Failures are
/// reported structurally, naming the two quantities and their values.
struct ConsistencyReport {
    DimensionEstimate moran;
    DimensionEstimate filtration;
    CorrelationIntegralCurve paircount;
    LowerHausdorffEstimate ldimh;
    bool pass = true;
    std::vector<std::string> failures;
};

ConsistencyReport consistency_check(const symbolic::ProductMeasureSpec& measure,
                                    const geometry::MoranGeometrySpec& geom,
                                    const ConsistencyBudgets& budgets);

} // namespace morandim::dimension

#endif
