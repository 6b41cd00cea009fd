#ifndef MORANDIM_GEOMETRY_HPP
#define MORANDIM_GEOMETRY_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "morandim/symbolic.hpp"

namespace morandim::geometry {

/// Placement rule for the children of a construction interval.
///
/// UniformGaps lays children left-to-right with equal gaps filling the
/// slack 1 - sum(ratios); a single child is left-aligned. Explicit offsets
/// give each child's left edge as a fraction of the parent interval.
/// Explicit offsets must keep each child inside its parent
/// (offset >= 0 and offset + ratio <= 1) so nesting holds by construction,
/// but siblings may overlap; separation is a checked condition, not an
/// input invariant.
enum class LayoutKind { UniformGaps, ExplicitOffsets };

/// Nested closed intervals in [0,1] realizing a construction family
/// indexed by words: the root is [0,1] and the child i of a level-(j-1)
/// interval is scaled by the level-j ratio c_{j,i} and placed by the layout.
/// Ratio and offset tables are eventually periodic, like the alphabets.
///
/// Immutable after construction; all operations are pure.
class MoranGeometrySpec {
public:
    /// Uniform-gaps layout.
    MoranGeometrySpec(symbolic::SymbolSpaceSpec space,
                      std::vector<std::vector<double>> ratio_preperiod,
                      std::vector<std::vector<double>> ratio_period);

    /// Explicit offsets, as fractions of the parent interval.
    MoranGeometrySpec(symbolic::SymbolSpaceSpec space,
                      std::vector<std::vector<double>> ratio_preperiod,
                      std::vector<std::vector<double>> ratio_period,
                      std::vector<std::vector<double>> offset_preperiod,
                      std::vector<std::vector<double>> offset_period);

    const symbolic::SymbolSpaceSpec& space() const { return space_; }
    LayoutKind layout() const { return layout_; }

    const std::vector<double>& ratios(int level) const { return ratios_.at(level); }
    const EventuallyPeriodic<std::vector<double>>& ratio_table() const { return ratios_; }

    /// Child left edge as a fraction of the parent interval.
    double offset(int level, int child) const;

    // Level aggregates straight from the ratio table. Products over
    // independent per-level choices factorize, so none of these enumerate
    // words.
    double min_ratio(int level) const;
    double max_ratio(int level) const;
    double mean_log_ratio(int level) const;

    /// log of the minimal level-n diameter (gamma_n).
    double log_min_diam(int n) const;
    /// log of the maximal level-n diameter.
    double log_max_diam(int n) const;
    /// log of the geometric mean of level-n diameters over all words.
    double log_geomean_diam(int n) const;

private:
    void check_tables();

    symbolic::SymbolSpaceSpec space_;
    EventuallyPeriodic<std::vector<double>> ratios_;
    LayoutKind layout_;
    std::optional<EventuallyPeriodic<std::vector<double>>> offsets_;
};

/// Closed interval realizing one construction set, together with the word
/// that indexes it.
struct IntervalSet {
    double left = 0.0;
    double right = 1.0;
    symbolic::Word word;

    double diam() const { return right - left; }
    bool contains(double x) const { return left <= x && x <= right; }
};

/// Interval of `word` by recursive placement from the root. Deterministic.
IntervalSet realize(const MoranGeometrySpec& geom, const symbolic::Word& word);

/// Product of the word's ratios, in log space; exact for depths where the
/// plain product would underflow.
double log_diam(const MoranGeometrySpec& geom, const symbolic::Word& word);
double diam(const MoranGeometrySpec& geom, const symbolic::Word& word);

struct Projection {
    double point = 0.0;
    double error_bound = 0.0; // |point - limit| <= error_bound for any extension
};

/// Midpoint of the interval of `path`, with the guarantee that the limit
/// point of every infinite extension of `path` lies within diam/2 of it.
/// The caller must supply a prefix deep enough that diam(path) <= tolerance;
/// otherwise a DepthError names the achieved diameter.
Projection project(const MoranGeometrySpec& geom, const symbolic::Word& path, double tolerance);

enum class CheckStatus { HoldsAtDepth, Fails, NotCheckable, Trend };

std::string to_string(CheckStatus status);

/// Finite-evidence trend toward 1 of a ratio sequence. Never a claimed
/// limit: the verdict is a heuristic over the checked range and the full
/// sequence is exposed. The sequence is flagged as violating when its tail
/// sits far from 1 (gap > 0.2) while having moved less than half of the
/// remaining distance over the tail window.
struct TrendSummary {
    std::vector<double> ratios;
    double tail_gap = 0.0;      // |last ratio - 1|
    double tail_movement = 0.0; // |last ratio - ratio one window earlier|
    bool violation = false;
};

TrendSummary assess_trend_to_one(const std::vector<double>& ratios, int tail_window);

/// One structural condition's checked outcome. A Fails status always
/// carries witness word(s) plus the two sides of the violated inequality
/// in `detail`.
struct ConditionEntry {
    std::string condition;
    CheckStatus status = CheckStatus::NotCheckable;
    int checked_depth = 0;
    std::vector<symbolic::Word> witnesses;
    std::string detail;
    std::map<std::string, double> constants;
    TrendSummary trend; // populated for Trend entries
};

struct ValidationReport {
    int depth = 0;
    bool truncated = false;
    std::vector<ConditionEntry> entries;

    const ConditionEntry& entry(const std::string& condition) const;
    bool exact_failure() const;
};

/// Checks the structural conditions of the construction to `depth`.
/// Nesting and sibling separation are checked exactly by interval
/// arithmetic over all words to `depth` (budget-guarded; a blown budget
/// yields a report flagged truncated, never silence). Inner-ball and
/// ratio-bound constants are reported exactly where intervals make them
/// exact; limit-type conditions are reported as finite-trend diagnostics.
ValidationReport validate(const MoranGeometrySpec& geom, int depth,
                          std::uint64_t budget = 2'000'000);

/// Number of stopping-scale construction intervals meeting the closed ball
/// [x-r, x+r]: words whose diameter first drops to <= r, found by
/// branch-and-bound descent (subtrees whose interval misses the ball are
/// pruned). Touching endpoints count as intersecting. Throws DepthError if
/// a stopping word would exceed max_depth.
int clustering_count(const MoranGeometrySpec& geom, double x, double r, int max_depth);

struct ClusteringReport {
    std::vector<double> points;
    std::vector<double> r_grid;
    std::vector<std::vector<int>> counts; // counts[point][r]
    std::vector<int> max_per_r;
    int sup_estimate = 0;
};

/// Samples points through the measure, projects them, and tabulates
/// clustering counts over the geometric grid r_k = minimal level-k
/// diameter. Deterministic per-point seeds derive from (seed, index).
ClusteringReport clustering_diagnostic(const MoranGeometrySpec& geom,
                                       const symbolic::ProductMeasureSpec& measure,
                                       int n_points, int r_levels,
                                       std::uint64_t seed, int depth);

} // namespace morandim::geometry

#endif
