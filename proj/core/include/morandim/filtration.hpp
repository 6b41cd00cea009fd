#ifndef MORANDIM_FILTRATION_HPP
#define MORANDIM_FILTRATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "morandim/geometry.hpp"
#include "morandim/symbolic.hpp"

namespace morandim::filtration {

/// Stopping-time decomposition of a construction: level n collects the
/// words whose interval diameter first drops to the minimal level-n
/// diameter gamma_n. Each level is an antichain covering every infinite
/// path exactly once; when the geometry keeps siblings disjoint, the
/// realized intervals within a level are pairwise disjoint.
///
/// delta_n is fixed to C0 * min{diam over level n} with C0 = 1/2, which
/// realizes a ball of radius delta_n inside every member interval and makes
/// delta_n <= gamma_n hold by construction. All scales are kept in log
/// space.
struct GeneralFiltration {
    std::vector<std::vector<symbolic::Word>> levels;
    std::vector<double> log_gamma;
    std::vector<double> log_delta;
    bool truncated = false;

    int n_levels() const { return static_cast<int>(levels.size()); }
};

/// Builds the filtration to n_max levels. gamma_n comes from the ratio
/// table by per-level min products (no word enumeration); each stopping
/// antichain is collected by branch-and-bound descent. A level whose
/// antichain would exceed `budget` words stops the build and flags the
/// result truncated.
GeneralFiltration build_moran_filtration(const geometry::MoranGeometrySpec& geom, int n_max,
                                         std::uint64_t budget = 2'000'000);

struct FiltrationReport {
    std::vector<geometry::ConditionEntry> entries; // F1..F4
    std::string verdict;                           // consistent-with-F | violation-trend

    const geometry::ConditionEntry& entry(const std::string& condition) const;
    bool exact_failure() const;
};

/// F1 (delta <= gamma) checked exactly per level; F2 as strict decrease of
/// gamma plus a smallness threshold on the last level; F3 and F4 as
/// finite-trend diagnostics on log delta_n / log delta_{n+1} and
/// log gamma_n / log delta_n with the full sequences exposed.
FiltrationReport validate_filtration(const GeneralFiltration& filt,
                                     double gamma_smallness_threshold = 1e-2);

} // namespace morandim::filtration

#endif
