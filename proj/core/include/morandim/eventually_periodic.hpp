#ifndef MORANDIM_EVENTUALLY_PERIODIC_HPP
#define MORANDIM_EVENTUALLY_PERIODIC_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "morandim/errors.hpp"

namespace morandim {

/// An infinite level-indexed table described by a finite preperiod followed
/// by a cycle repeated forever. Levels are 1-based: level j maps to
/// preperiod[j-1] while j <= preperiod length, then cycles through the
/// period. The period must be nonempty so every level resolves.
template <typename T>
class EventuallyPeriodic {
public:
    EventuallyPeriodic(std::vector<T> preperiod, std::vector<T> period)
        : preperiod_(std::move(preperiod)), period_(std::move(period)) {
        if (period_.empty()) {
            throw ConfigError("eventually-periodic table requires a nonempty period");
        }
    }

    const T& at(int level) const {
        if (level < 1) {
            throw ConfigError("level index must be >= 1");
        }
        const std::size_t idx = static_cast<std::size_t>(level) - 1;
        if (idx < preperiod_.size()) {
            return preperiod_[idx];
        }
        return period_[(idx - preperiod_.size()) % period_.size()];
    }

    const std::vector<T>& preperiod() const { return preperiod_; }
    const std::vector<T>& period() const { return period_; }

    /// Number of leading levels after which the table repeats with the
    /// period length. Exact statements about "all levels" reduce to
    /// statements about levels 1 .. distinct_levels().
    int distinct_levels() const {
        return static_cast<int>(preperiod_.size() + period_.size());
    }

private:
    std::vector<T> preperiod_;
    std::vector<T> period_;
};

} // namespace morandim

#endif
