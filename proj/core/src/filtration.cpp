#include "morandim/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace morandim::filtration {

namespace {

struct StackItem {
    symbolic::Word word;
    double log_len;
};

// Words with log diam <= threshold < log diam of parent, by descent.
// Equality decisions reuse the same log sums as the per-level gamma
// computation, so ties resolve consistently with log_min_diam.
std::vector<symbolic::Word> stopping_antichain(const geometry::MoranGeometrySpec& geom,
                                               double log_threshold, std::uint64_t budget,
                                               bool& blown) {
    std::vector<symbolic::Word> out;
    std::vector<StackItem> stack;
    stack.push_back(StackItem{symbolic::Word{}, 0.0});
    while (!stack.empty()) {
        StackItem item = std::move(stack.back());
        stack.pop_back();
        if (!item.word.empty() && item.log_len <= log_threshold) {
            if (out.size() == budget) {
                blown = true;
                return out;
            }
            out.push_back(std::move(item.word));
            continue;
        }
        const int level = item.word.length() + 1;
        const auto& c = geom.ratios(level);
        for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) {
            stack.push_back(StackItem{item.word.child(i),
                                      item.log_len + std::log(c[static_cast<std::size_t>(i)])});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const symbolic::Word& a, const symbolic::Word& b) { return a.symbols < b.symbols; });
    return out;
}

} // namespace

GeneralFiltration build_moran_filtration(const geometry::MoranGeometrySpec& geom, int n_max,
                                         std::uint64_t budget) {
    if (n_max < 1) throw ConfigError("filtration needs n_max >= 1");
    GeneralFiltration filt;
    filt.levels.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) {
        const double log_gamma = geom.log_min_diam(n);
        bool blown = false;
        std::vector<symbolic::Word> level = stopping_antichain(geom, log_gamma, budget, blown);
        if (blown) {
            filt.truncated = true;
            break;
        }
        double min_log_diam = 0.0;
        for (const auto& w : level) {
            min_log_diam = std::min(min_log_diam, geometry::log_diam(geom, w));
        }
        filt.levels.push_back(std::move(level));
        filt.log_gamma.push_back(log_gamma);
        filt.log_delta.push_back(std::log(0.5) + min_log_diam);
    }
    return filt;
}

const geometry::ConditionEntry& FiltrationReport::entry(const std::string& condition) const {
    for (const auto& e : entries) {
        if (e.condition == condition) return e;
    }
    throw Error("no report entry for condition " + condition);
}

bool FiltrationReport::exact_failure() const {
    return std::any_of(entries.begin(), entries.end(), [](const geometry::ConditionEntry& e) {
        return e.status == geometry::CheckStatus::Fails;
    });
}

FiltrationReport validate_filtration(const GeneralFiltration& filt,
                                     double gamma_smallness_threshold) {
    using geometry::CheckStatus;
    using geometry::ConditionEntry;
    const int n = filt.n_levels();
    if (n < 3) throw ConfigError("filtration validation needs at least 3 levels");

    FiltrationReport report;

    ConditionEntry f1;
    f1.condition = "F1";
    f1.status = CheckStatus::HoldsAtDepth;
    f1.checked_depth = n;
    for (int k = 0; k < n; ++k) {
        if (filt.log_delta[static_cast<std::size_t>(k)] >
            filt.log_gamma[static_cast<std::size_t>(k)]) {
            f1.status = CheckStatus::Fails;
            std::ostringstream msg;
            msg << "delta exceeds gamma at level " << k + 1 << ": log delta "
                << filt.log_delta[static_cast<std::size_t>(k)] << " > log gamma "
                << filt.log_gamma[static_cast<std::size_t>(k)];
            f1.detail = msg.str();
            break;
        }
    }

    ConditionEntry f2;
    f2.condition = "F2";
    f2.status = CheckStatus::HoldsAtDepth;
    f2.checked_depth = n;
    {
        bool decreasing = true;
        for (int k = 1; k < n; ++k) {
            if (!(filt.log_gamma[static_cast<std::size_t>(k)] <
                  filt.log_gamma[static_cast<std::size_t>(k) - 1])) {
                decreasing = false;
                break;
            }
        }
        const double gamma_last = std::exp(filt.log_gamma.back());
        f2.constants["gamma_last"] = gamma_last;
        f2.constants["threshold"] = gamma_smallness_threshold;
        if (!decreasing) {
            f2.status = CheckStatus::Fails;
            f2.detail = "gamma is not strictly decreasing";
        } else if (gamma_last > gamma_smallness_threshold) {
            f2.status = CheckStatus::Fails;
            std::ostringstream msg;
            msg << "gamma at the last built level is " << gamma_last
                << ", above the smallness threshold " << gamma_smallness_threshold;
            f2.detail = msg.str();
        } else {
            f2.detail = "strictly decreasing and below threshold at the last level";
        }
    }

    ConditionEntry f3;
    f3.condition = "F3";
    f3.status = CheckStatus::Trend;
    f3.checked_depth = n;
    {
        std::vector<double> ratios;
        ratios.reserve(static_cast<std::size_t>(n) - 1);
        for (int k = 0; k + 1 < n; ++k) {
            ratios.push_back(filt.log_delta[static_cast<std::size_t>(k)] /
                             filt.log_delta[static_cast<std::size_t>(k) + 1]);
        }
        f3.trend = geometry::assess_trend_to_one(ratios, 5);
        f3.detail = "log delta_n / log delta_{n+1}";
    }

    ConditionEntry f4;
    f4.condition = "F4";
    f4.status = CheckStatus::Trend;
    f4.checked_depth = n;
    {
        std::vector<double> ratios;
        ratios.reserve(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            ratios.push_back(filt.log_gamma[static_cast<std::size_t>(k)] /
                             filt.log_delta[static_cast<std::size_t>(k)]);
        }
        f4.trend = geometry::assess_trend_to_one(ratios, 5);
        f4.detail = "log gamma_n / log delta_n";
    }

    report.entries = {f1, f2, f3, f4};
    std::string offending;
    for (const auto& e : report.entries) {
        if (e.status == CheckStatus::Fails ||
            (e.status == CheckStatus::Trend && e.trend.violation)) {
            offending = e.condition;
            break;
        }
    }
    report.verdict = offending.empty() ? "consistent-with-F" : "violation-trend:" + offending;
    return report;
}

} // namespace morandim::filtration
