#include "morandim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "morandim/rng.hpp"

namespace morandim::geometry {

MoranGeometrySpec::MoranGeometrySpec(symbolic::SymbolSpaceSpec space,
                                     std::vector<std::vector<double>> ratio_preperiod,
                                     std::vector<std::vector<double>> ratio_period)
    : space_(std::move(space)),
      ratios_(std::move(ratio_preperiod), std::move(ratio_period)),
      layout_(LayoutKind::UniformGaps) {
    check_tables();
}

MoranGeometrySpec::MoranGeometrySpec(symbolic::SymbolSpaceSpec space,
                                     std::vector<std::vector<double>> ratio_preperiod,
                                     std::vector<std::vector<double>> ratio_period,
                                     std::vector<std::vector<double>> offset_preperiod,
                                     std::vector<std::vector<double>> offset_period)
    : space_(std::move(space)),
      ratios_(std::move(ratio_preperiod), std::move(ratio_period)),
      layout_(LayoutKind::ExplicitOffsets),
      offsets_(EventuallyPeriodic<std::vector<double>>(std::move(offset_preperiod),
                                                       std::move(offset_period))) {
    check_tables();
}

void MoranGeometrySpec::check_tables() {
    const int levels = std::max({ratios_.distinct_levels(), space_.sizes().distinct_levels(),
                                 offsets_ ? offsets_->distinct_levels() : 0});
    // Walk one joint cycle beyond the longest preperiod so mismatched period
    // lengths cannot hide a bad level.
    std::size_t pre = std::max(ratios_.preperiod().size(), space_.sizes().preperiod().size());
    std::size_t cycle = ratios_.period().size() * space_.sizes().period().size();
    if (offsets_) {
        pre = std::max(pre, offsets_->preperiod().size());
        cycle *= offsets_->period().size();
    }
    const int walk = std::max(levels, static_cast<int>(pre + cycle));
    for (int j = 1; j <= walk; ++j) {
        const auto& c = ratios_.at(j);
        const int n = space_.alphabet_size(j);
        if (static_cast<int>(c.size()) != n) {
            std::ostringstream msg;
            msg << "ratio vector at level " << j << " has " << c.size()
                << " entries, alphabet has " << n;
            throw ConfigError(msg.str());
        }
        double sum = 0.0;
        for (double v : c) {
            if (!(v > 0.0 && v < 1.0)) {
                std::ostringstream msg;
                msg << "ratios must lie in (0,1) (level " << j << ")";
                throw ConfigError(msg.str());
            }
            sum += v;
        }
        if (layout_ == LayoutKind::UniformGaps) {
            if (sum > 1.0 + 1e-12) {
                std::ostringstream msg;
                msg << "uniform-gaps layout needs ratio sum <= 1 at level " << j
                    << " (got " << sum << ")";
                throw ConfigError(msg.str());
            }
        } else {
            const auto& off = offsets_->at(j);
            if (off.size() != c.size()) {
                std::ostringstream msg;
                msg << "offset vector at level " << j << " has " << off.size()
                    << " entries, expected " << c.size();
                throw ConfigError(msg.str());
            }
            for (std::size_t i = 0; i < off.size(); ++i) {
                if (!(off[i] >= 0.0) || off[i] + c[i] > 1.0 + 1e-12) {
                    std::ostringstream msg;
                    msg << "child " << i << " at level " << j
                        << " leaves its parent (offset " << off[i] << ", ratio " << c[i] << ")";
                    throw ConfigError(msg.str());
                }
            }
        }
    }
}

double MoranGeometrySpec::offset(int level, int child) const {
    const auto& c = ratios_.at(level);
    if (layout_ == LayoutKind::ExplicitOffsets) {
        return offsets_->at(level).at(static_cast<std::size_t>(child));
    }
    const int n = static_cast<int>(c.size());
    if (n == 1) return 0.0; // single child is left-aligned
    double sum = 0.0;
    for (double v : c) sum += v;
    const double gap = (1.0 - sum) / static_cast<double>(n - 1);
    double off = 0.0;
    for (int i = 0; i < child; ++i) off += c[static_cast<std::size_t>(i)] + gap;
    return off;
}

double MoranGeometrySpec::min_ratio(int level) const {
    const auto& c = ratios_.at(level);
    return *std::min_element(c.begin(), c.end());
}

double MoranGeometrySpec::max_ratio(int level) const {
    const auto& c = ratios_.at(level);
    return *std::max_element(c.begin(), c.end());
}

double MoranGeometrySpec::mean_log_ratio(int level) const {
    const auto& c = ratios_.at(level);
    double sum = 0.0;
    for (double v : c) sum += std::log(v);
    return sum / static_cast<double>(c.size());
}

double MoranGeometrySpec::log_min_diam(int n) const {
    double sum = 0.0;
    for (int j = 1; j <= n; ++j) sum += std::log(min_ratio(j));
    return sum;
}

double MoranGeometrySpec::log_max_diam(int n) const {
    double sum = 0.0;
    for (int j = 1; j <= n; ++j) sum += std::log(max_ratio(j));
    return sum;
}

double MoranGeometrySpec::log_geomean_diam(int n) const {
    double sum = 0.0;
    for (int j = 1; j <= n; ++j) sum += mean_log_ratio(j);
    return sum;
}

IntervalSet realize(const MoranGeometrySpec& geom, const symbolic::Word& word) {
    symbolic::validate_word(geom.space(), word);
    double left = 0.0;
    double len = 1.0;
    for (int j = 1; j <= word.length(); ++j) {
        const int sym = word.symbols[static_cast<std::size_t>(j) - 1];
        left += geom.offset(j, sym) * len;
        len *= geom.ratios(j)[static_cast<std::size_t>(sym)];
    }
    return IntervalSet{left, left + len, word};
}

double log_diam(const MoranGeometrySpec& geom, const symbolic::Word& word) {
    symbolic::validate_word(geom.space(), word);
    double sum = 0.0;
    for (int j = 1; j <= word.length(); ++j) {
        sum += std::log(geom.ratios(j)[static_cast<std::size_t>(word.symbols[static_cast<std::size_t>(j) - 1])]);
    }
    return sum;
}

double diam(const MoranGeometrySpec& geom, const symbolic::Word& word) {
    return std::exp(log_diam(geom, word));
}

Projection project(const MoranGeometrySpec& geom, const symbolic::Word& path, double tolerance) {
    if (!(tolerance > 0.0)) throw ConfigError("projection tolerance must be > 0");
    const double ld = log_diam(geom, path);
    if (ld > std::log(tolerance)) {
        std::ostringstream msg;
        msg << "prefix of length " << path.length() << " achieves diameter "
            << std::exp(ld) << " (log " << ld << "), larger than tolerance " << tolerance;
        throw DepthError(msg.str());
    }
    const IntervalSet iv = realize(geom, path);
    return Projection{0.5 * (iv.left + iv.right), 0.5 * iv.diam()};
}

std::string to_string(CheckStatus status) {
    switch (status) {
        case CheckStatus::HoldsAtDepth: return "holds-at-depth";
        case CheckStatus::Fails: return "fails";
        case CheckStatus::NotCheckable: return "not-checkable";
        case CheckStatus::Trend: return "trend";
    }
    return "unknown";
}

TrendSummary assess_trend_to_one(const std::vector<double>& ratios, int tail_window) {
    TrendSummary t;
    t.ratios = ratios;
    if (ratios.empty()) return t;
    const double last = ratios.back();
    t.tail_gap = std::abs(last - 1.0);
    const int w = std::min<int>(tail_window, static_cast<int>(ratios.size()) - 1);
    const double earlier = ratios[ratios.size() - 1 - static_cast<std::size_t>(w)];
    t.tail_movement = std::abs(last - earlier);
    t.violation = t.tail_gap > 0.2 && t.tail_movement < 0.5 * t.tail_gap;
    return t;
}

const ConditionEntry& ValidationReport::entry(const std::string& condition) const {
    for (const auto& e : entries) {
        if (e.condition == condition) return e;
    }
    throw Error("no report entry for condition " + condition);
}

bool ValidationReport::exact_failure() const {
    return std::any_of(entries.begin(), entries.end(),
                       [](const ConditionEntry& e) { return e.status == CheckStatus::Fails; });
}

namespace {

struct Node {
    symbolic::Word word;
    double left;
    double len;
};

// Nesting (within float slack of the parent length) and pairwise sibling
// separation, by exhaustive interval scan over all words to `depth`.
// Touching closed intervals count as intersecting; the separation verdict at
// exact-touch scale is decided within 1e-15 of the parent length.
void scan_nesting_and_separation(const MoranGeometrySpec& geom, int depth,
                                 std::uint64_t budget, ConditionEntry& nesting,
                                 ConditionEntry& separation, bool& truncated) {
    std::uint64_t visited = 0;
    int reached = 0;
    std::vector<Node> stack;
    stack.push_back(Node{symbolic::Word{}, 0.0, 1.0});
    while (!stack.empty()) {
        Node node = std::move(stack.back());
        stack.pop_back();
        reached = std::max(reached, node.word.length());
        if (node.word.length() == depth) continue;
        const int level = node.word.length() + 1;
        const auto& c = geom.ratios(level);
        const int n = static_cast<int>(c.size());
        std::vector<Node> children;
        children.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            if (++visited > budget) {
                truncated = true;
                nesting.detail += " (scan truncated by budget)";
                separation.detail += " (scan truncated by budget)";
                nesting.checked_depth = separation.checked_depth = reached;
                return;
            }
            Node child;
            child.word = node.word.child(i);
            child.left = node.left + geom.offset(level, i) * node.len;
            child.len = node.len * c[static_cast<std::size_t>(i)];
            // absolute slack: endpoint rounding accumulates at coordinate
            // scale, not at the scale of the current interval
            const double slack = 1e-13;
            if (nesting.status != CheckStatus::Fails &&
                (child.left < node.left - slack ||
                 child.left + child.len > node.left + node.len + slack)) {
                nesting.status = CheckStatus::Fails;
                nesting.witnesses = {child.word};
                std::ostringstream msg;
                msg << "child [" << child.left << ", " << child.left + child.len
                    << "] leaves parent [" << node.left << ", " << node.left + node.len << "]";
                nesting.detail = msg.str();
            }
            children.push_back(std::move(child));
        }
        if (separation.status != CheckStatus::Fails) {
            for (int i = 0; i < n && separation.status != CheckStatus::Fails; ++i) {
                for (int k = i + 1; k < n; ++k) {
                    const Node& a = children[static_cast<std::size_t>(i)];
                    const Node& b = children[static_cast<std::size_t>(k)];
                    const double lo = std::max(a.left, b.left);
                    const double hi = std::min(a.left + a.len, b.left + b.len);
                    if (hi - lo >= -1e-15 * node.len) {
                        separation.status = CheckStatus::Fails;
                        separation.witnesses = {a.word, b.word};
                        std::ostringstream msg;
                        msg << "siblings intersect on [" << lo << ", " << hi << "]";
                        separation.detail = msg.str();
                        separation.constants["overlap_left"] = lo;
                        separation.constants["overlap_right"] = hi;
                        break;
                    }
                }
            }
        }
        for (auto& ch : children) stack.push_back(std::move(ch));
    }
    nesting.checked_depth = separation.checked_depth = depth;
}

} // namespace

ValidationReport validate(const MoranGeometrySpec& geom, int depth, std::uint64_t budget) {
    if (depth < 1) throw ConfigError("validation depth must be >= 1");
    ValidationReport report;
    report.depth = depth;

    ConditionEntry nesting;
    nesting.condition = "M1";
    nesting.status = CheckStatus::HoldsAtDepth;
    ConditionEntry separation;
    separation.condition = "M3";
    separation.status = CheckStatus::HoldsAtDepth;
    scan_nesting_and_separation(geom, depth, budget, nesting, separation, report.truncated);

    // Contraction: every ratio sits below a sup < 1, which the eventually
    // periodic table makes exact over all levels, so diameters vanish along
    // every path at geometric rate.
    ConditionEntry contraction;
    contraction.condition = "M2";
    contraction.status = CheckStatus::HoldsAtDepth;
    contraction.checked_depth = depth;
    {
        double sup = 0.0;
        const int levels = geom.ratio_table().distinct_levels();
        for (int j = 1; j <= levels; ++j) sup = std::max(sup, geom.max_ratio(j));
        contraction.constants["sup_ratio"] = sup;
        contraction.detail = "all ratios bounded by sup < 1 over the periodic table";
    }

    // Inner ball: a closed interval contains the ball of radius diam/2 about
    // its midpoint, so the constant 1/2 is exact and optimal.
    ConditionEntry inner_ball;
    inner_ball.condition = "M4";
    inner_ball.status = CheckStatus::HoldsAtDepth;
    inner_ball.checked_depth = depth;
    inner_ball.constants["C0"] = 0.5;
    inner_ball.detail = "exact for intervals: ball of radius diam/2 around the midpoint";

    // Scale-regularity trend: worst-case ratio of log parent diameter to
    // log of the smallest child diameter, evaluated through the ratio-table
    // bounds (largest level-n diameter against the smallest level-(n+1)
    // child ratio). Reported as a finite trend, never as a limit.
    ConditionEntry scale_trend;
    scale_trend.condition = "M5";
    scale_trend.status = CheckStatus::Trend;
    scale_trend.checked_depth = depth;
    {
        std::vector<double> ratios;
        ratios.reserve(static_cast<std::size_t>(depth));
        for (int n = 1; n <= depth; ++n) {
            const double num = geom.log_max_diam(n);
            const double den = num + std::log(geom.min_ratio(n + 1));
            ratios.push_back(num / den);
        }
        scale_trend.trend = assess_trend_to_one(ratios, 5);
        scale_trend.detail = "log diam vs log of smallest child diam, worst case per level";
    }

    // Ratio lower bound: exact over all levels via the periodic table.
    ConditionEntry ratio_bound;
    ratio_bound.condition = "M6";
    ratio_bound.status = CheckStatus::HoldsAtDepth;
    ratio_bound.checked_depth = depth;
    {
        double c = 1.0;
        const int levels = geom.ratio_table().distinct_levels();
        for (int j = 1; j <= levels; ++j) c = std::min(c, geom.min_ratio(j));
        ratio_bound.constants["c"] = c;
        ratio_bound.detail = "infimum of child/parent diameter ratios, exact over the periodic table";
    }

    // Level comparability: beta_n is the geometric mean of level-n
    // diameters; the best-fit constant is the worst spread of actual level
    // diameters around beta_n. The accompanying trend tracks
    // log beta_n / log beta_{n+1}.
    ConditionEntry comparability;
    comparability.condition = "M7";
    comparability.status = CheckStatus::Trend;
    comparability.checked_depth = depth;
    {
        double C = 1.0;
        std::vector<double> ratios;
        ratios.reserve(static_cast<std::size_t>(depth));
        for (int n = 1; n <= depth; ++n) {
            const double beta = geom.log_geomean_diam(n);
            C = std::max(C, std::exp(geom.log_max_diam(n) - beta));
            C = std::max(C, std::exp(beta - geom.log_min_diam(n)));
            if (n < depth) ratios.push_back(geom.log_geomean_diam(n) / geom.log_geomean_diam(n + 1));
        }
        comparability.trend = assess_trend_to_one(ratios, 5);
        comparability.constants["C"] = C;
        comparability.detail = "spread of level diameters around their geometric mean";
    }

    // Submultiplicativity: diam of a concatenation against the product of
    // the two diameters. The factor for a suffix symbol i moved from level
    // j to level s+j is c_{s+j,i}/c_{j,i}, and the worst case maximizes per
    // level independently, so the bound is exact over the checked shifts.
    ConditionEntry submult;
    submult.condition = "M8";
    submult.status = CheckStatus::HoldsAtDepth;
    submult.checked_depth = depth;
    {
        double D = 1.0;
        const int span = geom.ratio_table().distinct_levels() +
                         static_cast<int>(geom.ratio_table().period().size());
        const int shifts = std::max(span, depth);
        for (int s = 1; s <= shifts; ++s) {
            double log_prod = 0.0;
            for (int m = 1; m <= depth; ++m) {
                const auto& base = geom.ratios(m);
                const auto& shifted = geom.ratios(s + m);
                const int common = static_cast<int>(std::min(base.size(), shifted.size()));
                double best = -1e300;
                for (int i = 0; i < common; ++i) {
                    best = std::max(best, std::log(shifted[static_cast<std::size_t>(i)]) -
                                              std::log(base[static_cast<std::size_t>(i)]));
                }
                log_prod += best;
                D = std::max(D, std::exp(log_prod));
            }
        }
        submult.constants["D"] = D;
        submult.detail = "max over level shifts of suffix diameter inflation";
    }

    report.entries = {nesting, contraction, separation, inner_ball,
                      scale_trend, ratio_bound, comparability, submult};
    return report;
}

int clustering_count(const MoranGeometrySpec& geom, double x, double r, int max_depth) {
    if (!(r > 0.0)) throw ConfigError("clustering radius must be > 0");
    if (max_depth < 1) throw ConfigError("clustering max_depth must be >= 1");
    if (r >= 1.0) return 0; // no word's parent has diameter exceeding r
    // Endpoint contact is decided within 1e-9*r so closed-ball touching
    // survives float rounding of deep interval endpoints.
    const double slack = 1e-9 * r;
    const double lo = x - r - slack;
    const double hi = x + r + slack;
    int count = 0;
    std::vector<Node> stack;
    stack.push_back(Node{symbolic::Word{}, 0.0, 1.0});
    while (!stack.empty()) {
        Node node = std::move(stack.back());
        stack.pop_back();
        if (node.left > hi || node.left + node.len < lo) continue;
        if (!node.word.empty() && node.len <= r) {
            ++count; // parent diameter exceeds r: descent only passes such nodes
            continue;
        }
        if (node.word.length() == max_depth) {
            std::ostringstream msg;
            msg << "stopping word for r=" << r << " exceeds max depth " << max_depth;
            throw DepthError(msg.str());
        }
        const int level = node.word.length() + 1;
        const auto& c = geom.ratios(level);
        for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) {
            Node child;
            child.word = node.word.child(i);
            child.left = node.left + geom.offset(level, i) * node.len;
            child.len = node.len * c[static_cast<std::size_t>(i)];
            stack.push_back(std::move(child));
        }
    }
    return count;
}

ClusteringReport clustering_diagnostic(const MoranGeometrySpec& geom,
                                       const symbolic::ProductMeasureSpec& measure,
                                       int n_points, int r_levels,
                                       std::uint64_t seed, int depth) {
    if (n_points < 1 || r_levels < 1) {
        throw ConfigError("clustering diagnostic needs n_points >= 1 and r_levels >= 1");
    }
    ClusteringReport report;
    report.r_grid.reserve(static_cast<std::size_t>(r_levels));
    for (int k = 1; k <= r_levels; ++k) {
        report.r_grid.push_back(std::exp(geom.log_min_diam(k)));
    }
    report.points.reserve(static_cast<std::size_t>(n_points));
    report.counts.resize(static_cast<std::size_t>(n_points));
    report.max_per_r.assign(static_cast<std::size_t>(r_levels), 0);
    for (int i = 0; i < n_points; ++i) {
        const symbolic::Word path =
            symbolic::sample_path(measure, rng::derive(seed, static_cast<std::uint64_t>(i)), depth);
        const IntervalSet iv = realize(geom, path);
        const double x = 0.5 * (iv.left + iv.right);
        report.points.push_back(x);
        auto& row = report.counts[static_cast<std::size_t>(i)];
        row.reserve(static_cast<std::size_t>(r_levels));
        for (int k = 0; k < r_levels; ++k) {
            const int count = clustering_count(geom, x, report.r_grid[static_cast<std::size_t>(k)], depth);
            row.push_back(count);
            report.max_per_r[static_cast<std::size_t>(k)] =
                std::max(report.max_per_r[static_cast<std::size_t>(k)], count);
            report.sup_estimate = std::max(report.sup_estimate, count);
        }
    }
    return report;
}

} // namespace morandim::geometry
