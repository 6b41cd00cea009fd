#include "morandim/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "morandim/rng.hpp"

namespace morandim::dimension {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void apply_tail_policy(DimensionEstimate& est) {
    const int n = static_cast<int>(est.sequence.size());
    if (n == 0) throw ConfigError("dimension estimate needs a nonempty sequence");
    const int w = std::min(est.tail_window, n);
    double lo = est.sequence[static_cast<std::size_t>(n - w)];
    double hi = lo;
    double sum = 0.0, sq = 0.0;
    for (int k = n - w; k < n; ++k) {
        const double v = est.sequence[static_cast<std::size_t>(k)];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
        sq += v * v;
    }
    est.value = lo;
    est.diagnostics.window_min = lo;
    est.diagnostics.window_max = hi;
    const double mean = sum / w;
    est.diagnostics.tail_variance = std::max(0.0, sq / w - mean * mean);
}

double squared_mass_sum_level(const symbolic::ProductMeasureSpec& measure, int level) {
    double sq = 0.0;
    for (double v : measure.probabilities(level)) sq += v * v;
    return sq;
}

} // namespace

std::string to_string(Route route) {
    switch (route) {
        case Route::Moran: return "moran";
        case Route::Filtration: return "filtration";
        case Route::Paircount: return "paircount";
    }
    return "unknown";
}

DimensionEstimate cordim_moran(const symbolic::ProductMeasureSpec& measure,
                               const geometry::MoranGeometrySpec& geom, int n_max,
                               int tail_window) {
    if (n_max < 1 || tail_window < 1) throw ConfigError("cordim needs n_max >= 1 and tail_window >= 1");
    DimensionEstimate est;
    est.route = Route::Moran;
    est.tail_window = tail_window;
    est.sequence.reserve(static_cast<std::size_t>(n_max));
    double numer = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        numer += std::log(squared_mass_sum_level(measure, n));
        const double denom = geom.log_geomean_diam(n);
        est.numer_log.push_back(numer);
        est.denom_log.push_back(denom);
        est.sequence.push_back(numer == 0.0 ? 0.0 : numer / denom);
    }
    // Level-comparability trend on the scale sequence; a violation means the
    // hypotheses behind this route are unmet, so the estimate carries a
    // warning but is still produced.
    {
        std::vector<double> ratios;
        double spread = 1.0;
        for (int n = 1; n <= n_max; ++n) {
            const double beta = geom.log_geomean_diam(n);
            spread = std::max(spread, std::exp(geom.log_max_diam(n) - beta));
            spread = std::max(spread, std::exp(beta - geom.log_min_diam(n)));
            if (n < n_max) ratios.push_back(beta / geom.log_geomean_diam(n + 1));
        }
        const geometry::TrendSummary trend = geometry::assess_trend_to_one(ratios, tail_window);
        if (trend.violation) {
            std::ostringstream msg;
            msg << "level-comparability trend violation: log-scale ratio tail at "
                << trend.ratios.back() << " (spread constant " << spread << ")";
            est.warnings.push_back(msg.str());
        }
    }
    apply_tail_policy(est);
    return est;
}

DimensionEstimate cordim_filtration(const symbolic::ProductMeasureSpec& measure,
                                    const filtration::GeneralFiltration& filt,
                                    int tail_window) {
    if (filt.n_levels() == 0) throw ConfigError("filtration has no built levels");
    if (tail_window < 1) throw ConfigError("tail_window must be >= 1");
    DimensionEstimate est;
    est.route = Route::Filtration;
    est.tail_window = tail_window;
    for (int n = 0; n < filt.n_levels(); ++n) {
        const auto& level = filt.levels[static_cast<std::size_t>(n)];
        if (level.empty()) {
            std::ostringstream msg;
            msg << "filtration level " << n + 1 << " is empty";
            throw ConfigError(msg.str());
        }
        // log-sum-exp over 2*log(mass) of the stopping words
        double peak = kNegInf;
        std::vector<double> twice_logs;
        twice_logs.reserve(level.size());
        for (const auto& w : level) {
            const double l = 2.0 * symbolic::cylinder_measure(measure, w).log_value;
            twice_logs.push_back(l);
            peak = std::max(peak, l);
        }
        double acc = 0.0;
        for (double l : twice_logs) acc += std::exp(l - peak);
        const double numer = peak + std::log(acc);
        const double denom = filt.log_delta[static_cast<std::size_t>(n)];
        est.numer_log.push_back(numer);
        est.denom_log.push_back(denom);
        est.sequence.push_back(numer == 0.0 ? 0.0 : numer / denom);
    }
    if (filt.truncated) est.warnings.push_back("filtration was truncated by its build budget");
    apply_tail_policy(est);
    return est;
}

CorrelationIntegralCurve cordim_paircount(const symbolic::ProductMeasureSpec& measure,
                                          const geometry::MoranGeometrySpec& geom,
                                          std::uint64_t n_samples, int path_depth,
                                          int r_levels, std::uint64_t seed) {
    if (n_samples < 2) throw ConfigError("pair counting needs at least 2 samples");
    if (r_levels < 2) throw ConfigError("pair counting needs at least 2 grid levels");
    CorrelationIntegralCurve curve;
    curve.n_samples = n_samples;
    for (int k = 1; k <= r_levels; ++k) {
        curve.r.push_back(std::exp(geom.log_min_diam(k)));
    }
    const double r_min = curve.r.back();
    if (geom.log_max_diam(path_depth) >= std::log(r_min / 100.0)) {
        std::ostringstream msg;
        msg << "path depth " << path_depth << " leaves cylinder diameter "
            << std::exp(geom.log_max_diam(path_depth)) << ", need below " << r_min / 100.0;
        throw ConfigError(msg.str());
    }

    std::vector<double> points(n_samples);
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        const symbolic::Word path = symbolic::sample_path(measure, rng::derive(seed, i), path_depth);
        const geometry::IntervalSet iv = geometry::realize(geom, path);
        points[i] = 0.5 * (iv.left + iv.right);
    }
    std::sort(points.begin(), points.end());

    const double total_pairs =
        static_cast<double>(n_samples) * static_cast<double>(n_samples - 1);
    for (double r : curve.r) {
        std::uint64_t unordered = 0;
        std::size_t w = 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            while (points[i] - points[w] > r) ++w;
            unordered += i - w;
        }
        curve.pair_counts.push_back(2 * unordered);
        curve.estimate.push_back(static_cast<double>(2 * unordered) / total_pairs);
    }

    std::vector<int> kept;
    for (int k = 0; k < r_levels; ++k) {
        if (curve.pair_counts[static_cast<std::size_t>(k)] < 10) {
            curve.dropped.push_back(k);
            std::ostringstream msg;
            msg << "r=" << curve.r[static_cast<std::size_t>(k)] << " dropped from the fit: only "
                << curve.pair_counts[static_cast<std::size_t>(k)] << " pairs";
            curve.warnings.push_back(msg.str());
        } else {
            kept.push_back(k);
        }
    }
    const int m = static_cast<int>(kept.size());
    if (m < 2) throw DegenerateEstimateError("too few usable grid levels for a slope fit");

    std::vector<double> log_r(static_cast<std::size_t>(m)), log_e(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        log_r[static_cast<std::size_t>(i)] = std::log(curve.r[static_cast<std::size_t>(kept[static_cast<std::size_t>(i)])]);
        log_e[static_cast<std::size_t>(i)] = std::log(curve.estimate[static_cast<std::size_t>(kept[static_cast<std::size_t>(i)])]);
    }
    for (int i = 0; i + 1 < m; ++i) {
        curve.local_slopes.push_back(
            (log_e[static_cast<std::size_t>(i) + 1] - log_e[static_cast<std::size_t>(i)]) /
            (log_r[static_cast<std::size_t>(i) + 1] - log_r[static_cast<std::size_t>(i)]));
    }

    // Widest interior run of local slopes varying by < 10% of their mean;
    // the first and last kept points never enter the fit.
    int lo_slope = 1, hi_slope = m - 3; // slope i sits between points i and i+1
    if (hi_slope < lo_slope) {
        lo_slope = 0;
        hi_slope = m - 2;
        curve.warnings.push_back("too few grid levels to exclude endpoints from the fit");
    }
    int best_a = lo_slope, best_b = lo_slope - 1;
    for (int a = lo_slope; a <= hi_slope; ++a) {
        double mn = curve.local_slopes[static_cast<std::size_t>(a)];
        double mx = mn, sum = 0.0;
        for (int b = a; b <= hi_slope; ++b) {
            const double v = curve.local_slopes[static_cast<std::size_t>(b)];
            mn = std::min(mn, v);
            mx = std::max(mx, v);
            sum += v;
            const double mean = sum / (b - a + 1);
            if (mx - mn <= 0.10 * std::abs(mean) && b - a > best_b - best_a) {
                best_a = a;
                best_b = b;
            }
        }
    }
    if (best_b < best_a) { // no run qualified; fall back to the full interior
        best_a = lo_slope;
        best_b = hi_slope;
        curve.warnings.push_back("no stable slope window found; fitting the full interior range");
    }
    const int p_first = best_a, p_last = best_b + 1; // kept-point index range
    curve.fit_first = kept[static_cast<std::size_t>(p_first)];
    curve.fit_last = kept[static_cast<std::size_t>(p_last)];

    // Least squares of log estimate on log r over the window.
    const int np = p_last - p_first + 1;
    double sx = 0.0, sy = 0.0;
    for (int i = p_first; i <= p_last; ++i) {
        sx += log_r[static_cast<std::size_t>(i)];
        sy += log_e[static_cast<std::size_t>(i)];
    }
    const double mx_ = sx / np, my_ = sy / np;
    double sxx = 0.0, sxy = 0.0;
    for (int i = p_first; i <= p_last; ++i) {
        const double dx = log_r[static_cast<std::size_t>(i)] - mx_;
        sxx += dx * dx;
        sxy += dx * (log_e[static_cast<std::size_t>(i)] - my_);
    }
    curve.slope = sxy / sxx;
    double rss = 0.0;
    for (int i = p_first; i <= p_last; ++i) {
        const double resid = log_e[static_cast<std::size_t>(i)] - my_ -
                             curve.slope * (log_r[static_cast<std::size_t>(i)] - mx_);
        rss += resid * resid;
    }
    curve.slope_stderr = np > 2 ? std::sqrt(rss / (np - 2) / sxx) : 0.0;
    return curve;
}

LocalDimensionSample local_dim_sequence(const symbolic::ProductMeasureSpec& measure,
                                        const geometry::MoranGeometrySpec& geom,
                                        const symbolic::Word& path, int tail_window) {
    if (tail_window < 1) throw ConfigError("tail_window must be >= 1");
    if (path.length() < tail_window) {
        throw ConfigError("path must be at least tail_window levels deep");
    }
    symbolic::validate_word(measure.space(), path);
    LocalDimensionSample sample;
    sample.path = path;
    sample.tail_window = tail_window;
    double log_mass = 0.0, log_len = 0.0;
    sample.sequence.reserve(static_cast<std::size_t>(path.length()));
    for (int n = 1; n <= path.length(); ++n) {
        const int sym = path.symbols[static_cast<std::size_t>(n) - 1];
        log_mass += std::log(measure.probabilities(n)[static_cast<std::size_t>(sym)]);
        log_len += std::log(geom.ratios(n)[static_cast<std::size_t>(sym)]);
        sample.sequence.push_back(log_mass == 0.0 ? 0.0 : log_mass / log_len);
    }
    const int n = path.length();
    const int w = std::min(tail_window, n);
    sample.lower = sample.upper = sample.sequence[static_cast<std::size_t>(n - w)];
    for (int k = n - w; k < n; ++k) {
        sample.lower = std::min(sample.lower, sample.sequence[static_cast<std::size_t>(k)]);
        sample.upper = std::max(sample.upper, sample.sequence[static_cast<std::size_t>(k)]);
    }
    {
        const int depth = std::min(path.length(), 60);
        std::vector<double> ratios;
        for (int m = 1; m <= depth; ++m) {
            const double num = geom.log_max_diam(m);
            ratios.push_back(num / (num + std::log(geom.min_ratio(m + 1))));
        }
        const geometry::TrendSummary trend = geometry::assess_trend_to_one(ratios, tail_window);
        sample.scale_regular = !trend.violation;
        sample.scale_trend_gap = trend.tail_gap;
    }
    return sample;
}

LowerHausdorffEstimate lower_hausdorff_estimate(const symbolic::ProductMeasureSpec& measure,
                                                const geometry::MoranGeometrySpec& geom,
                                                int n_paths, int depth, int tail_window,
                                                std::uint64_t seed) {
    if (n_paths < 1 || depth < tail_window || tail_window < 1) {
        throw ConfigError("lower Hausdorff estimate needs n_paths >= 1 and depth >= tail_window >= 1");
    }
    LowerHausdorffEstimate out;
    out.per_path_lower.reserve(static_cast<std::size_t>(n_paths));
    out.per_path_upper.reserve(static_cast<std::size_t>(n_paths));
    for (int i = 0; i < n_paths; ++i) {
        const std::uint64_t path_seed = rng::derive(seed, static_cast<std::uint64_t>(i));
        const std::uint64_t base = rng::splitmix64(path_seed);
        double log_mass = 0.0, log_len = 0.0;
        std::vector<double> ring(static_cast<std::size_t>(tail_window), 0.0);
        for (int m = 1; m <= depth; ++m) {
            const double u = rng::unit_double(rng::mix(base, static_cast<std::uint64_t>(m)));
            const int sym = symbolic::sample_symbol(measure.probabilities(m), u);
            log_mass += std::log(measure.probabilities(m)[static_cast<std::size_t>(sym)]);
            log_len += std::log(geom.ratios(m)[static_cast<std::size_t>(sym)]);
            ring[static_cast<std::size_t>(m % tail_window)] =
                log_mass == 0.0 ? 0.0 : log_mass / log_len;
        }
        double lo = ring[0], hi = ring[0];
        for (double v : ring) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        out.per_path_lower.push_back(lo);
        out.per_path_upper.push_back(hi);
        if (i == 0 || lo < out.value) {
            out.value = lo;
            out.argmin_path = i;
        }
    }
    return out;
}

namespace {

// Position of a sampled point inside the cylinder starting at `from_level`,
// in that cylinder's unit coordinates. Walks levels until the remaining
// scale is below double resolution, then takes the midpoint of what is
// left. One uniform per level, drawn from a counter-based stream.
double sample_relative_position(const symbolic::ProductMeasureSpec& measure,
                                const geometry::MoranGeometrySpec& geom, int from_level,
                                std::uint64_t stream) {
    double u = 0.0, scale = 1.0;
    for (int t = 0; t < 64 && scale > 1e-17; ++t) {
        const int level = from_level + t;
        const int sym = symbolic::sample_symbol(
            measure.probabilities(level),
            rng::unit_double(rng::mix(stream, static_cast<std::uint64_t>(t))));
        u += geom.offset(level, sym) * scale;
        scale *= geom.ratios(level)[static_cast<std::size_t>(sym)];
    }
    return u + 0.5 * scale;
}

} // namespace

PotentialEstimate potential_estimate(const symbolic::ProductMeasureSpec& measure,
                                     const geometry::MoranGeometrySpec& geom, double s,
                                     double x, std::uint64_t n_samples, double epsilon,
                                     std::uint64_t seed) {
    if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("potential point must lie in [0,1]");
    if (!(epsilon > 0.0)) throw ConfigError("potential truncation radius must be > 0");
    if (s < 0.0) throw ConfigError("potential exponent must be >= 0");
    if (n_samples < 1) throw ConfigError("potential estimate needs samples");

    PotentialEstimate out;
    out.s = s;
    out.x = x;
    out.epsilon = epsilon;
    out.n_samples = n_samples;

    if (s == 0.0) { // integrand is identically 1; the untruncated value is the mass
        out.value = 1.0;
        return out;
    }

    // Cylinder chain of x: successive children whose closed interval
    // contains x, with x tracked in each cylinder's unit coordinates.
    struct ChainLink {
        int symbol;
        double x_rel;    // x in the unit coordinates of this cylinder
        double log_len;  // log diameter of this cylinder
    };
    std::vector<ChainLink> chain;
    double x_rel = x, log_len = 0.0;
    enum class ChainEnd { Gap, SubEpsilon };
    ChainEnd chain_end = ChainEnd::Gap;
    for (int level = 1;; ++level) {
        if (log_len <= std::log(epsilon) + std::log(1e-3)) {
            chain_end = ChainEnd::SubEpsilon; // remaining cylinder is far below epsilon
            break;
        }
        if (level > 4000) {
            throw ConfigError("epsilon too small for this geometry's contraction rate");
        }
        const auto& c = geom.ratios(level);
        int found = -1;
        for (int i = 0; i < static_cast<int>(c.size()); ++i) {
            const double off = geom.offset(level, i);
            if (x_rel >= off && x_rel <= off + c[static_cast<std::size_t>(i)]) {
                found = i;
                break;
            }
        }
        if (found < 0) break; // x sits in a gap of this cylinder
        x_rel = (x_rel - geom.offset(level, found)) / c[static_cast<std::size_t>(found)];
        log_len += std::log(c[static_cast<std::size_t>(found)]);
        chain.push_back(ChainLink{found, x_rel, log_len});
    }
    const int chain_len = static_cast<int>(chain.size());
    const bool gap_terminated = chain_end == ChainEnd::Gap;

    // Strata: first disagreement with the chain at level k (1..chain_len),
    // plus, when the chain ended in a gap, one stratum per child of the last
    // chain cylinder (x belongs to none of them, so distances there are
    // bounded away from zero). Mass agreeing with a diameter-terminated
    // chain sits entirely below epsilon and is excluded exactly.
    struct Stratum {
        int level;                    // level of the distinguishing symbol
        double probability;
        std::vector<double> weights;  // distribution of the distinguishing symbol
        double parent_log_len;        // log diameter of the common cylinder
        double parent_x_rel;          // x in the common cylinder's coordinates
    };
    std::vector<Stratum> strata;
    double prefix_prob = 1.0;
    for (int k = 1; k <= chain_len; ++k) {
        const auto& p = measure.probabilities(k);
        const int a = chain[static_cast<std::size_t>(k) - 1].symbol;
        const double stay = p[static_cast<std::size_t>(a)];
        if (stay < 1.0) {
            Stratum st;
            st.level = k;
            st.probability = prefix_prob * (1.0 - stay);
            st.weights.assign(p.begin(), p.end());
            st.weights[static_cast<std::size_t>(a)] = 0.0;
            st.parent_log_len = k >= 2 ? chain[static_cast<std::size_t>(k) - 2].log_len : 0.0;
            st.parent_x_rel = k >= 2 ? chain[static_cast<std::size_t>(k) - 2].x_rel : x;
            strata.push_back(std::move(st));
        }
        prefix_prob *= stay;
    }
    if (gap_terminated && prefix_prob > 0.0) {
        const auto& p = measure.probabilities(chain_len + 1);
        Stratum st;
        st.level = chain_len + 1;
        st.probability = prefix_prob;
        st.weights.assign(p.begin(), p.end());
        st.parent_log_len = chain_len >= 1 ? chain.back().log_len : 0.0;
        st.parent_x_rel = chain_len >= 1 ? chain.back().x_rel : x;
        strata.push_back(std::move(st));
    } else if (!gap_terminated) {
        out.excluded_mass += prefix_prob; // sub-epsilon cylinder, excluded exactly
    }

    if (strata.empty()) {
        throw DegenerateEstimateError("all mass lies within epsilon of the point");
    }

    const std::uint64_t per_stratum =
        std::max<std::uint64_t>(16, n_samples / strata.size());
    out.n_samples = per_stratum * strata.size();
    const double log_eps = std::log(epsilon);
    const std::uint64_t base = rng::splitmix64(seed);
    double value = 0.0, variance = 0.0;
    std::uint64_t included = 0;
    for (std::size_t si = 0; si < strata.size(); ++si) {
        const Stratum& st = strata[si];
        double wsum = 0.0;
        for (double wv : st.weights) wsum += wv;
        double sum = 0.0, sumsq = 0.0, excl = 0.0;
        for (std::uint64_t m = 0; m < per_stratum; ++m) {
            const std::uint64_t s0 = rng::mix3(base, si, m);
            // distinguishing symbol by inverse CDF over the stratum weights
            const double u = rng::unit_double(rng::mix(s0, 0)) * wsum;
            int b = 0;
            double cum = 0.0;
            for (std::size_t i = 0; i < st.weights.size(); ++i) {
                cum += st.weights[i];
                b = static_cast<int>(i);
                if (u < cum) break;
            }
            const double cb = geom.ratios(st.level)[static_cast<std::size_t>(b)];
            const double pos = geom.offset(st.level, b) +
                               cb * sample_relative_position(measure, geom, st.level + 1,
                                                             rng::mix(s0, 1));
            const double delta = std::abs(st.parent_x_rel - pos);
            const double log_d = delta > 0.0 ? st.parent_log_len + std::log(delta) : kNegInf;
            if (log_d >= log_eps) {
                const double v = std::exp(-s * log_d);
                sum += v;
                sumsq += v * v;
                ++included;
            } else {
                excl += 1.0;
            }
        }
        const double mean = sum / static_cast<double>(per_stratum);
        const double meansq = sumsq / static_cast<double>(per_stratum);
        value += st.probability * mean;
        variance += st.probability * st.probability *
                    std::max(0.0, meansq - mean * mean) / static_cast<double>(per_stratum);
        out.excluded_mass += st.probability * excl / static_cast<double>(per_stratum);
    }
    if (included == 0) {
        throw DegenerateEstimateError("every sample fell within epsilon of the point");
    }
    out.value = value;
    out.std_error = std::sqrt(variance);
    return out;
}

struct EnergySampler::Impl {
    struct Stratum {
        double probability = 0.0;
        std::vector<double> log_d; // log pair distance per sample
    };
    std::vector<Stratum> strata;
    double tail_mass = 0.0; // pairs agreeing beyond the deepest stratum
    std::uint64_t n_samples = 0;
    double min_epsilon = 0.0;
};

EnergySampler::~EnergySampler() = default;
EnergySampler::EnergySampler(EnergySampler&&) noexcept = default;
EnergySampler& EnergySampler::operator=(EnergySampler&&) noexcept = default;

EnergySampler::EnergySampler(const symbolic::ProductMeasureSpec& measure,
                             const geometry::MoranGeometrySpec& geom, std::uint64_t n_samples,
                             double min_epsilon, std::uint64_t seed)
    : impl_(std::make_unique<Impl>()) {
    if (!(min_epsilon > 0.0 && min_epsilon < 1.0)) {
        throw ConfigError("energy truncation radii must lie in (0,1)");
    }
    if (n_samples < 1) throw ConfigError("energy sampler needs samples");
    impl_->n_samples = n_samples;
    impl_->min_epsilon = min_epsilon;

    // Depth beyond which a pair that still agrees is closer than every rung.
    int depth = 0;
    const double target = std::log(min_epsilon);
    while (geom.log_max_diam(depth + 1) >= target) {
        if (++depth > 4000) {
            throw ConfigError("epsilon ladder is too deep for this geometry's contraction rate");
        }
    }
    ++depth;

    std::vector<int> split_levels;
    std::vector<double> split_probs;
    double agree_mass = 1.0;
    for (int k = 1; k <= depth; ++k) {
        const double a = squared_mass_sum_level(measure, k);
        if (a < 1.0) {
            split_levels.push_back(k);
            split_probs.push_back(agree_mass * (1.0 - a));
        }
        agree_mass *= a;
    }
    impl_->tail_mass = agree_mass;
    if (split_levels.empty()) return; // a point mass: every pair coincides

    const std::uint64_t per_stratum =
        std::max<std::uint64_t>(16, n_samples / split_levels.size());
    impl_->n_samples = per_stratum * split_levels.size();
    const std::uint64_t base = rng::splitmix64(seed);
    for (std::size_t si = 0; si < split_levels.size(); ++si) {
        const int k = split_levels[si];
        Impl::Stratum st;
        st.probability = split_probs[si];
        st.log_d.reserve(per_stratum);
        const auto& pk = measure.probabilities(k);
        const auto& ck = geom.ratios(k);
        const double ak = squared_mass_sum_level(measure, k);
        for (std::uint64_t m = 0; m < per_stratum; ++m) {
            const std::uint64_t s0 = rng::mix3(base, static_cast<std::uint64_t>(k), m);
            // common prefix, conditioned on agreement: level j symbol w.p. p^2/A_j
            double log_len = 0.0;
            for (int j = 1; j < k; ++j) {
                const auto& pj = measure.probabilities(j);
                const double aj = squared_mass_sum_level(measure, j);
                const double u = rng::unit_double(rng::mix3(s0, static_cast<std::uint64_t>(j), 0)) * aj;
                int sym = 0;
                double cum = 0.0;
                for (std::size_t i = 0; i < pj.size(); ++i) {
                    cum += pj[i] * pj[i];
                    sym = static_cast<int>(i);
                    if (u < cum) break;
                }
                log_len += std::log(geom.ratios(j)[static_cast<std::size_t>(sym)]);
            }
            // ordered distinct pair at the split level, w.p. p_a p_b / (1 - A_k)
            const double u = rng::unit_double(rng::mix3(s0, 0, 1)) * (1.0 - ak);
            int a = 0, b = 0;
            {
                double cum = 0.0;
                bool done = false;
                for (std::size_t i = 0; i < pk.size() && !done; ++i) {
                    for (std::size_t j = 0; j < pk.size(); ++j) {
                        if (i == j) continue;
                        cum += pk[i] * pk[j];
                        a = static_cast<int>(i);
                        b = static_cast<int>(j);
                        if (u < cum) {
                            done = true;
                            break;
                        }
                    }
                }
            }
            const double pos_a = geom.offset(k, a) +
                                 ck[static_cast<std::size_t>(a)] *
                                     sample_relative_position(measure, geom, k + 1, rng::mix3(s0, 1, 2));
            const double pos_b = geom.offset(k, b) +
                                 ck[static_cast<std::size_t>(b)] *
                                     sample_relative_position(measure, geom, k + 1, rng::mix3(s0, 2, 3));
            const double delta = std::abs(pos_a - pos_b);
            st.log_d.push_back(delta > 0.0 ? log_len + std::log(delta) : kNegInf);
        }
        impl_->strata.push_back(std::move(st));
    }
}

EnergyEstimate EnergySampler::evaluate(double s, const std::vector<double>& ladder) const {
    if (ladder.size() < 4) {
        throw ConfigError("epsilon ladder needs at least 4 rungs for a trend verdict");
    }
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (!(ladder[i] > 0.0 && ladder[i] < 1.0)) {
            throw ConfigError("epsilon ladder entries must lie in (0,1)");
        }
        if (i > 0 && !(ladder[i] < ladder[i - 1])) {
            throw ConfigError("epsilon ladder must be strictly decreasing");
        }
    }
    if (ladder.back() < impl_->min_epsilon * (1.0 - 1e-12)) {
        throw ConfigError("ladder descends below the sampler's minimum epsilon");
    }
    if (s < 0.0) throw ConfigError("energy exponent must be >= 0");

    EnergyEstimate out;
    out.s = s;
    out.epsilon = ladder;
    out.n_samples = impl_->n_samples;
    for (double eps : ladder) {
        const double log_eps = std::log(eps);
        if (s == 0.0) { // integrand identically 1 off the diagonal
            out.value.push_back(1.0);
            out.std_error.push_back(0.0);
            double excl = impl_->tail_mass;
            for (const auto& st : impl_->strata) {
                std::size_t below = 0;
                for (double ld : st.log_d) below += ld < log_eps;
                excl += st.probability * static_cast<double>(below) /
                        static_cast<double>(st.log_d.size());
            }
            out.excluded_mass.push_back(excl);
            continue;
        }
        double value = 0.0, variance = 0.0, excl = impl_->tail_mass;
        for (const auto& st : impl_->strata) {
            double sum = 0.0, sumsq = 0.0;
            std::size_t below = 0;
            for (double ld : st.log_d) {
                if (ld >= log_eps) {
                    const double v = std::exp(-s * ld);
                    sum += v;
                    sumsq += v * v;
                } else {
                    ++below;
                }
            }
            const double n = static_cast<double>(st.log_d.size());
            const double mean = sum / n;
            value += st.probability * mean;
            variance += st.probability * st.probability *
                        std::max(0.0, sumsq / n - mean * mean) / n;
            excl += st.probability * static_cast<double>(below) / n;
        }
        out.value.push_back(value);
        out.std_error.push_back(std::sqrt(variance));
        out.excluded_mass.push_back(excl);
    }

    const double first = out.value.front();
    const double last = out.value.back();
    out.critical_growth = std::log(ladder.back()) / std::log(ladder.front());
    out.observed_growth = first > 0.0 ? last / first : (last > 0.0 ? 1e300 : 1.0);
    bool tail_growing = true;
    for (std::size_t i = out.value.size() / 2; i + 1 < out.value.size(); ++i) {
        if (out.value[i + 1] < out.value[i] * (1.0 - 1e-9)) tail_growing = false;
    }
    const double threshold = std::max(1.5, out.critical_growth);
    out.divergence_flag = tail_growing && out.observed_growth >= threshold;
    return out;
}

EnergyEstimate energy_estimate(const symbolic::ProductMeasureSpec& measure,
                               const geometry::MoranGeometrySpec& geom, double s,
                               std::uint64_t n_samples,
                               const std::vector<double>& epsilon_ladder, std::uint64_t seed) {
    if (epsilon_ladder.size() < 4) {
        throw ConfigError("epsilon ladder needs at least 4 rungs for a trend verdict");
    }
    const EnergySampler sampler(measure, geom, n_samples, epsilon_ladder.back(), seed);
    return sampler.evaluate(s, epsilon_ladder);
}

EnergyBracket cordim_energy(const symbolic::ProductMeasureSpec& measure,
                            const geometry::MoranGeometrySpec& geom, double s_lo, double s_hi,
                            double tol, std::uint64_t n_samples,
                            const std::vector<double>& epsilon_ladder, std::uint64_t seed) {
    if (!(s_lo >= 0.0 && s_hi > s_lo)) throw ConfigError("bisection needs 0 <= s_lo < s_hi");
    if (!(tol > 0.0)) throw ConfigError("bisection tolerance must be > 0");
    if (epsilon_ladder.size() < 4) {
        throw ConfigError("epsilon ladder needs at least 4 rungs for a trend verdict");
    }
    const EnergySampler sampler(measure, geom, n_samples, epsilon_ladder.back(), seed);
    EnergyBracket bracket;
    auto probe = [&](double s) {
        const EnergyEstimate e = sampler.evaluate(s, epsilon_ladder);
        bracket.evals.push_back(
            EnergyBracket::Eval{s, e.divergence_flag, e.observed_growth, e.critical_growth});
        return e.divergence_flag;
    };
    if (probe(s_lo)) {
        throw DegenerateEstimateError("divergence already flagged at the lower endpoint");
    }
    if (!probe(s_hi)) {
        throw DegenerateEstimateError("no divergence flagged at the upper endpoint");
    }
    bracket.lo = s_lo;
    bracket.hi = s_hi;
    while (bracket.hi - bracket.lo > tol) {
        const double mid = 0.5 * (bracket.lo + bracket.hi);
        if (probe(mid)) {
            bracket.hi = mid;
        } else {
            bracket.lo = mid;
        }
    }
    return bracket;
}

ConsistencyReport consistency_check(const symbolic::ProductMeasureSpec& measure,
                                    const geometry::MoranGeometrySpec& geom,
                                    const ConsistencyBudgets& budgets) {
    ConsistencyReport report;
    report.moran = cordim_moran(measure, geom, budgets.n_max, budgets.tail_window);
    const filtration::GeneralFiltration filt =
        filtration::build_moran_filtration(geom, budgets.n_max);
    report.filtration = cordim_filtration(measure, filt, budgets.tail_window);
    report.paircount = cordim_paircount(measure, geom, budgets.samples, budgets.path_depth,
                                        budgets.r_levels, rng::derive(budgets.seed, 1));
    report.ldimh = lower_hausdorff_estimate(measure, geom, budgets.paths, budgets.local_depth,
                                            budgets.tail_window, rng::derive(budgets.seed, 2));

    auto check = [&report](const std::string& a_name, double a, const std::string& b_name,
                           double b, double tol) {
        if (std::abs(a - b) > tol) {
            std::ostringstream msg;
            msg << a_name << "=" << a << " and " << b_name << "=" << b
                << " disagree beyond " << tol;
            report.failures.push_back(msg.str());
            report.pass = false;
        }
    };
    check("moran", report.moran.value, "filtration", report.filtration.value, budgets.route_tol);
    check("moran", report.moran.value, "paircount", report.paircount.slope, budgets.paircount_tol);
    check("filtration", report.filtration.value, "paircount", report.paircount.slope,
          budgets.paircount_tol);
    const std::pair<const char*, double> routes[] = {
        {"moran", report.moran.value},
        {"filtration", report.filtration.value},
        {"paircount", report.paircount.slope}};
    for (const auto& [name, value] : routes) {
        if (value > report.ldimh.value + budgets.order_tol) {
            std::ostringstream msg;
            msg << name << "=" << value << " exceeds lower Hausdorff estimate "
                << report.ldimh.value << " beyond " << budgets.order_tol;
            report.failures.push_back(msg.str());
            report.pass = false;
        }
    }
    return report;
}

} // namespace morandim::dimension
