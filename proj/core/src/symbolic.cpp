#include "morandim/symbolic.hpp"

#include <cmath>
#include <sstream>

#include "morandim/rng.hpp"

namespace morandim::symbolic {

SymbolSpaceSpec::SymbolSpaceSpec(std::vector<int> preperiod, std::vector<int> period)
    : sizes_(std::move(preperiod), std::move(period)) {
    for (int n : sizes_.preperiod()) {
        if (n < 1) throw ConfigError("alphabet sizes must be >= 1");
    }
    for (int n : sizes_.period()) {
        if (n < 1) throw ConfigError("alphabet sizes must be >= 1");
    }
}

Word Word::parent() const {
    Word p{std::vector<int>(symbols.begin(), symbols.end() - 1)};
    return p;
}

Word Word::prefix(int n) const {
    return Word{std::vector<int>(symbols.begin(), symbols.begin() + n)};
}

Word Word::child(int symbol) const {
    Word c{symbols};
    c.symbols.push_back(symbol);
    return c;
}

std::string Word::to_string() const {
    if (symbols.empty()) return "-";
    std::ostringstream out;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (i) out << '.';
        out << symbols[i];
    }
    return out.str();
}

void validate_word(const SymbolSpaceSpec& space, const Word& word) {
    for (int j = 1; j <= word.length(); ++j) {
        const int symbol = word.symbols[static_cast<std::size_t>(j) - 1];
        const int n = space.alphabet_size(j);
        if (symbol < 0 || symbol >= n) {
            std::ostringstream msg;
            msg << "symbol " << symbol << " at level " << j
                << " outside alphabet of size " << n;
            throw InvalidWordError(msg.str());
        }
    }
}

ProductMeasureSpec::ProductMeasureSpec(SymbolSpaceSpec space,
                                       std::vector<std::vector<double>> preperiod,
                                       std::vector<std::vector<double>> period)
    : space_(std::move(space)), vectors_(std::move(preperiod), std::move(period)) {
    const int levels = std::max(vectors_.distinct_levels(), space_.sizes().distinct_levels());
    for (int j = 1; j <= levels; ++j) {
        const auto& p = vectors_.at(j);
        const int n = space_.alphabet_size(j);
        if (static_cast<int>(p.size()) != n) {
            std::ostringstream msg;
            msg << "probability vector at level " << j << " has " << p.size()
                << " entries, alphabet has " << n;
            throw ConfigError(msg.str());
        }
        double sum = 0.0;
        for (double v : p) {
            if (!(v > 0.0)) {
                std::ostringstream msg;
                msg << "probability entries must be > 0 (level " << j << ")";
                throw ConfigError(msg.str());
            }
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12) {
            std::ostringstream msg;
            msg << "probability vector at level " << j << " sums to " << sum
                << ", expected 1 within 1e-12";
            throw ConfigError(msg.str());
        }
    }
    // The periodic structures of the two tables may have different lengths;
    // checking up to the combined distinct range covers one full joint cycle
    // only when lengths divide each other. Walk one lcm-ish window to be safe.
    const int pre = static_cast<int>(std::max(vectors_.preperiod().size(),
                                              space_.sizes().preperiod().size()));
    const int cycle = static_cast<int>(vectors_.period().size() * space_.sizes().period().size());
    for (int j = levels + 1; j <= pre + cycle; ++j) {
        if (static_cast<int>(vectors_.at(j).size()) != space_.alphabet_size(j)) {
            std::ostringstream msg;
            msg << "probability vector at level " << j
                << " does not match the alphabet size at that level";
            throw ConfigError(msg.str());
        }
    }
}

double CylinderMeasureValue::value() const { return std::exp(log_value); }

CylinderMeasureValue cylinder_measure(const ProductMeasureSpec& measure, const Word& word) {
    validate_word(measure.space(), word);
    double log_value = 0.0;
    for (int j = 1; j <= word.length(); ++j) {
        const auto& p = measure.probabilities(j);
        log_value += std::log(p[static_cast<std::size_t>(word.symbols[static_cast<std::size_t>(j) - 1])]);
    }
    return CylinderMeasureValue{log_value, word};
}

double log_correlation_sum(const ProductMeasureSpec& measure, int n) {
    if (n < 1) throw ConfigError("correlation sum requires n >= 1");
    double log_sum = 0.0;
    for (int j = 1; j <= n; ++j) {
        const auto& p = measure.probabilities(j);
        double sq = 0.0;
        for (double v : p) sq += v * v;
        log_sum += std::log(sq);
    }
    return log_sum;
}

namespace {

std::uint64_t level_word_count(const SymbolSpaceSpec& space, int n, std::uint64_t budget) {
    std::uint64_t count = 1;
    for (int j = 1; j <= n; ++j) {
        count *= static_cast<std::uint64_t>(space.alphabet_size(j));
        if (count > budget) {
            std::ostringstream msg;
            msg << "enumerating level " << n << " exceeds the budget of " << budget << " words";
            throw BudgetError(msg.str());
        }
    }
    return count;
}

// Depth-first accumulation of f(mu([w])) over all level-n words.
template <typename Fn>
double enumerate_masses(const ProductMeasureSpec& measure, int n, Fn&& f) {
    double total = 0.0;
    std::vector<int> stack_symbol(static_cast<std::size_t>(n), 0);
    std::vector<double> mass(static_cast<std::size_t>(n) + 1, 1.0);
    int depth = 0;
    while (true) {
        if (depth == n) {
            total += f(mass[static_cast<std::size_t>(n)]);
            --depth;
            while (depth >= 0) {
                const auto& p = measure.probabilities(depth + 1);
                if (++stack_symbol[static_cast<std::size_t>(depth)] < static_cast<int>(p.size())) break;
                --depth;
            }
            if (depth < 0) break;
        }
        const auto& p = measure.probabilities(depth + 1);
        const int sym = stack_symbol[static_cast<std::size_t>(depth)];
        mass[static_cast<std::size_t>(depth) + 1] = mass[static_cast<std::size_t>(depth)] * p[static_cast<std::size_t>(sym)];
        ++depth;
        if (depth < n) stack_symbol[static_cast<std::size_t>(depth)] = 0;
    }
    return total;
}

} // namespace

double correlation_sum_bruteforce(const ProductMeasureSpec& measure, int n, std::uint64_t budget) {
    if (n < 1) throw ConfigError("correlation sum requires n >= 1");
    level_word_count(measure.space(), n, budget);
    return enumerate_masses(measure, n, [](double m) { return m * m; });
}

double total_mass_bruteforce(const ProductMeasureSpec& measure, int n, std::uint64_t budget) {
    if (n < 1) throw ConfigError("total mass requires n >= 1");
    level_word_count(measure.space(), n, budget);
    return enumerate_masses(measure, n, [](double m) { return m; });
}

int sample_symbol(const std::vector<double>& probabilities, double unit) {
    double cumulative = 0.0;
    const int n = static_cast<int>(probabilities.size());
    for (int i = 0; i < n - 1; ++i) {
        cumulative += probabilities[static_cast<std::size_t>(i)];
        if (unit < cumulative) return i;
    }
    return n - 1;
}

Word sample_path(const ProductMeasureSpec& measure, std::uint64_t seed, int depth) {
    if (depth < 1) throw ConfigError("sample_path requires depth >= 1");
    Word word;
    word.symbols.reserve(static_cast<std::size_t>(depth));
    const std::uint64_t base = rng::splitmix64(seed);
    for (int j = 1; j <= depth; ++j) {
        const double u = rng::unit_double(rng::mix(base, static_cast<std::uint64_t>(j)));
        word.symbols.push_back(sample_symbol(measure.probabilities(j), u));
    }
    return word;
}

} // namespace morandim::symbolic
