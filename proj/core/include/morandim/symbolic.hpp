#ifndef MORANDIM_SYMBOLIC_HPP
#define MORANDIM_SYMBOLIC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "morandim/eventually_periodic.hpp"
#include "morandim/errors.hpp"

namespace morandim::symbolic {

/// Per-level finite alphabets of an infinite product space of symbol
/// sequences. Alphabet sizes are described by a preperiod plus a cycle, so
/// level-dependent structures stay finitely describable. Symbols are
/// 0-indexed integers; only the counts matter.
///
/// Immutable after construction; safe for unrestricted concurrent use.
class SymbolSpaceSpec {
public:
    SymbolSpaceSpec(std::vector<int> preperiod, std::vector<int> period);

    /// Alphabet size at 1-based level.
    int alphabet_size(int level) const { return sizes_.at(level); }

    const EventuallyPeriodic<int>& sizes() const { return sizes_; }

private:
    EventuallyPeriodic<int> sizes_;
};

/// A finite sequence of symbols i_1 .. i_n, symbol i_j drawn from the
/// level-j alphabet. Length zero is the empty word (the root).
struct Word {
    std::vector<int> symbols;

    Word() = default;
    explicit Word(std::vector<int> syms) : symbols(std::move(syms)) {}

    int length() const { return static_cast<int>(symbols.size()); }
    bool empty() const { return symbols.empty(); }

    /// The word with the last symbol removed. Undefined for the empty word.
    Word parent() const;

    /// First n symbols.
    Word prefix(int n) const;

    Word child(int symbol) const;

    bool operator==(const Word&) const = default;

    /// Symbols joined with '.', empty word rendered as "-".
    std::string to_string() const;
};

/// Throws InvalidWordError if any symbol falls outside its level's alphabet.
void validate_word(const SymbolSpaceSpec& space, const Word& word);

/// Per-level probability vectors inducing the product measure whose
/// cylinder mass is the product of the chosen entries. Entries must be
/// strictly positive and each vector must sum to 1 within 1e-12; vector
/// lengths must match the symbol space alphabet sizes. Zero entries are
/// rejected at construction since all downstream arithmetic is log-space.
class ProductMeasureSpec {
public:
    ProductMeasureSpec(SymbolSpaceSpec space,
                       std::vector<std::vector<double>> preperiod,
                       std::vector<std::vector<double>> period);

    const SymbolSpaceSpec& space() const { return space_; }
    const std::vector<double>& probabilities(int level) const { return vectors_.at(level); }
    const EventuallyPeriodic<std::vector<double>>& vectors() const { return vectors_; }

private:
    SymbolSpaceSpec space_;
    EventuallyPeriodic<std::vector<double>> vectors_;
};

/// Cylinder mass stored as a natural logarithm. Log-space storage survives
/// depths of order 1e4 where the plain product of doubles underflows.
struct CylinderMeasureValue {
    double log_value = 0.0; // <= 0; empty word has log_value 0
    Word word;

    double value() const;
};

/// Mass of the cylinder of `word`: sum of per-level log-probabilities.
CylinderMeasureValue cylinder_measure(const ProductMeasureSpec& measure, const Word& word);

/// log sum over all level-n cylinders of squared cylinder mass, evaluated
/// through the per-level factorization sum_w mu([w])^2 = prod_j sum_i p_ji^2.
/// Cost is linear in n; the level-n cylinder set is never enumerated.
double log_correlation_sum(const ProductMeasureSpec& measure, int n);

/// Same quantity by exhaustive enumeration of all level-n words, returned
/// in linear space. Enumeration is refused (BudgetError) once the number of
/// words exceeds `budget`; there is no silent truncation.
double correlation_sum_bruteforce(const ProductMeasureSpec& measure, int n,
                                  std::uint64_t budget = 10'000'000);

/// Total mass at level n by exhaustive enumeration; equals 1 up to float
/// summation error. Subject to the same budget rule as the brute-force sum.
double total_mass_bruteforce(const ProductMeasureSpec& measure, int n,
                             std::uint64_t budget = 10'000'000);

/// Draws a length-`depth` word with independent levels, level j distributed
/// by the level-j probability vector. Deterministic in `seed`, and
/// prefix-stable: extending `depth` under the same seed extends the same
/// path. Parallel callers should derive disjoint seeds via rng::derive.
Word sample_path(const ProductMeasureSpec& measure, std::uint64_t seed, int depth);

/// Single-symbol draw used by sample_path, exposed for samplers that build
/// words level by level.
int sample_symbol(const std::vector<double>& probabilities, double unit);

} // namespace morandim::symbolic

#endif
