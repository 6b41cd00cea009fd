#ifndef MORANDIM_CONFIG_HPP
#define MORANDIM_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "morandim/geometry.hpp"
#include "morandim/symbolic.hpp"

namespace morandim::config {

/// Budgets block. Every field has a default; configs and command-line
/// overrides only need to name what they change.
struct BudgetConfig {
    int n_max = 30;
    std::uint64_t samples = 100000;
    int depth = 40;         // sampling/projection depth for point estimators
    int local_depth = 10000; // path depth for local-dimension sampling
    int r_levels = 12;
    int tail_window = 5;
    std::uint64_t seed = 0;
    int paths = 100;
    std::vector<double> epsilon_ladder; // empty selects a geometry-derived default
};

struct OutputConfig {
    std::string format = "doc"; // doc | csv
    std::string path = "-";     // "-" writes to stdout
};

/// One run's parsed configuration: the construction, the measure on its
/// symbol space, budgets, and output routing, plus a digest of the raw
/// config bytes for provenance.
struct RunConfig {
    RunConfig(int schema_version_, symbolic::ProductMeasureSpec measure_,
              geometry::MoranGeometrySpec geometry_, BudgetConfig budgets_,
              OutputConfig output_, std::string digest_)
        : schema_version(schema_version_),
          measure(std::move(measure_)),
          geometry(std::move(geometry_)),
          budgets(std::move(budgets_)),
          output(std::move(output_)),
          digest(std::move(digest_)) {}

    int schema_version;
    symbolic::ProductMeasureSpec measure;
    geometry::MoranGeometrySpec geometry;
    BudgetConfig budgets;
    OutputConfig output;
    std::string digest;
};

/// Parses a JSON config document. Failures throw ConfigError with a
/// field-path-anchored message. Ratio and probability entries may be JSON
/// numbers or exact fraction strings like "1/3".
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

} // namespace morandim::config

#endif
