#ifndef MORANDIM_EMIT_HPP
#define MORANDIM_EMIT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "morandim/dimension.hpp"
#include "morandim/filtration.hpp"
#include "morandim/geometry.hpp"

namespace morandim::emit {

/// Shortest round-trip decimal rendering, locale-free and byte-stable.
std::string format_double(double v);

/// FNV-1a 64-bit hex digest of raw bytes.
std::string fnv1a_hex(std::string_view bytes);

/// Digest of a word's symbol sequence, used as a compact path identifier.
std::string word_digest(const symbolic::Word& word);

/// Minimal CSV quoting: fields containing separators or quotes are wrapped
/// and embedded quotes doubled.
std::string csv_field(const std::string& raw);

/// Run provenance stamped onto every emitted document.
struct Meta {
    int schema_version = 1;
    std::string subcommand;
    std::string config_digest;
    std::uint64_t seed = 0;
};

struct ConsistencySummary {
    bool pass = true;
    std::vector<std::string> failures;
    double ldimh = 0.0;
};

struct LocaldimRow {
    std::string digest;
    double lower = 0.0;
    double upper = 0.0;
    std::vector<double> tail_sequence; // the window the proxies derive from
};

struct LocaldimPayload {
    std::vector<LocaldimRow> rows;
    std::optional<double> essinf; // absent for a single explicit path
    std::optional<int> argmin;
    bool scale_regular = true;
    std::vector<double> explicit_sequence; // full sequence for an explicit path
};

std::string validate_csv(const Meta& meta, const geometry::ValidationReport& geom_report,
                         const filtration::FiltrationReport& filt_report);
std::string validate_doc(const Meta& meta, const geometry::ValidationReport& geom_report,
                         const filtration::FiltrationReport& filt_report);

std::string cordim_csv(const Meta& meta, const std::vector<dimension::DimensionEstimate>& estimates,
                       const dimension::CorrelationIntegralCurve* curve,
                       const ConsistencySummary* consistency);
std::string cordim_doc(const Meta& meta, const std::vector<dimension::DimensionEstimate>& estimates,
                       const dimension::CorrelationIntegralCurve* curve,
                       const ConsistencySummary* consistency);

std::string localdim_csv(const Meta& meta, const LocaldimPayload& payload);
std::string localdim_doc(const Meta& meta, const LocaldimPayload& payload);

std::string energy_csv(const Meta& meta, const dimension::EnergyEstimate* single,
                       const dimension::EnergyBracket* bracket);
std::string energy_doc(const Meta& meta, const dimension::EnergyEstimate* single,
                       const dimension::EnergyBracket* bracket);

std::string cluster_csv(const Meta& meta, const geometry::ClusteringReport& report);
std::string cluster_doc(const Meta& meta, const geometry::ClusteringReport& report);

} // namespace morandim::emit

#endif
