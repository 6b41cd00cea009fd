#include "morandim/emit.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace morandim::emit {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json meta_json(const Meta& meta) {
    ordered_json j;
    j["schema_version"] = meta.schema_version;
    j["subcommand"] = meta.subcommand;
    j["config_digest"] = meta.config_digest;
    j["seed"] = meta.seed;
    return j;
}

std::string header_comment(const Meta& meta) {
    std::ostringstream out;
    out << "# morandim " << meta.subcommand << "\n"
        << "# schema_version=" << meta.schema_version << " config=" << meta.config_digest
        << " seed=" << meta.seed << "\n";
    return out.str();
}

ordered_json trend_json(const geometry::TrendSummary& t) {
    ordered_json j;
    j["ratios"] = t.ratios;
    j["tail_gap"] = t.tail_gap;
    j["tail_movement"] = t.tail_movement;
    j["violation"] = t.violation;
    return j;
}

ordered_json condition_json(const geometry::ConditionEntry& e) {
    ordered_json j;
    j["condition"] = e.condition;
    j["status"] = geometry::to_string(e.status);
    j["checked_depth"] = e.checked_depth;
    if (!e.witnesses.empty()) {
        ordered_json w = ordered_json::array();
        for (const auto& word : e.witnesses) w.push_back(word.to_string());
        j["witnesses"] = w;
    }
    if (!e.detail.empty()) j["detail"] = e.detail;
    if (!e.constants.empty()) {
        ordered_json c;
        for (const auto& [k, v] : e.constants) c[k] = v;
        j["constants"] = c;
    }
    if (e.status == geometry::CheckStatus::Trend) j["trend"] = trend_json(e.trend);
    return j;
}

ordered_json estimate_json(const dimension::DimensionEstimate& est) {
    ordered_json j;
    j["route"] = dimension::to_string(est.route);
    j["value"] = est.value;
    j["tail_window"] = est.tail_window;
    ordered_json seq = ordered_json::array();
    for (std::size_t n = 0; n < est.sequence.size(); ++n) {
        ordered_json row;
        row["n"] = n + 1;
        row["sum_log"] = est.numer_log[n];
        row["denom_log"] = est.denom_log[n];
        row["a_n"] = est.sequence[n];
        seq.push_back(row);
    }
    j["sequence"] = seq;
    ordered_json diag;
    diag["tail_variance"] = est.diagnostics.tail_variance;
    diag["window_min"] = est.diagnostics.window_min;
    diag["window_max"] = est.diagnostics.window_max;
    j["diagnostics"] = diag;
    if (!est.warnings.empty()) j["warnings"] = est.warnings;
    return j;
}

ordered_json curve_json(const dimension::CorrelationIntegralCurve& curve) {
    ordered_json j;
    j["route"] = "paircount";
    j["slope"] = curve.slope;
    j["slope_stderr"] = curve.slope_stderr;
    j["n_samples"] = curve.n_samples;
    j["fit_first"] = curve.fit_first;
    j["fit_last"] = curve.fit_last;
    ordered_json seq = ordered_json::array();
    for (std::size_t k = 0; k < curve.r.size(); ++k) {
        ordered_json row;
        row["n"] = k + 1;
        row["r"] = curve.r[k];
        row["estimate"] = curve.estimate[k];
        row["pairs"] = curve.pair_counts[k];
        seq.push_back(row);
    }
    j["sequence"] = seq;
    if (!curve.local_slopes.empty()) j["local_slopes"] = curve.local_slopes;
    if (!curve.dropped.empty()) j["dropped"] = curve.dropped;
    if (!curve.warnings.empty()) j["warnings"] = curve.warnings;
    return j;
}

void append_estimate_csv(std::ostringstream& out, const dimension::DimensionEstimate& est) {
    out << "# route=" << dimension::to_string(est.route) << " value=" << format_double(est.value)
        << " tail_window=" << est.tail_window << "\n";
    for (const auto& w : est.warnings) out << "# warning: " << w << "\n";
    out << "n,sum_log,denom_log,a_n\n";
    for (std::size_t n = 0; n < est.sequence.size(); ++n) {
        out << n + 1 << ',' << format_double(est.numer_log[n]) << ','
            << format_double(est.denom_log[n]) << ',' << format_double(est.sequence[n]) << "\n";
    }
}

void append_curve_csv(std::ostringstream& out, const dimension::CorrelationIntegralCurve& curve) {
    out << "# route=paircount slope=" << format_double(curve.slope)
        << " stderr=" << format_double(curve.slope_stderr) << " n_samples=" << curve.n_samples
        << " fit_first=" << curve.fit_first << " fit_last=" << curve.fit_last << "\n";
    for (const auto& w : curve.warnings) out << "# warning: " << w << "\n";
    out << "n,sum_log,denom_log,a_n\n";
    for (std::size_t k = 0; k < curve.r.size(); ++k) {
        const double sum_log = std::log(curve.estimate[k]);
        const double denom_log = std::log(curve.r[k]);
        out << k + 1 << ',' << format_double(sum_log) << ',' << format_double(denom_log) << ','
            << format_double(sum_log == 0.0 ? 0.0 : sum_log / denom_log) << "\n";
    }
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = digits[h & 0xf];
        h >>= 4;
    }
    return std::string(buf, 16);
}

std::string word_digest(const symbolic::Word& word) {
    std::string bytes;
    bytes.reserve(word.symbols.size() * 4);
    for (int s : word.symbols) {
        for (int b = 0; b < 4; ++b) bytes.push_back(static_cast<char>((s >> (8 * b)) & 0xff));
    }
    return fnv1a_hex(bytes);
}

std::string csv_field(const std::string& raw) {
    if (raw.find_first_of(",\"\n") == std::string::npos) return raw;
    std::string out = "\"";
    for (char c : raw) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string validate_csv(const Meta& meta, const geometry::ValidationReport& geom_report,
                         const filtration::FiltrationReport& filt_report) {
    std::ostringstream out;
    out << header_comment(meta);
    out << "# depth=" << geom_report.depth << " truncated=" << (geom_report.truncated ? 1 : 0)
        << "\n";
    out << "condition,status,detail\n";
    auto row = [&out](const geometry::ConditionEntry& e) {
        std::string detail = e.detail;
        if (e.status == geometry::CheckStatus::Trend && !e.trend.ratios.empty()) {
            detail += " [tail_ratio=" + format_double(e.trend.ratios.back()) +
                      " violation=" + (e.trend.violation ? "true" : "false") + "]";
        }
        if (!e.witnesses.empty()) {
            detail += " witnesses:";
            for (const auto& w : e.witnesses) detail += " " + w.to_string();
        }
        out << e.condition << ',' << geometry::to_string(e.status) << ',' << csv_field(detail)
            << "\n";
    };
    for (const auto& e : geom_report.entries) row(e);
    for (const auto& e : filt_report.entries) row(e);
    out << "# exact_failure="
        << ((geom_report.exact_failure() || filt_report.exact_failure()) ? "true" : "false")
        << " verdict=" << filt_report.verdict << "\n";
    return out.str();
}

std::string validate_doc(const Meta& meta, const geometry::ValidationReport& geom_report,
                         const filtration::FiltrationReport& filt_report) {
    ordered_json j = meta_json(meta);
    ordered_json g;
    g["depth"] = geom_report.depth;
    g["truncated"] = geom_report.truncated;
    ordered_json entries = ordered_json::array();
    for (const auto& e : geom_report.entries) entries.push_back(condition_json(e));
    g["conditions"] = entries;
    g["exact_failure"] = geom_report.exact_failure();
    j["construction"] = g;
    ordered_json f;
    ordered_json fentries = ordered_json::array();
    for (const auto& e : filt_report.entries) fentries.push_back(condition_json(e));
    f["conditions"] = fentries;
    f["verdict"] = filt_report.verdict;
    f["exact_failure"] = filt_report.exact_failure();
    j["filtration"] = f;
    return j.dump(2) + "\n";
}

std::string cordim_csv(const Meta& meta, const std::vector<dimension::DimensionEstimate>& estimates,
                       const dimension::CorrelationIntegralCurve* curve,
                       const ConsistencySummary* consistency) {
    std::ostringstream out;
    out << header_comment(meta);
    for (const auto& est : estimates) append_estimate_csv(out, est);
    if (curve) append_curve_csv(out, *curve);
    if (consistency) {
        out << "# ldimh=" << format_double(consistency->ldimh) << "\n";
        out << "# consistency=" << (consistency->pass ? "pass" : "fail") << "\n";
        for (const auto& f : consistency->failures) out << "# failure: " << f << "\n";
    }
    return out.str();
}

std::string cordim_doc(const Meta& meta, const std::vector<dimension::DimensionEstimate>& estimates,
                       const dimension::CorrelationIntegralCurve* curve,
                       const ConsistencySummary* consistency) {
    ordered_json j = meta_json(meta);
    ordered_json routes = ordered_json::array();
    for (const auto& est : estimates) routes.push_back(estimate_json(est));
    if (curve) routes.push_back(curve_json(*curve));
    j["routes"] = routes;
    if (consistency) {
        ordered_json c;
        c["ldimh"] = consistency->ldimh;
        c["pass"] = consistency->pass;
        if (!consistency->failures.empty()) c["failures"] = consistency->failures;
        j["consistency"] = c;
    }
    return j.dump(2) + "\n";
}

std::string localdim_csv(const Meta& meta, const LocaldimPayload& payload) {
    std::ostringstream out;
    out << header_comment(meta);
    out << "path_digest,lower,upper\n";
    for (const auto& row : payload.rows) {
        out << row.digest << ',' << format_double(row.lower) << ',' << format_double(row.upper)
            << "\n";
    }
    if (payload.essinf) {
        out << "# essinf=" << format_double(*payload.essinf) << " argmin=" << *payload.argmin
            << "\n";
    }
    out << "# scale_regular=" << (payload.scale_regular ? "true" : "false") << "\n";
    return out.str();
}

std::string localdim_doc(const Meta& meta, const LocaldimPayload& payload) {
    ordered_json j = meta_json(meta);
    ordered_json rows = ordered_json::array();
    for (const auto& row : payload.rows) {
        ordered_json r;
        r["path_digest"] = row.digest;
        r["lower"] = row.lower;
        r["upper"] = row.upper;
        r["tail_sequence"] = row.tail_sequence;
        rows.push_back(r);
    }
    j["paths"] = rows;
    if (payload.essinf) {
        j["essinf"] = *payload.essinf;
        j["argmin_path"] = *payload.argmin;
    }
    j["scale_regular"] = payload.scale_regular;
    if (!payload.explicit_sequence.empty()) j["sequence"] = payload.explicit_sequence;
    return j.dump(2) + "\n";
}

std::string energy_csv(const Meta& meta, const dimension::EnergyEstimate* single,
                       const dimension::EnergyBracket* bracket) {
    std::ostringstream out;
    out << header_comment(meta);
    if (single) {
        out << "epsilon,value,std_error,excluded_mass\n";
        for (std::size_t i = 0; i < single->epsilon.size(); ++i) {
            out << format_double(single->epsilon[i]) << ',' << format_double(single->value[i])
                << ',' << format_double(single->std_error[i]) << ','
                << format_double(single->excluded_mass[i]) << "\n";
        }
        out << "# s=" << format_double(single->s) << " n_samples=" << single->n_samples
            << " divergence_flag=" << (single->divergence_flag ? "true" : "false")
            << " observed_growth=" << format_double(single->observed_growth)
            << " critical_growth=" << format_double(single->critical_growth) << "\n";
    }
    if (bracket) {
        out << "s,flag,observed_growth,critical_growth\n";
        for (const auto& e : bracket->evals) {
            out << format_double(e.s) << ',' << (e.flag ? "true" : "false") << ','
                << format_double(e.observed_growth) << ',' << format_double(e.critical_growth)
                << "\n";
        }
        out << "# bracket_lo=" << format_double(bracket->lo)
            << " bracket_hi=" << format_double(bracket->hi) << "\n";
    }
    return out.str();
}

std::string energy_doc(const Meta& meta, const dimension::EnergyEstimate* single,
                       const dimension::EnergyBracket* bracket) {
    ordered_json j = meta_json(meta);
    if (single) {
        ordered_json e;
        e["s"] = single->s;
        e["n_samples"] = single->n_samples;
        ordered_json ladder = ordered_json::array();
        for (std::size_t i = 0; i < single->epsilon.size(); ++i) {
            ordered_json rung;
            rung["epsilon"] = single->epsilon[i];
            rung["value"] = single->value[i];
            rung["std_error"] = single->std_error[i];
            rung["excluded_mass"] = single->excluded_mass[i];
            ladder.push_back(rung);
        }
        e["ladder"] = ladder;
        e["divergence_flag"] = single->divergence_flag;
        e["observed_growth"] = single->observed_growth;
        e["critical_growth"] = single->critical_growth;
        j["energy"] = e;
    }
    if (bracket) {
        ordered_json b;
        b["lo"] = bracket->lo;
        b["hi"] = bracket->hi;
        ordered_json evals = ordered_json::array();
        for (const auto& e : bracket->evals) {
            ordered_json row;
            row["s"] = e.s;
            row["flag"] = e.flag;
            row["observed_growth"] = e.observed_growth;
            row["critical_growth"] = e.critical_growth;
            evals.push_back(row);
        }
        b["evals"] = evals;
        j["bracket"] = b;
    }
    return j.dump(2) + "\n";
}

std::string cluster_csv(const Meta& meta, const geometry::ClusteringReport& report) {
    std::ostringstream out;
    out << header_comment(meta);
    out << "k,r,max_count\n";
    for (std::size_t k = 0; k < report.r_grid.size(); ++k) {
        out << k + 1 << ',' << format_double(report.r_grid[k]) << ',' << report.max_per_r[k]
            << "\n";
    }
    out << "# sup_estimate=" << report.sup_estimate << " n_points=" << report.points.size()
        << "\n";
    return out.str();
}

std::string cluster_doc(const Meta& meta, const geometry::ClusteringReport& report) {
    ordered_json j = meta_json(meta);
    ordered_json c;
    c["r_grid"] = report.r_grid;
    c["points"] = report.points;
    c["counts"] = report.counts;
    c["max_per_r"] = report.max_per_r;
    c["sup_estimate"] = report.sup_estimate;
    j["clustering"] = c;
    return j.dump(2) + "\n";
}

} // namespace morandim::emit
