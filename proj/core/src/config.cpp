#include "morandim/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "morandim/emit.hpp"

namespace morandim::config {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

const json& require(const json& obj, const std::string& path, const char* key) {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "missing required field");
    return *it;
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> known) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) fail(path + "." + it.key(), "unknown field");
    }
}

double parse_real(const json& v, const std::string& path) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        const auto slash = s.find('/');
        if (slash != std::string::npos) {
            double num = 0.0, den = 0.0;
            const char* nb = s.data();
            const char* ne = s.data() + slash;
            const char* db = s.data() + slash + 1;
            const char* de = s.data() + s.size();
            auto r1 = std::from_chars(nb, ne, num);
            auto r2 = std::from_chars(db, de, den);
            if (r1.ec == std::errc() && r1.ptr == ne && r2.ec == std::errc() && r2.ptr == de &&
                den != 0.0) {
                return num / den;
            }
        }
        fail(path, "expected a number or a fraction string like \"1/3\" (got \"" + s + "\")");
    }
    fail(path, "expected a number");
}

std::vector<double> parse_real_vector(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(parse_real(v[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<std::vector<double>> parse_vector_table(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of arrays");
    std::vector<std::vector<double>> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(parse_real_vector(v[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<int> parse_int_vector(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of integers");
    std::vector<int> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        if (!v[i].is_number_integer()) fail(p, "expected an integer");
        out.push_back(v[i].get<int>());
    }
    return out;
}

std::int64_t parse_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<std::int64_t>();
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    reject_unknown(root, "config",
                   {"schema_version", "construction", "measure", "budgets", "output"});

    const std::int64_t version = parse_int(require(root, "config", "schema_version"), "schema_version");
    if (version != 1) fail("schema_version", "unsupported version " + std::to_string(version));

    // construction
    const json& construction = require(root, "config", "construction");
    reject_unknown(construction, "construction", {"alphabets", "ratios", "layout"});
    const json& alphabets = require(construction, "construction", "alphabets");
    reject_unknown(alphabets, "construction.alphabets", {"preperiod", "period"});
    std::vector<int> alpha_pre = parse_int_vector(require(alphabets, "construction.alphabets", "preperiod"),
                                                  "construction.alphabets.preperiod");
    std::vector<int> alpha_per = parse_int_vector(require(alphabets, "construction.alphabets", "period"),
                                                  "construction.alphabets.period");

    const json& ratios = require(construction, "construction", "ratios");
    reject_unknown(ratios, "construction.ratios", {"preperiod", "period"});
    auto ratio_pre = parse_vector_table(require(ratios, "construction.ratios", "preperiod"),
                                        "construction.ratios.preperiod");
    auto ratio_per = parse_vector_table(require(ratios, "construction.ratios", "period"),
                                        "construction.ratios.period");

    const json& layout = require(construction, "construction", "layout");

    // measure
    const json& measure_block = require(root, "config", "measure");
    reject_unknown(measure_block, "measure", {"preperiod", "period"});
    auto measure_pre = parse_vector_table(require(measure_block, "measure", "preperiod"),
                                          "measure.preperiod");
    auto measure_per = parse_vector_table(require(measure_block, "measure", "period"),
                                          "measure.period");

    // budgets
    BudgetConfig budgets;
    if (auto it = root.find("budgets"); it != root.end()) {
        const json& b = *it;
        reject_unknown(b, "budgets",
                       {"n_max", "samples", "depth", "local_depth", "r_levels", "tail_window",
                        "seed", "paths", "epsilon_ladder"});
        if (b.contains("n_max")) budgets.n_max = static_cast<int>(parse_int(b["n_max"], "budgets.n_max"));
        if (b.contains("samples")) {
            const std::int64_t v = parse_int(b["samples"], "budgets.samples");
            if (v < 0) fail("budgets.samples", "must be >= 0");
            budgets.samples = static_cast<std::uint64_t>(v);
        }
        if (b.contains("depth")) budgets.depth = static_cast<int>(parse_int(b["depth"], "budgets.depth"));
        if (b.contains("local_depth")) {
            budgets.local_depth = static_cast<int>(parse_int(b["local_depth"], "budgets.local_depth"));
        }
        if (b.contains("r_levels")) {
            budgets.r_levels = static_cast<int>(parse_int(b["r_levels"], "budgets.r_levels"));
        }
        if (b.contains("tail_window")) {
            budgets.tail_window = static_cast<int>(parse_int(b["tail_window"], "budgets.tail_window"));
        }
        if (b.contains("seed")) {
            const std::int64_t v = parse_int(b["seed"], "budgets.seed");
            if (v < 0) fail("budgets.seed", "must be >= 0");
            budgets.seed = static_cast<std::uint64_t>(v);
        }
        if (b.contains("paths")) budgets.paths = static_cast<int>(parse_int(b["paths"], "budgets.paths"));
        if (b.contains("epsilon_ladder")) {
            budgets.epsilon_ladder = parse_real_vector(b["epsilon_ladder"], "budgets.epsilon_ladder");
        }
    }

    // output
    OutputConfig output;
    if (auto it = root.find("output"); it != root.end()) {
        const json& o = *it;
        reject_unknown(o, "output", {"format", "path"});
        if (o.contains("format")) {
            if (!o["format"].is_string()) fail("output.format", "expected a string");
            output.format = o["format"].get<std::string>();
            if (output.format != "doc" && output.format != "csv") {
                fail("output.format", "expected \"doc\" or \"csv\"");
            }
        }
        if (o.contains("path")) {
            if (!o["path"].is_string()) fail("output.path", "expected a string");
            output.path = o["path"].get<std::string>();
        }
    }

    try {
        symbolic::SymbolSpaceSpec space(alpha_pre, alpha_per);
        symbolic::SymbolSpaceSpec space_for_geom = space;

        symbolic::ProductMeasureSpec measure(std::move(space), std::move(measure_pre),
                                             std::move(measure_per));

        if (layout.is_string() && layout.get<std::string>() == "uniform-gaps") {
            geometry::MoranGeometrySpec geom(std::move(space_for_geom), std::move(ratio_pre),
                                             std::move(ratio_per));
            return RunConfig(1, std::move(measure), std::move(geom), std::move(budgets),
                             std::move(output), emit::fnv1a_hex(text));
        }
        if (layout.is_object()) {
            reject_unknown(layout, "construction.layout", {"offsets"});
            const json& offsets = require(layout, "construction.layout", "offsets");
            reject_unknown(offsets, "construction.layout.offsets", {"preperiod", "period"});
            auto off_pre = parse_vector_table(require(offsets, "construction.layout.offsets", "preperiod"),
                                              "construction.layout.offsets.preperiod");
            auto off_per = parse_vector_table(require(offsets, "construction.layout.offsets", "period"),
                                              "construction.layout.offsets.period");
            geometry::MoranGeometrySpec geom(std::move(space_for_geom), std::move(ratio_pre),
                                             std::move(ratio_per), std::move(off_pre),
                                             std::move(off_per));
            return RunConfig(1, std::move(measure), std::move(geom), std::move(budgets),
                             std::move(output), emit::fnv1a_hex(text));
        }
        fail("construction.layout", "expected \"uniform-gaps\" or an object with offsets");
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config file not readable: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

} // namespace morandim::config
