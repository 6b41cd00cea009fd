#include "morandim/cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "morandim/config.hpp"
#include "morandim/dimension.hpp"
#include "morandim/emit.hpp"
#include "morandim/rng.hpp"

namespace morandim::cli {

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<int> n_max;
    std::optional<std::uint64_t> samples;
    std::optional<std::uint64_t> seed;
    std::optional<int> tail_window;
    std::optional<std::string> out_path;
    std::optional<std::string> format;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
    sub->add_option("--config", opts.config_path, "config file (JSON)")->required();
    sub->add_option("--n-max", opts.n_max, "override budgets.n_max");
    sub->add_option("--samples", opts.samples, "override budgets.samples");
    sub->add_option("--seed", opts.seed, "override budgets.seed");
    sub->add_option("--tail-window", opts.tail_window, "override budgets.tail_window");
    sub->add_option("--out", opts.out_path, "output path ('-' for stdout)");
    sub->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"csv", "doc"}));
}

config::RunConfig load(const CommonOpts& opts) {
    config::RunConfig cfg = config::parse_config_file(opts.config_path);
    if (opts.n_max) cfg.budgets.n_max = *opts.n_max;
    if (opts.samples) cfg.budgets.samples = *opts.samples;
    if (opts.seed) cfg.budgets.seed = *opts.seed;
    if (opts.tail_window) cfg.budgets.tail_window = *opts.tail_window;
    if (opts.out_path) cfg.output.path = *opts.out_path;
    if (opts.format) cfg.output.format = *opts.format;
    return cfg;
}

void write_output(const config::RunConfig& cfg, const std::string& text, std::ostream& out) {
    if (cfg.output.path == "-") {
        out << text;
        return;
    }
    std::ofstream f(cfg.output.path, std::ios::binary);
    if (!f) throw ConfigError("output path not writable: " + cfg.output.path);
    f << text;
}

emit::Meta make_meta(const config::RunConfig& cfg, const std::string& subcommand) {
    emit::Meta meta;
    meta.schema_version = cfg.schema_version;
    meta.subcommand = subcommand;
    meta.config_digest = cfg.digest;
    meta.seed = cfg.budgets.seed;
    return meta;
}

// Default truncation ladder: six rungs log-geometric between the minimal
// level-12 and level-26 diameters. Deep enough that a power-law divergence
// clears the critical log-law growth on real data, shallow enough that
// pair separations stay well above double rounding.
std::vector<double> effective_ladder(const config::RunConfig& cfg) {
    if (!cfg.budgets.epsilon_ladder.empty()) return cfg.budgets.epsilon_ladder;
    const double lo = cfg.geometry.log_min_diam(12);
    const double hi = cfg.geometry.log_min_diam(26);
    std::vector<double> ladder;
    for (int i = 0; i < 6; ++i) {
        ladder.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) / 5.0));
    }
    return ladder;
}

symbolic::Word parse_path_option(const std::string& text, const symbolic::SymbolSpaceSpec& space) {
    symbolic::Word word;
    if (text.find(',') != std::string::npos) {
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const std::size_t next = text.find(',', pos);
            const std::string tok = text.substr(pos, next == std::string::npos ? std::string::npos
                                                                               : next - pos);
            if (tok.empty()) throw ConfigError("path: empty symbol token");
            word.symbols.push_back(std::stoi(tok));
            if (next == std::string::npos) break;
            pos = next + 1;
        }
    } else {
        for (char c : text) {
            if (c < '0' || c > '9') {
                throw ConfigError("path: expected digits or a comma-separated symbol list");
            }
            word.symbols.push_back(c - '0');
        }
    }
    symbolic::validate_word(space, word);
    return word;
}

int cmd_validate(const config::RunConfig& cfg, std::ostream& out) {
    const int geom_depth = std::clamp(cfg.budgets.n_max, 1, 12);
    const geometry::ValidationReport geom_report = geometry::validate(cfg.geometry, geom_depth);
    const int filt_levels = std::max(cfg.budgets.n_max, 3);
    const filtration::GeneralFiltration filt =
        filtration::build_moran_filtration(cfg.geometry, filt_levels);
    const filtration::FiltrationReport filt_report = filtration::validate_filtration(filt);
    const emit::Meta meta = make_meta(cfg, "validate");
    write_output(cfg,
                 cfg.output.format == "csv" ? emit::validate_csv(meta, geom_report, filt_report)
                                            : emit::validate_doc(meta, geom_report, filt_report),
                 out);
    return (geom_report.exact_failure() || filt_report.exact_failure()) ? 1 : 0;
}

int cmd_cordim(const config::RunConfig& cfg, const std::string& route, std::ostream& out) {
    const emit::Meta meta = make_meta(cfg, "cordim");
    std::vector<dimension::DimensionEstimate> estimates;
    std::optional<dimension::CorrelationIntegralCurve> curve;
    std::optional<emit::ConsistencySummary> consistency;
    int exit_code = 0;

    if (route == "moran") {
        estimates.push_back(dimension::cordim_moran(cfg.measure, cfg.geometry, cfg.budgets.n_max,
                                                    cfg.budgets.tail_window));
    } else if (route == "filtration") {
        const filtration::GeneralFiltration filt =
            filtration::build_moran_filtration(cfg.geometry, cfg.budgets.n_max);
        estimates.push_back(
            dimension::cordim_filtration(cfg.measure, filt, cfg.budgets.tail_window));
    } else if (route == "paircount") {
        curve = dimension::cordim_paircount(cfg.measure, cfg.geometry, cfg.budgets.samples,
                                            cfg.budgets.depth, cfg.budgets.r_levels,
                                            rng::derive(cfg.budgets.seed, 1));
    } else { // all
        dimension::ConsistencyBudgets budgets;
        budgets.n_max = cfg.budgets.n_max;
        budgets.samples = cfg.budgets.samples;
        budgets.path_depth = cfg.budgets.depth;
        budgets.r_levels = cfg.budgets.r_levels;
        budgets.tail_window = cfg.budgets.tail_window;
        budgets.seed = cfg.budgets.seed;
        budgets.paths = cfg.budgets.paths;
        budgets.local_depth = cfg.budgets.local_depth;
        const dimension::ConsistencyReport report =
            dimension::consistency_check(cfg.measure, cfg.geometry, budgets);
        estimates.push_back(report.moran);
        estimates.push_back(report.filtration);
        curve = report.paircount;
        consistency = emit::ConsistencySummary{report.pass, report.failures, report.ldimh.value};
        exit_code = report.pass ? 0 : 1;
    }

    const auto* curve_ptr = curve ? &*curve : nullptr;
    const auto* cons_ptr = consistency ? &*consistency : nullptr;
    write_output(cfg,
                 cfg.output.format == "csv"
                     ? emit::cordim_csv(meta, estimates, curve_ptr, cons_ptr)
                     : emit::cordim_doc(meta, estimates, curve_ptr, cons_ptr),
                 out);
    return exit_code;
}

int cmd_localdim(const config::RunConfig& cfg, const std::optional<std::string>& path_text,
                 std::ostream& out) {
    const emit::Meta meta = make_meta(cfg, "localdim");
    emit::LocaldimPayload payload;
    const int w = cfg.budgets.tail_window;
    auto tail_of = [w](const std::vector<double>& seq) {
        const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(w), seq.size());
        return std::vector<double>(seq.end() - static_cast<std::ptrdiff_t>(k), seq.end());
    };

    if (path_text) {
        const symbolic::Word word = parse_path_option(*path_text, cfg.measure.space());
        const dimension::LocalDimensionSample sample =
            dimension::local_dim_sequence(cfg.measure, cfg.geometry, word, w);
        payload.rows.push_back(emit::LocaldimRow{emit::word_digest(word), sample.lower,
                                                 sample.upper, tail_of(sample.sequence)});
        payload.explicit_sequence = sample.sequence;
        payload.scale_regular = sample.scale_regular;
    } else {
        double essinf = 0.0;
        int argmin = 0;
        for (int i = 0; i < cfg.budgets.paths; ++i) {
            const symbolic::Word word = symbolic::sample_path(
                cfg.measure, rng::derive(cfg.budgets.seed, static_cast<std::uint64_t>(i)),
                cfg.budgets.local_depth);
            const dimension::LocalDimensionSample sample =
                dimension::local_dim_sequence(cfg.measure, cfg.geometry, word, w);
            payload.rows.push_back(emit::LocaldimRow{emit::word_digest(word), sample.lower,
                                                     sample.upper, tail_of(sample.sequence)});
            payload.scale_regular = sample.scale_regular;
            if (i == 0 || sample.lower < essinf) {
                essinf = sample.lower;
                argmin = i;
            }
        }
        payload.essinf = essinf;
        payload.argmin = argmin;
    }
    write_output(cfg,
                 cfg.output.format == "csv" ? emit::localdim_csv(meta, payload)
                                            : emit::localdim_doc(meta, payload),
                 out);
    return 0;
}

int cmd_energy(const config::RunConfig& cfg, const std::optional<double>& s, double s_lo,
               double s_hi, double tol, std::ostream& out) {
    const emit::Meta meta = make_meta(cfg, "energy");
    const std::vector<double> ladder = effective_ladder(cfg);
    if (s) {
        const dimension::EnergyEstimate est = dimension::energy_estimate(
            cfg.measure, cfg.geometry, *s, cfg.budgets.samples, ladder, cfg.budgets.seed);
        write_output(cfg,
                     cfg.output.format == "csv" ? emit::energy_csv(meta, &est, nullptr)
                                                : emit::energy_doc(meta, &est, nullptr),
                     out);
        return 0;
    }
    const dimension::EnergyBracket bracket = dimension::cordim_energy(
        cfg.measure, cfg.geometry, s_lo, s_hi, tol, cfg.budgets.samples, ladder, cfg.budgets.seed);
    write_output(cfg,
                 cfg.output.format == "csv" ? emit::energy_csv(meta, nullptr, &bracket)
                                            : emit::energy_doc(meta, nullptr, &bracket),
                 out);
    return 0;
}

int cmd_cluster(const config::RunConfig& cfg, std::ostream& out) {
    const emit::Meta meta = make_meta(cfg, "cluster");
    const geometry::ClusteringReport report =
        geometry::clustering_diagnostic(cfg.geometry, cfg.measure, cfg.budgets.paths,
                                        cfg.budgets.r_levels, cfg.budgets.seed, cfg.budgets.depth);
    write_output(cfg,
                 cfg.output.format == "csv" ? emit::cluster_csv(meta, report)
                                            : emit::cluster_doc(meta, report),
                 out);
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"correlation and local dimension estimators on interval Moran constructions"};
    app.name("morandim");
    app.require_subcommand(1);

    CommonOpts validate_opts;
    CLI::App* validate_cmd = app.add_subcommand("validate", "check structural conditions");
    add_common(validate_cmd, validate_opts);

    CommonOpts cordim_opts;
    std::string route = "all";
    CLI::App* cordim_cmd = app.add_subcommand("cordim", "correlation dimension estimates");
    add_common(cordim_cmd, cordim_opts);
    cordim_cmd->add_option("--route", route, "estimation route")
        ->check(CLI::IsMember({"moran", "filtration", "paircount", "all"}));

    CommonOpts localdim_opts;
    std::optional<std::string> path_text;
    CLI::App* localdim_cmd = app.add_subcommand("localdim", "local dimension along paths");
    add_common(localdim_cmd, localdim_opts);
    localdim_cmd->add_option("--path", path_text,
                             "explicit path (digits, or comma-separated symbols)");

    CommonOpts energy_opts;
    std::optional<double> energy_s;
    double s_lo = 0.0, s_hi = 1.0, tol = 0.05;
    CLI::App* energy_cmd = app.add_subcommand("energy", "truncated energy / divergence bracket");
    add_common(energy_cmd, energy_opts);
    energy_cmd->add_option("--s", energy_s, "single exponent to evaluate");
    energy_cmd->add_option("--s-lo", s_lo, "bisection lower bound");
    energy_cmd->add_option("--s-hi", s_hi, "bisection upper bound");
    energy_cmd->add_option("--tol", tol, "bisection bracket width");

    CommonOpts cluster_opts;
    CLI::App* cluster_cmd = app.add_subcommand("cluster", "finite clustering diagnostic");
    add_common(cluster_cmd, cluster_opts);

    std::vector<const char*> argv;
    argv.push_back("morandim");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "morandim: " << e.what() << "\n";
        return 2;
    }

    try {
        if (app.got_subcommand(validate_cmd)) return cmd_validate(load(validate_opts), out);
        if (app.got_subcommand(cordim_cmd)) return cmd_cordim(load(cordim_opts), route, out);
        if (app.got_subcommand(localdim_cmd)) {
            return cmd_localdim(load(localdim_opts), path_text, out);
        }
        if (app.got_subcommand(energy_cmd)) {
            return cmd_energy(load(energy_opts), energy_s, s_lo, s_hi, tol, out);
        }
        if (app.got_subcommand(cluster_cmd)) return cmd_cluster(load(cluster_opts), out);
        err << "morandim: no subcommand\n";
        return 2;
    } catch (const ConfigError& e) {
        err << "morandim: input error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidWordError& e) {
        err << "morandim: input error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetError& e) {
        err << "morandim: budget error: " << e.what() << "\n";
        return 2;
    } catch (const DepthError& e) {
        err << "morandim: depth error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "morandim: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "morandim: " << e.what() << "\n";
        return 1;
    }
}

} // namespace morandim::cli
