// Command-line front end: validate panels, fit weights, estimate effects,
// test hypotheses, invert tests into intervals, run simulation studies, and
// dump plot-ready tables. Every output is written with round-trip number
// formatting and no timestamps, so identical invocations produce identical
// bytes.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ssc/config.hpp"
#include "ssc/dgp.hpp"
#include "ssc/errors.hpp"
#include "ssc/estimator.hpp"
#include "ssc/inference.hpp"
#include "ssc/mc.hpp"
#include "ssc/panel.hpp"
#include "ssc/table.hpp"
#include "ssc/version.hpp"
#include "ssc/weights.hpp"

namespace {

namespace fs = std::filesystem;

int exit_code_for(ssc::ErrorCode code) {
    using ssc::ErrorCode;
    switch (code) {
        case ErrorCode::ParseError:
        case ErrorCode::InvalidConfig:
        case ErrorCode::InvalidInput:
        case ErrorCode::IoError:
            return 2;
        case ErrorCode::MissingCell:
        case ErrorCode::DuplicateCell:
        case ErrorCode::NonAbsorbing:
        case ErrorCode::NoPrePeriod:
        case ErrorCode::NoTreatedUnit:
            return 3;
        case ErrorCode::NotInvertible:
            return 4;
        case ErrorCode::EmptyEventTime:
        case ErrorCode::EmptyGroup:
        case ErrorCode::OverlappingGroups:
        case ErrorCode::DimensionMismatch:
            return 5;
        case ErrorCode::WindowTooShort:
        case ErrorCode::InfeasibleLevel:
        case ErrorCode::GridError:
            return 6;
        case ErrorCode::InvalidDGP:
        case ErrorCode::InvalidPlan:
            return 7;
        case ErrorCode::MissingFit:
            return 8;
    }
    return 1;
}

// Options shared by the estimation-flavored subcommands.
struct CommonOptions {
    std::string panel_path;
    std::string out_dir;
    double alpha = 0.10;
    std::string mode = "plugin";
    std::string normalization = "paper";
    double rcond_min = 1e-10;
    double tol = 1e-10;
    unsigned threads = 0;
};

ssc::EstimatorMode parse_mode(const std::string& name) {
    if (name == "plugin") return ssc::EstimatorMode::PlugIn;
    if (name == "leave_half_out") return ssc::EstimatorMode::LeaveHalfOut;
    ssc::fail(ssc::ErrorCode::InvalidInput,
              "estimator mode must be plugin or leave_half_out, got '" + name + "'");
}

ssc::Normalization parse_normalization(const std::string& name) {
    if (name == "paper") return ssc::Normalization::Paper;
    if (name == "empirical") return ssc::Normalization::Empirical;
    ssc::fail(ssc::ErrorCode::InvalidInput,
              "normalization must be paper or empirical, got '" + name + "'");
}

void ensure_out_dir(const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        ssc::fail(ssc::ErrorCode::IoError,
                  "cannot create output directory '" + out_dir + "': " + ec.message());
    }
}

// --out wins; otherwise the SSC_OUT environment variable names the directory.
std::string resolve_out_dir(const std::string& explicit_dir) {
    if (!explicit_dir.empty()) return explicit_dir;
    if (const char* env = std::getenv("SSC_OUT")) {
        if (*env != '\0') return env;
    }
    ssc::fail(ssc::ErrorCode::InvalidInput,
              "no output directory: pass --out or set SSC_OUT");
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

// Manifests record what produced the directory's files. Keys are written in
// a fixed order and values contain no timestamps or machine identifiers.
class Manifest {
public:
    explicit Manifest(const std::string& subcommand) {
        add("tool", "ssc");
        add("version", ssc::kVersion);
        add("subcommand", subcommand);
    }

    void add(const std::string& key, const std::string& value) {
        lines_.push_back(key + " = " + value);
    }
    void add(const std::string& key, double value) {
        add(key, ssc::format_double(value));
    }
    void add(const std::string& key, int value) { add(key, std::to_string(value)); }
    void add_output(const std::string& name) { outputs_.push_back(name); }

    void write(const std::string& out_dir) const {
        std::ostringstream text;
        for (const auto& line : lines_) text << line << '\n';
        for (const auto& name : outputs_) text << "output = " << name << '\n';
        ssc::write_text_file(join_path(out_dir, "manifest.txt"), text.str());
    }

private:
    std::vector<std::string> lines_;
    std::vector<std::string> outputs_;
};

void emit_weights(const std::string& out_dir, const ssc::Panel& panel,
                  const ssc::WeightModel& model) {
    ssc::Table weights;
    weights.header = {"unit", "donor", "weight", "intercept", "objective"};
    for (int i = 0; i < panel.n_units(); ++i) {
        const auto& fit = model.units[static_cast<std::size_t>(i)];
        for (int j = 0; j < panel.n_units(); ++j) {
            if (j == i) continue;
            weights.rows.push_back({panel.unit_ids[i], panel.unit_ids[j],
                                    ssc::format_double(fit.weights(j)),
                                    ssc::format_double(fit.intercept),
                                    ssc::format_double(fit.objective)});
        }
    }
    ssc::write_table_file(join_path(out_dir, "weights.csv"), weights);

    ssc::Table diag;
    diag.header = {"unit", "objective", "kkt_gap", "iterations", "converged",
                   "non_unique"};
    for (int i = 0; i < panel.n_units(); ++i) {
        const auto& fit = model.units[static_cast<std::size_t>(i)];
        diag.rows.push_back({panel.unit_ids[i], ssc::format_double(fit.objective),
                             ssc::format_double(fit.kkt_gap),
                             std::to_string(fit.iterations),
                             fit.converged ? "1" : "0", fit.non_unique ? "1" : "0"});
    }
    ssc::write_table_file(join_path(out_dir, "fit_diagnostics.csv"), diag);
}

void emit_tau(const std::string& out_dir, const ssc::Panel& panel,
              const ssc::TauEstimate& tau) {
    ssc::Table table;
    table.header = {"cell_unit", "cell_period", "event_time", "tau_hat"};
    for (int k = 0; k < tau.index.size(); ++k) {
        const auto& cell = tau.index.cells[static_cast<std::size_t>(k)];
        table.rows.push_back({panel.unit_ids[cell.unit], panel.period_ids[cell.period],
                              std::to_string(tau.index.horizon(k)),
                              ssc::format_double(tau.tau_hat(k))});
    }
    ssc::write_table_file(join_path(out_dir, "tau.csv"), table);
}

void emit_att(const std::string& out_dir, const ssc::AttPath& path) {
    ssc::Table table;
    table.header = {"s", "n_s", "att_hat"};
    for (std::size_t h = 0; h < path.horizons.size(); ++h) {
        table.rows.push_back({std::to_string(path.horizons[h]),
                              std::to_string(path.counts[h]),
                              ssc::format_double(path.estimates(static_cast<int>(h)))});
    }
    ssc::write_table_file(join_path(out_dir, "att.csv"), table);
}

void emit_draws(const std::string& out_dir, const std::vector<double>& draws) {
    ssc::Table table;
    table.header = {"window", "statistic"};
    for (std::size_t t = 0; t < draws.size(); ++t) {
        table.rows.push_back({std::to_string(t + 1), ssc::format_double(draws[t])});
    }
    ssc::write_table_file(join_path(out_dir, "draws.csv"), table);
}

void emit_draw_histogram(const std::string& out_dir,
                         const std::vector<double>& draws) {
    ssc::Table table;
    table.header = {"bin_lo", "bin_hi", "count"};
    double hi = 0.0;
    for (double d : draws) hi = std::max(hi, d);
    const int bins = 20;
    double width = hi > 0.0 ? hi / bins : 1.0;
    std::vector<int> counts(bins, 0);
    for (double d : draws) {
        int b = width > 0.0 ? static_cast<int>(d / width) : 0;
        b = std::min(std::max(b, 0), bins - 1);
        ++counts[static_cast<std::size_t>(b)];
    }
    for (int b = 0; b < bins; ++b) {
        table.rows.push_back({ssc::format_double(b * width),
                              ssc::format_double((b + 1) * width),
                              std::to_string(counts[static_cast<std::size_t>(b)])});
    }
    ssc::write_table_file(join_path(out_dir, "draw_hist.csv"), table);
}

struct LoadedPanel {
    ssc::Panel panel;
    ssc::EffectIndex index;
    ssc::WeightModel model;
    ssc::TauEstimate tau;
};

LoadedPanel load_and_fit(const CommonOptions& common) {
    LoadedPanel out;
    out.panel = ssc::read_panel_csv(common.panel_path);
    out.index = ssc::build_effect_index(out.panel);
    ssc::FitOptions fit_options;
    fit_options.tol = common.tol;
    fit_options.threads = common.threads;
    out.model = ssc::fit_all(out.panel, fit_options);
    out.tau = ssc::estimate_tau(out.panel, out.index, out.model, common.rcond_min);
    return out;
}

void add_common_options(CLI::App* cmd, CommonOptions* common, bool with_inference) {
    cmd->add_option("--panel", common->panel_path, "panel csv (unit,time,outcome,treated)")
        ->required();
    cmd->add_option("--out", common->out_dir, "output directory (default: $SSC_OUT)");
    cmd->add_option("--tol", common->tol, "weight solver stationarity tolerance");
    cmd->add_option("--threads", common->threads, "worker threads (0 = all cores)");
    cmd->add_option("--rcond-min", common->rcond_min,
                    "invertibility threshold for the effect gram matrix");
    if (with_inference) {
        cmd->add_option("--alpha", common->alpha, "test level (default 0.10)");
        cmd->add_option("--mode", common->mode,
                        "rolling estimator mode: plugin or leave_half_out");
        cmd->add_option("--normalization", common->normalization,
                        "null distribution divisor: paper or empirical");
    }
}

void manifest_common(Manifest* manifest, const CommonOptions& common,
                     bool with_inference) {
    manifest->add("panel", common.panel_path);
    manifest->add("tol", common.tol);
    manifest->add("rcond_min", common.rcond_min);
    if (with_inference) {
        manifest->add("alpha", common.alpha);
        manifest->add("mode", common.mode);
        manifest->add("normalization", common.normalization);
    }
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

int cmd_ingest(const CommonOptions& common) {
    const std::string out_dir = resolve_out_dir(common.out_dir);
    ensure_out_dir(out_dir);
    ssc::Panel panel = ssc::read_panel_csv(common.panel_path);
    ssc::write_panel_csv(join_path(out_dir, "panel.csv"), panel);

    Manifest manifest("ingest");
    manifest.add("panel", common.panel_path);
    manifest.add("units", panel.n_units());
    manifest.add("periods", panel.n_periods());
    manifest.add("pre_periods", panel.pre_periods);
    manifest.add("post_periods", panel.post_periods);
    manifest.add_output("panel.csv");
    manifest.write(out_dir);
    return 0;
}

int cmd_fit(const CommonOptions& common) {
    const std::string out_dir = resolve_out_dir(common.out_dir);
    ensure_out_dir(out_dir);
    LoadedPanel loaded = load_and_fit(common);
    emit_weights(out_dir, loaded.panel, loaded.model);
    emit_tau(out_dir, loaded.panel, loaded.tau);
    emit_att(out_dir, ssc::att_path(loaded.tau));

    Manifest manifest("fit");
    manifest_common(&manifest, common, false);
    manifest.add("units", loaded.panel.n_units());
    manifest.add("pre_periods", loaded.panel.pre_periods);
    manifest.add_output("weights.csv");
    manifest.add_output("fit_diagnostics.csv");
    manifest.add_output("tau.csv");
    manifest.add_output("att.csv");
    manifest.write(out_dir);
    return 0;
}

struct TestOptions {
    int att_s = 1;
    double null_value = 0.0;
    std::vector<std::string> contrast;  // two comma-delimited unit lists
    int horizon = 1;
    std::string matrix_path;
};

std::string trim_copy(const std::string& text) {
    std::size_t lo = text.find_first_not_of(" \t");
    if (lo == std::string::npos) return "";
    std::size_t hi = text.find_last_not_of(" \t");
    return text.substr(lo, hi - lo + 1);
}

std::vector<std::string> split_unit_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream fields(text);
    std::string field;
    while (std::getline(fields, field, ',')) {
        std::string label = trim_copy(field);
        if (!label.empty()) out.push_back(label);
    }
    return out;
}

// A hypothesis file holds comma-delimited rows with no header: each row is
// one linear restriction, the coefficient per treated cell (in tau.csv order)
// followed by the null value.
ssc::HypothesisSpec read_hypothesis_matrix(const std::string& path,
                                           int n_effects) {
    std::string text = ssc::read_text_file(path);
    std::vector<std::vector<double>> rows;
    std::istringstream lines(text);
    std::string line;
    int line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string body = trim_copy(line);
        if (body.empty() || body[0] == '#') continue;
        std::vector<double> row;
        std::stringstream fields(line);
        std::string field;
        while (std::getline(fields, field, ',')) {
            row.push_back(ssc::parse_double(trim_copy(field)));
        }
        if (static_cast<int>(row.size()) != n_effects + 1) {
            ssc::fail(ssc::ErrorCode::DimensionMismatch,
                      "hypothesis file '" + path + "' line " +
                          std::to_string(line_no) + " has " +
                          std::to_string(row.size()) + " values; expected " +
                          std::to_string(n_effects) +
                          " coefficients plus a null value");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        ssc::fail(ssc::ErrorCode::DimensionMismatch,
                  "hypothesis file '" + path + "' contains no restriction rows");
    }
    ssc::HypothesisSpec spec;
    spec.C.resize(static_cast<int>(rows.size()), n_effects);
    spec.d.resize(static_cast<int>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (int k = 0; k < n_effects; ++k) {
            spec.C(static_cast<int>(r), k) = rows[r][static_cast<std::size_t>(k)];
        }
        spec.d(static_cast<int>(r)) = rows[r][static_cast<std::size_t>(n_effects)];
    }
    spec.label = "restrictions(" + std::to_string(rows.size()) + ") from " + path;
    return spec;
}

int cmd_test(const CommonOptions& common, const TestOptions& options) {
    const std::string out_dir = resolve_out_dir(common.out_dir);
    ensure_out_dir(out_dir);
    LoadedPanel loaded = load_and_fit(common);

    ssc::HypothesisSpec hypothesis;
    if (!options.matrix_path.empty()) {
        hypothesis = read_hypothesis_matrix(options.matrix_path,
                                            loaded.index.size());
    } else if (!options.contrast.empty()) {
        hypothesis = ssc::policy_contrast(loaded.panel, loaded.index,
                                          split_unit_list(options.contrast[0]),
                                          split_unit_list(options.contrast[1]),
                                          options.horizon);
    } else {
        hypothesis =
            ssc::att_hypothesis(loaded.index, options.att_s, options.null_value);
    }

    ssc::TestResult result = ssc::run_test(
        loaded.panel, loaded.index, loaded.model, loaded.tau, hypothesis,
        common.alpha, parse_mode(common.mode),
        parse_normalization(common.normalization), common.rcond_min,
        common.threads);

    emit_weights(out_dir, loaded.panel, loaded.model);
    emit_tau(out_dir, loaded.panel, loaded.tau);
    emit_att(out_dir, ssc::att_path(loaded.tau));
    emit_draws(out_dir, result.draws);
    emit_draw_histogram(out_dir, result.draws);

    std::ostringstream report;
    report << "hypothesis: " << result.hypothesis << "\n";
    report << "statistic: " << ssc::format_double(result.statistic) << "\n";
    report << "critical_value: " << ssc::format_double(result.critical_value)
           << "\n";
    report << "alpha: " << ssc::format_double(result.alpha) << "\n";
    report << "p_value: " << ssc::format_double(result.p_value) << "\n";
    report << "decision: " << (result.reject ? "reject" : "fail_to_reject") << "\n";
    report << "estimator_mode: " << ssc::estimator_mode_name(result.mode) << "\n";
    report << "normalization: " << ssc::normalization_name(result.normalization)
           << "\n";
    report << "draws: " << result.draws.size() << "\n";
    report << "gram_rcond: " << ssc::format_double(loaded.tau.gram_rcond) << "\n";
    for (const auto& warning : result.warnings) {
        report << "warning: " << warning << "\n";
    }
    ssc::write_text_file(join_path(out_dir, "test_report.txt"), report.str());

    Manifest manifest("test");
    manifest_common(&manifest, common, true);
    manifest.add("hypothesis", result.hypothesis);
    manifest.add_output("weights.csv");
    manifest.add_output("fit_diagnostics.csv");
    manifest.add_output("tau.csv");
    manifest.add_output("att.csv");
    manifest.add_output("draws.csv");
    manifest.add_output("draw_hist.csv");
    manifest.add_output("test_report.txt");
    manifest.write(out_dir);

    std::cout << (result.reject ? "reject" : "fail_to_reject") << " "
              << result.hypothesis << " (p = " << ssc::format_double(result.p_value)
              << ")\n";
    return 0;
}

struct CiOptions {
    int s = 0;  // 0 = every populated event time
    double grid_lo = 0.0;
    double grid_hi = 0.0;
    int grid_points = 401;
    bool explicit_grid = false;
};

int cmd_ci(const CommonOptions& common, const CiOptions& options) {
    const std::string out_dir = resolve_out_dir(common.out_dir);
    ensure_out_dir(out_dir);
    LoadedPanel loaded = load_and_fit(common);
    ssc::EstimatorMode mode = parse_mode(common.mode);
    ssc::Normalization norm = parse_normalization(common.normalization);

    std::vector<int> horizons;
    if (options.s > 0) {
        horizons.push_back(options.s);
    } else {
        ssc::AttPath path = ssc::att_path(loaded.tau);
        horizons = path.horizons;
    }

    ssc::Table table;
    table.header = {"s", "att_hat", "lo", "hi", "alpha", "flags"};
    for (int s : horizons) {
        Eigen::RowVectorXd c_row = ssc::att_weights(loaded.index, s).transpose();
        double center = c_row.dot(loaded.tau.tau_hat);

        ssc::GridSpec grid;
        if (options.explicit_grid) {
            grid.lo = options.grid_lo;
            grid.hi = options.grid_hi;
            grid.points = options.grid_points;
        } else {
            // Size the default grid from this horizon's own null draws.
            ssc::HypothesisSpec rolling_spec;
            rolling_spec.C = c_row;
            rolling_spec.d = Eigen::VectorXd::Zero(1);
            std::vector<double> draws = ssc::rolling_statistics(
                loaded.panel, loaded.index, loaded.model, rolling_spec, mode,
                common.rcond_min, common.threads);
            auto [q, dist] = ssc::critical_value(draws, loaded.panel.pre_periods,
                                                 common.alpha, norm);
            (void)dist;
            grid = ssc::default_grid(center, draws, q, options.grid_points);
        }

        ssc::CiResult ci = ssc::invert_test(
            loaded.panel, loaded.index, loaded.model, loaded.tau, c_row,
            common.alpha, grid, mode, norm, common.rcond_min, common.threads);

        std::string flags;
        if (ci.truncated) flags = "truncated";
        if (!ci.contiguous) flags += flags.empty() ? "noncontiguous" : ";noncontiguous";
        table.rows.push_back({std::to_string(s), ssc::format_double(center),
                              ssc::format_double(ci.lo), ssc::format_double(ci.hi),
                              ssc::format_double(ci.alpha), flags});
    }
    ssc::write_table_file(join_path(out_dir, "ci.csv"), table);

    Manifest manifest("ci");
    manifest_common(&manifest, common, true);
    if (options.s > 0) manifest.add("event_time", options.s);
    if (options.explicit_grid) {
        manifest.add("grid_lo", options.grid_lo);
        manifest.add("grid_hi", options.grid_hi);
    }
    manifest.add("grid_points", options.grid_points);
    manifest.add_output("ci.csv");
    manifest.write(out_dir);
    return 0;
}

struct PlotOptions {
    std::string panel_path;
    std::string artifact_dir = ".";
    std::string out_dir;
};

// plotdata reads the tables a prior fit and ci run left behind rather than
// refitting, so the figures always describe the run the user inspected.
int cmd_plotdata(const PlotOptions& options) {
    const std::string out_dir = resolve_out_dir(options.out_dir);
    ensure_out_dir(out_dir);
    ssc::Panel panel = ssc::read_panel_csv(options.panel_path);

    auto artifact = [&](const std::string& name) -> std::string {
        std::string path = join_path(options.artifact_dir, name);
        if (!fs::exists(path)) {
            ssc::fail(ssc::ErrorCode::MissingFit,
                      "'" + path + "' not found; run fit and ci with --out " +
                          options.artifact_dir + " first");
        }
        return path;
    };
    ssc::Table weights = ssc::read_table_file(artifact("weights.csv"));
    ssc::Table att = ssc::read_table_file(artifact("att.csv"));
    ssc::Table ci = ssc::read_table_file(artifact("ci.csv"));
    const std::vector<std::string> weights_header = {"unit", "donor", "weight",
                                                     "intercept", "objective"};
    if (weights.header != weights_header) {
        ssc::fail(ssc::ErrorCode::InvalidInput,
                  "weights.csv has unexpected columns; regenerate it with fit");
    }

    // Rebuild each unit's intercept and donor weights from the weight dump.
    const int n = panel.n_units();
    Eigen::VectorXd intercepts = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd weight_rows = Eigen::MatrixXd::Zero(n, n);
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (const auto& row : weights.rows) {
        int i = panel.unit_index(row[0]);
        int j = panel.unit_index(row[1]);
        if (i < 0 || j < 0) {
            ssc::fail(ssc::ErrorCode::InvalidInput,
                      "weights.csv names unit '" + (i < 0 ? row[0] : row[1]) +
                          "' which is not in the panel");
        }
        weight_rows(i, j) = ssc::parse_double(row[2]);
        intercepts(i) = ssc::parse_double(row[3]);
        seen[static_cast<std::size_t>(i)] = true;
    }
    for (int i = 0; i < n; ++i) {
        if (!seen[static_cast<std::size_t>(i)]) {
            ssc::fail(ssc::ErrorCode::InvalidInput,
                      "weights.csv has no rows for unit '" + panel.unit_ids[i] +
                          "'; regenerate it with fit");
        }
    }

    // Event-study path with interval bounds, joined from att.csv and ci.csv.
    const std::size_t ci_s = ci.column("s");
    const std::size_t ci_lo = ci.column("lo");
    const std::size_t ci_hi = ci.column("hi");
    const std::size_t ci_alpha = ci.column("alpha");
    ssc::Table att_ci;
    att_ci.header = {"s", "n_s", "att_hat", "lo", "hi", "alpha"};
    for (const auto& row : att.rows) {
        const std::vector<std::string>* interval = nullptr;
        for (const auto& ci_row : ci.rows) {
            if (ci_row[ci_s] == row[0]) {
                interval = &ci_row;
                break;
            }
        }
        if (interval == nullptr) {
            ssc::fail(ssc::ErrorCode::MissingFit,
                      "ci.csv has no interval for event time " + row[0] +
                          "; rerun ci without --s");
        }
        att_ci.rows.push_back({row[0], row[1], row[2], (*interval)[ci_lo],
                               (*interval)[ci_hi], (*interval)[ci_alpha]});
    }
    ssc::write_table_file(join_path(out_dir, "att_ci.csv"), att_ci);

    // Synthetic control gaps for every cell: observed minus fitted.
    Eigen::MatrixXi events = ssc::event_time(panel);
    ssc::Table gaps;
    gaps.header = {"unit", "time", "event_time", "gap"};
    for (int i = 0; i < n; ++i) {
        for (int t = 0; t < panel.n_periods(); ++t) {
            double synthetic =
                intercepts(i) + weight_rows.row(i).dot(panel.outcomes.col(t));
            double gap = panel.outcomes(i, t) - synthetic;
            gaps.rows.push_back({panel.unit_ids[i], panel.period_ids[t],
                                 std::to_string(events(i, t)),
                                 ssc::format_double(gap)});
        }
    }
    ssc::write_table_file(join_path(out_dir, "gaps.csv"), gaps);

    Manifest manifest("plotdata");
    manifest.add("panel", options.panel_path);
    manifest.add("artifacts", options.artifact_dir);
    manifest.add_output("att_ci.csv");
    manifest.add_output("gaps.csv");
    manifest.write(out_dir);
    return 0;
}

struct SimulateOptions {
    std::string config_path;
    std::uint64_t seed = 0;
    std::vector<std::string> overrides;
    std::string out_dir;
    unsigned threads = 0;
};

int cmd_simulate(const SimulateOptions& options) {
    const std::string out_dir = resolve_out_dir(options.out_dir);
    ensure_out_dir(out_dir);
    ssc::StudyConfig study =
        ssc::load_study_config(options.config_path, options.overrides);
    study.settings.threads = options.threads;
    ssc::McReport report = ssc::run_monte_carlo(study.dgp, study.plan,
                                                study.settings, study.reps,
                                                options.seed);

    ssc::write_text_file(join_path(out_dir, "mc_report.txt"),
                         report.to_text());

    ssc::Table horizons;
    horizons.header = {"s", "n_s", "true_att", "bias", "sd", "rmse", "mc_se"};
    for (std::size_t h = 0; h < report.horizons.size(); ++h) {
        horizons.rows.push_back(
            {std::to_string(report.horizons[h]), std::to_string(report.counts[h]),
             ssc::format_double(report.true_att[h]),
             ssc::format_double(report.bias[h]), ssc::format_double(report.sd[h]),
             ssc::format_double(report.rmse[h]),
             ssc::format_double(report.mc_se[h])});
    }
    ssc::write_table_file(join_path(out_dir, "mc_horizons.csv"), horizons);

    ssc::Table rates;
    rates.header = {"metric", "value"};
    rates.rows.push_back({"replications", std::to_string(report.replications)});
    rates.rows.push_back({"completed", std::to_string(report.completed)});
    for (const auto& [family, count] : report.failures) {
        rates.rows.push_back({"failed_" + family, std::to_string(count)});
    }
    rates.rows.push_back({"rejection_rate", ssc::format_double(report.rejection_rate)});
    if (report.ran_ci) {
        rates.rows.push_back({"coverage_rate", ssc::format_double(report.coverage_rate)});
        rates.rows.push_back({"mean_ci_width", ssc::format_double(report.mean_ci_width)});
    }
    rates.rows.push_back({"mean_resid_sd", ssc::format_double(report.mean_resid_sd)});
    rates.rows.push_back({"null_value", ssc::format_double(report.null_value_mean)});
    ssc::write_table_file(join_path(out_dir, "mc_rates.csv"), rates);

    Manifest manifest("simulate");
    manifest.add("config", options.config_path);
    manifest.add("seed", std::to_string(options.seed));
    for (const auto& item : options.overrides) manifest.add("set", item);
    manifest.add("reps", report.replications);
    manifest.add("alpha", report.alpha);
    manifest.add("estimator_mode", ssc::estimator_mode_name(report.mode));
    manifest.add("normalization", ssc::normalization_name(report.normalization));
    manifest.add_output("mc_report.txt");
    manifest.add_output("mc_horizons.csv");
    manifest.add_output("mc_rates.csv");
    manifest.write(out_dir);

    std::cout << report.to_text();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthetic control estimation and inference for staggered adoption"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ssc::kVersion);

    CommonOptions ingest_common;
    CLI::App* ingest = app.add_subcommand(
        "ingest", "validate a panel and write it in canonical form");
    ingest->add_option("--panel", ingest_common.panel_path, "panel csv")->required();
    ingest->add_option("--out", ingest_common.out_dir,
                       "output directory (default: $SSC_OUT)");

    CommonOptions fit_common;
    CLI::App* fit = app.add_subcommand(
        "fit", "fit weights and estimate treatment effects");
    add_common_options(fit, &fit_common, false);

    CommonOptions test_common;
    TestOptions test_options;
    CLI::App* test = app.add_subcommand("test", "estimate effects and test a hypothesis");
    add_common_options(test, &test_common, true);
    CLI::Option* att_opt = test->add_option(
        "--att", test_options.att_s,
        "test the average effect at this event time (default 1)");
    test->add_option("--null", test_options.null_value,
                     "null value for the --att hypothesis (default 0)");
    CLI::Option* contrast_opt =
        test->add_option("--contrast", test_options.contrast,
                         "two comma-delimited unit groups to compare")
            ->expected(2);
    test->add_option("--horizon", test_options.horizon,
                     "event time for --contrast (default 1)");
    CLI::Option* matrix_opt = test->add_option(
        "--matrix", test_options.matrix_path,
        "file of restriction rows: coefficients per treated cell, then the null value");
    att_opt->excludes(contrast_opt)->excludes(matrix_opt);
    contrast_opt->excludes(matrix_opt);

    CommonOptions ci_common;
    CiOptions ci_options;
    CLI::App* ci = app.add_subcommand("ci", "invert the test into intervals");
    add_common_options(ci, &ci_common, true);
    ci->add_option("--s", ci_options.s, "event time (default: every populated one)");
    CLI::Option* grid_lo =
        ci->add_option("--grid-lo", ci_options.grid_lo, "inversion grid lower edge");
    CLI::Option* grid_hi =
        ci->add_option("--grid-hi", ci_options.grid_hi, "inversion grid upper edge");
    grid_lo->needs(grid_hi);
    grid_hi->needs(grid_lo);
    ci->add_option("--grid-points", ci_options.grid_points,
                   "inversion grid size (default 401)");

    PlotOptions plot_options;
    CLI::App* plotdata = app.add_subcommand(
        "plotdata", "dump event-study and gap tables from a completed fit");
    plotdata->add_option("--panel", plot_options.panel_path,
                         "panel csv (unit,time,outcome,treated)")
        ->required();
    plotdata->add_option("--dir", plot_options.artifact_dir,
                         "directory holding fit and ci outputs (default .)");
    plotdata->add_option("--out", plot_options.out_dir,
                         "output directory (default: $SSC_OUT)");

    SimulateOptions sim_options;
    CLI::App* simulate = app.add_subcommand("simulate", "run a simulation study");
    simulate->add_option("--config", sim_options.config_path, "study config file")
        ->required();
    simulate->add_option("--seed", sim_options.seed, "master seed (required)")
        ->required();
    simulate->add_option("--set", sim_options.overrides,
                         "config override key=value (repeatable)");
    simulate->add_option("--out", sim_options.out_dir,
                         "output directory (default: $SSC_OUT)");
    simulate->add_option("--threads", sim_options.threads,
                         "worker threads (0 = all cores)");

    try {
        app.parse(argc, argv);
        if (ingest->parsed()) return cmd_ingest(ingest_common);
        if (fit->parsed()) return cmd_fit(fit_common);
        if (test->parsed()) return cmd_test(test_common, test_options);
        if (ci->parsed()) {
            ci_options.explicit_grid = grid_lo->count() > 0;
            return cmd_ci(ci_common, ci_options);
        }
        if (plotdata->parsed()) return cmd_plotdata(plot_options);
        if (simulate->parsed()) return cmd_simulate(sim_options);
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help, --version
        app.exit(e);
        return 2;
    } catch (const ssc::Error& e) {
        std::cerr << "error [" << ssc::error_code_name(e.code()) << "]: " << e.what()
                  << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
