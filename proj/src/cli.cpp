#include "fcable/cli.hpp"

#include "fcable/problems.hpp"
#include "fcable/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fcable {

namespace {

struct CommonOptions {
    double alpha = 0.5;
    double beta = 0.5;
    int tau_inverse = 100;
    double final_time = 1.0;
    std::string problem = "benchmark";
    std::string config_path;
};

struct RunOptions : CommonOptions {
    int coarse_n = 0;
    int fine_n = 0;
    std::string scheme = "twogrid";
    std::string output;
    bool emit_fields = false;
};

struct TableOptions : CommonOptions {
    std::string pairs;
    std::string scheme = "twogrid";
    std::string output;
    int jobs = 1;
};

struct CompareOptions : CommonOptions {
    int coarse_n = 0;
    int fine_n = 0;
    std::string output;
};

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    // later occurrences win, so config-file tokens injected up front are
    // overridden by explicit flags
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    cmd->add_option("--alpha", opts.alpha, "fractional order of the reaction memory term");
    cmd->add_option("--beta", opts.beta, "fractional order of the diffusion memory term");
    cmd->add_option("--tau-inverse", opts.tau_inverse, "number of time steps M (tau = T/M)");
    cmd->add_option("--final-time", opts.final_time, "final time T")->group("");  // hidden
    cmd->add_option("--problem", opts.problem, "problem instance: benchmark or zero")
        ->check(CLI::IsMember({"benchmark", "zero"}));
    cmd->add_option("--config", opts.config_path,
                    "flat key=value file with the same keys; flags override");
}

// Reads a flat key=value file into --key=value tokens. Blank lines and
// #-comments are skipped.
std::vector<std::string> load_config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    std::vector<std::string> tokens;
    std::string line;
    auto trim = [](std::string s) {
        const auto begin = s.find_first_not_of(" \t\r");
        const auto end = s.find_last_not_of(" \t\r");
        return begin == std::string::npos ? std::string() : s.substr(begin, end - begin + 1);
    };
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line is not key=value: " + line);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config line has an empty key: " + line);
        }
        tokens.push_back("--" + key + "=" + value);
    }
    return tokens;
}

// Expands `--config <path>` (or --config=<path>) by splicing the file's
// tokens in right after the subcommand name.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            break;
        }
    }
    if (path.empty() || args.empty()) {
        return args;
    }
    const std::vector<std::string> tokens = load_config_tokens(path);
    std::vector<std::string> out;
    out.reserve(args.size() + tokens.size());
    out.push_back(args.front());  // subcommand name
    out.insert(out.end(), tokens.begin(), tokens.end());
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
}

void check_common(const CommonOptions& opts) {
    if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) {
        throw ConfigError("alpha must lie strictly inside (0,1)");
    }
    if (!(opts.beta > 0.0 && opts.beta < 1.0)) {
        throw ConfigError("beta must lie strictly inside (0,1)");
    }
    if (opts.tau_inverse < 2) {
        throw ConfigError("tau-inverse must be at least 2");
    }
    if (!(opts.final_time > 0.0)) {
        throw ConfigError("final-time must be positive");
    }
}

ManufacturedCase make_case(const CommonOptions& opts) {
    ManufacturedCase mcase = cable_benchmark(opts.alpha, opts.beta, opts.tau_inverse);
    mcase.problem.final_time = opts.final_time;
    if (opts.problem == "zero") {
        mcase.name = "zero";
        mcase.problem.source = [](double, double, double) { return 0.0; };
        mcase.problem.initial = [](double, double) { return 0.0; };
        mcase.problem.exact = [](double, double, double) { return 0.0; };
    }
    return mcase;
}

std::string fraction(double h) {
    std::ostringstream out;
    out << "1/" << static_cast<int>(std::lround(1.0 / h));
    return out.str();
}

void print_summary(const std::string& scheme, std::optional<double> coarse_h, double fine_h,
                   double error, const MarchResult& result) {
    std::size_t newton_total = 0;
    std::size_t newton_max = 0;
    for (const auto& s : result.steps) {
        newton_total += s.newton_iterations;
        newton_max = std::max(newton_max, s.newton_iterations);
    }
    std::cout << "scheme=" << scheme;
    if (coarse_h) {
        std::cout << " H=" << fraction(*coarse_h);
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.5e", error);
    std::cout << " h=" << fraction(fine_h) << " error_l2=" << buf;
    std::snprintf(buf, sizeof(buf), "%.6f", result.solve_seconds);
    std::cout << " solve_seconds=" << buf << " newton_total=" << newton_total
              << " newton_max=" << newton_max << '\n';
}

std::vector<double> exact_nodal(const ManufacturedCase& mcase, const Mesh2D& mesh) {
    const double T = mcase.problem.final_time;
    return interpolate(mesh, [&](double x, double y) { return mcase.problem.exact(x, y, T); })
        .values;
}

void emit_run_fields(const std::string& prefix, const ManufacturedCase& mcase, const Mesh2D& mesh,
                     const std::vector<std::pair<std::string, const FeFunction*>>& solutions) {
    const std::vector<double> exact = exact_nodal(mcase, mesh);
    write_field_file(prefix + "_exact.dat", mesh, exact);
    for (const auto& [label, fn] : solutions) {
        write_field_file(prefix + "_" + label + ".dat", mesh, fn->values);
        std::vector<double> diff(exact.size());
        for (std::size_t i = 0; i < diff.size(); ++i) {
            diff[i] = exact[i] - fn->values[i];
        }
        write_field_file(prefix + "_error_" + label + ".dat", mesh, diff);
    }
}

int cmd_run(const RunOptions& opts) {
    check_common(opts);
    if (opts.fine_n < 2) {
        throw ConfigError("fine-n is required and must be at least 2");
    }
    const bool wants_twogrid = opts.scheme == "twogrid" || opts.scheme == "both";
    const bool wants_standard = opts.scheme == "standard" || opts.scheme == "both";
    if (wants_twogrid && opts.coarse_n < 2) {
        throw ConfigError("coarse-n is required (>= 2) when scheme includes twogrid");
    }

    const ManufacturedCase mcase = make_case(opts);
    const SolverConfig solver;
    const std::string prefix = opts.output.empty() ? mcase.name : opts.output;

    std::optional<Nesting> nest;
    std::optional<Mesh2D> single;
    std::optional<MarchResult> twogrid_result;
    std::optional<MarchResult> standard_result;

    if (wants_twogrid) {
        nest = make_nesting(opts.coarse_n, opts.fine_n);
        twogrid_result = march_twogrid(mcase.problem, *nest, solver);
        const double err = benchmark_error(mcase, nest->fine, twogrid_result->final_solution);
        print_summary("twogrid", nest->coarse.spacing(), nest->fine.spacing(), err,
                      *twogrid_result);
    }
    if (wants_standard) {
        single = build_mesh(opts.fine_n);
        standard_result = march_standard(mcase.problem, *single, solver);
        const double err = benchmark_error(mcase, *single, standard_result->final_solution);
        print_summary("standard", std::nullopt, single->spacing(), err, *standard_result);
    }

    if (opts.emit_fields) {
        const Mesh2D& mesh = wants_twogrid ? nest->fine : *single;
        std::vector<std::pair<std::string, const FeFunction*>> solutions;
        if (twogrid_result) {
            solutions.emplace_back("twogrid", &twogrid_result->final_solution);
        }
        if (standard_result) {
            solutions.emplace_back("standard", &standard_result->final_solution);
        }
        emit_run_fields(prefix, mcase, mesh, solutions);
    }
    return kExitOk;
}

std::vector<MeshPair> parse_pairs(const std::string& text, bool need_coarse) {
    if (text.empty()) {
        throw ConfigError("pairs is required, e.g. --pairs 4/16,5/25 (or 16,25 for standard)");
    }
    std::vector<MeshPair> out;
    std::istringstream in(text);
    std::string token;
    while (std::getline(in, token, ',')) {
        MeshPair pair;
        try {
            if (const auto slash = token.find('/'); slash != std::string::npos) {
                pair.coarse_n = std::stoi(token.substr(0, slash));
                pair.fine_n = std::stoi(token.substr(slash + 1));
            } else {
                pair.fine_n = std::stoi(token);
            }
        } catch (const std::exception&) {
            throw ConfigError("pairs entry is not a count or coarse/fine pair: " + token);
        }
        if (pair.fine_n < 2 || (pair.coarse_n != 0 && pair.coarse_n < 2)) {
            throw ConfigError("pairs entry has counts below 2: " + token);
        }
        if (need_coarse) {
            if (pair.coarse_n == 0) {
                throw ConfigError("pairs entry needs a coarse/fine pair for twogrid: " + token);
            }
            if (pair.fine_n % pair.coarse_n != 0) {
                throw ConfigError("pairs entry is not divisible (fine " +
                                  std::to_string(pair.fine_n) + " vs coarse " +
                                  std::to_string(pair.coarse_n) + ")");
            }
        }
        out.push_back(pair);
    }
    if (out.empty()) {
        throw ConfigError("pairs did not contain any entries");
    }
    return out;
}

void write_text_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open output file: " + path);
    }
    out << text;
}

int cmd_table(const TableOptions& opts) {
    check_common(opts);
    if (opts.jobs < 1) {
        throw ConfigError("jobs must be at least 1");
    }
    const bool wants_twogrid = opts.scheme == "twogrid" || opts.scheme == "both";
    const bool wants_standard = opts.scheme == "standard" || opts.scheme == "both";
    const std::vector<MeshPair> pairs = parse_pairs(opts.pairs, wants_twogrid);

    const ManufacturedCase mcase = make_case(opts);
    const SolverConfig solver;
    std::vector<ConvergenceRow> rows;
    if (wants_twogrid) {
        const auto block = convergence_study(mcase, pairs, Scheme::twogrid, solver, opts.jobs);
        rows.insert(rows.end(), block.begin(), block.end());
    }
    if (wants_standard) {
        const auto block = convergence_study(mcase, pairs, Scheme::standard, solver, opts.jobs);
        rows.insert(rows.end(), block.begin(), block.end());
    }
    write_text_output(opts.output, emit_csv(rows));
    return kExitOk;
}

int cmd_compare(const CompareOptions& opts) {
    check_common(opts);
    if (opts.fine_n < 2) {
        throw ConfigError("fine-n is required and must be at least 2");
    }
    if (opts.coarse_n < 2) {
        throw ConfigError("coarse-n is required and must be at least 2");
    }

    const ManufacturedCase mcase = make_case(opts);
    const SolverConfig solver;
    const std::vector<MeshPair> pair{{opts.coarse_n, opts.fine_n}};
    const auto twogrid = convergence_study(mcase, pair, Scheme::twogrid, solver);
    const auto standard = convergence_study(mcase, pair, Scheme::standard, solver);

    std::vector<ConvergenceRow> rows;
    rows.push_back(twogrid.front());
    rows.push_back(standard.front());
    write_text_output(opts.output, emit_csv(rows));

    const double error_ratio = twogrid.front().error_l2 / standard.front().error_l2;
    const double time_ratio = twogrid.front().cpu_seconds / standard.front().cpu_seconds;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", error_ratio);
    std::cout << "error_ratio: " << buf << '\n';
    std::snprintf(buf, sizeof(buf), "%.4f", time_ratio);
    std::cout << "time_ratio: " << buf << '\n';
    std::cout << "twogrid_faster: " << (time_ratio < 1.0 ? "true" : "false") << '\n';
    return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"Two-grid finite element solver for the nonlinear time-fractional Cable "
                 "equation on the unit square"};
    app.require_subcommand(1);

    RunOptions run;
    CLI::App* run_cmd = app.add_subcommand("run", "single march; summary line and optional "
                                                  "field dumps");
    add_common(run_cmd, run);
    run_cmd->add_option("--coarse-n", run.coarse_n, "coarse cells per side (twogrid)");
    run_cmd->add_option("--fine-n", run.fine_n, "fine cells per side");
    run_cmd->add_option("--scheme", run.scheme, "standard, twogrid, or both")
        ->check(CLI::IsMember({"standard", "twogrid", "both"}));
    run_cmd->add_option("--output", run.output, "path prefix for artifacts");
    run_cmd->add_flag("--emit-fields", run.emit_fields, "dump nodal grids as .dat files");

    TableOptions table;
    CLI::App* table_cmd = app.add_subcommand("table", "convergence study CSV over mesh pairs");
    add_common(table_cmd, table);
    table_cmd->add_option("--pairs", table.pairs,
                          "comma list of coarse/fine pairs (4/16,5/25) or fine counts");
    table_cmd->add_option("--scheme", table.scheme, "standard, twogrid, or both")
        ->check(CLI::IsMember({"standard", "twogrid", "both"}));
    table_cmd->add_option("--output", table.output, "CSV output path (stdout when omitted)");
    table_cmd->add_option("--jobs", table.jobs, "parallel rows (default 1, deterministic timing)");

    CompareOptions compare;
    CLI::App* compare_cmd =
        app.add_subcommand("compare", "two-grid vs standard on one discretization");
    add_common(compare_cmd, compare);
    compare_cmd->add_option("--coarse-n", compare.coarse_n, "coarse cells per side");
    compare_cmd->add_option("--fine-n", compare.fine_n, "fine cells per side");
    compare_cmd->add_option("--output", compare.output, "CSV output path (stdout when omitted)");

    try {
        const std::vector<std::string> expanded = expand_config(args);
        std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    }

    try {
        if (run_cmd->parsed()) {
            return cmd_run(run);
        }
        if (table_cmd->parsed()) {
            return cmd_table(table);
        }
        return cmd_compare(compare);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kExitSolverFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSolverFailure;
    }
}

}  // namespace fcable
