#pragma once

// Command-line front end: reproduces the reference tables and emits CSV data
// for plotting. All numeric output goes through format_number so identical
// invocations give byte-identical output.

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "henstock_ode/dyadic_interpolation.hpp"
#include "henstock_ode/error_analysis.hpp"
#include "henstock_ode/fixtures.hpp"
#include "henstock_ode/problem_model.hpp"
#include "henstock_ode/reference_solver.hpp"
#include "henstock_ode/surrogate_solver.hpp"

namespace henstock_ode::cli {

enum class Command { solve, table1, table2, bound, convergence, compare_rk, hake };
enum class Format { csv, pretty };

struct RunConfig {
    Command command = Command::solve;
    std::string problem = "example3";
    int level = 4;
    std::optional<int> dense;
    std::optional<std::string> output_path;
    Format format = Format::csv;
    int depth = kDefaultSawtoothDepth;  // hake / sawtooth fixtures
    std::optional<double> step;         // compare-rk

    void check() const {
        if (level < 0 || level > kMaxLevel)
            throw Error("level must lie in [0, " + std::to_string(kMaxLevel) + "]");
        if (problem != "example1" && problem != "example2" && problem != "example3" && problem != "example4")
            throw Error("unknown problem '" + problem + "'");
        if (dense && *dense < 2) throw Error("--dense needs at least 2 points");
        if (step && !(*step > 0.0)) throw Error("--step must be positive");
    }
};

/// 10 significant digits, '.' decimal separator, no negative zero.
inline std::string format_number(double v) {
    if (v == 0.0) v = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;
    int pretty_decimals = -1;  // fixed decimals for doubles in pretty mode; -1 = %.6g
};

inline std::string render_cell(const Cell& c, Format fmt, int pretty_decimals) {
    if (const auto* d = std::get_if<double>(&c)) {
        if (fmt == Format::csv) return format_number(*d);
        char buf[48];
        if (pretty_decimals >= 0)
            std::snprintf(buf, sizeof buf, "%.*f", pretty_decimals, *d == 0.0 ? 0.0 : *d);
        else
            std::snprintf(buf, sizeof buf, "%.6g", *d == 0.0 ? 0.0 : *d);
        return buf;
    }
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

inline void write_table(std::ostream& out, const Table& t, Format fmt) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back(t.header);
    for (const auto& row : t.rows) {
        std::vector<std::string> r;
        for (const auto& c : row) r.push_back(render_cell(c, fmt, t.pretty_decimals));
        cells.push_back(std::move(r));
    }
    if (fmt == Format::csv) {
        for (const auto& r : cells) {
            for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
            out << '\n';
        }
        return;
    }
    std::vector<std::size_t> width(t.header.size(), 0);
    for (const auto& r : cells)
        for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], r[i].size());
    for (const auto& r : cells) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out << "  ";
            out << std::string(width[i] - r[i].size(), ' ') << r[i];
        }
        out << '\n';
    }
}

/// Closed form when the fixture has one, otherwise the quadrature reference.
inline RealFn exact_solution(const Fixture& fx) {
    if (fx.closed_form_solution) return *fx.closed_form_solution;
    const ProblemSpec spec = fx.spec;
    return [spec](double x) { return exact_via_formula(spec, x); };
}

inline constexpr std::array<double, 6> kTable1X = {0.0, 0.125, 0.25, 0.5, 0.75, 1.0};
inline constexpr std::array<int, 4> kTable1Levels = {4, 5, 6, 7};

inline Table table1() {
    const Fixture fx = example3();
    Table t;
    t.header = {"x", "y_exact"};
    std::vector<SurrogateSolution> sols;
    for (int n : kTable1Levels) {
        t.header.push_back("N" + std::to_string(1 << n));
        sols.push_back(solve(fx.spec, n));
    }
    for (double x : kTable1X) {
        std::vector<Cell> row{x, (*fx.closed_form_solution)(x)};
        for (const auto& s : sols) row.emplace_back(s.eval(x));
        t.rows.push_back(std::move(row));
    }
    t.pretty_decimals = 5;
    return t;
}

inline double delta_n(const Fixture& fx, int n) {
    return measured_error(solve(fx.spec, n), exact_solution(fx), n);
}

inline Table table2() {
    const Fixture fx = example4();
    Table t;
    t.header = {"n", "delta_n"};
    for (int n = 4; n <= 10; ++n) t.rows.push_back({static_cast<long long>(n), delta_n(fx, n)});
    return t;
}

inline Table solve_table(const RunConfig& cfg) {
    const Fixture fx = fixture_by_name(cfg.problem, cfg.depth);
    const SurrogateSolution sol = solve(fx.spec, cfg.level);
    const RealFn exact = exact_solution(fx);
    Table t;
    t.header = {"x", "y_exact", "y_approx", "abs_err"};
    const std::size_t points = cfg.dense ? static_cast<std::size_t>(*cfg.dense) : (std::size_t{1} << cfg.level) + 1;
    for (std::size_t j = 0; j < points; ++j) {
        const double x = cfg.dense ? static_cast<double>(j) / static_cast<double>(points - 1)
                                   : std::ldexp(static_cast<double>(j), -cfg.level);
        const double ye = exact(x);
        const double ya = sol.eval(x);
        t.rows.push_back({x, ye, ya, std::abs(ya - ye)});
    }
    return t;
}

inline Table bound_table(const RunConfig& cfg) {
    const Fixture fx = fixture_by_name(cfg.problem, cfg.depth);
    const ErrorBudget b = theorem_bound(fx.spec, cfg.level);
    Table t;
    t.header = {"field", "value"};
    const auto add = [&](const char* name, double v) { t.rows.push_back({std::string(name), v}); };
    t.rows.push_back({std::string("n"), static_cast<long long>(b.n)});
    add("delta", b.delta);
    add("omega_q", b.omega_q);
    add("omega_p", b.omega_p);
    add("omega_ep", b.omega_ep);
    add("omega_emp", b.omega_emp);
    add("var_q", b.var_q);
    add("var_ep", b.var_ep);
    add("sup_ep", b.sup_ep);
    add("c_minus1", b.c_minus1);
    add("c_1", b.c_1);
    add("c_0", b.c_0);
    add("c_2", b.c_2);
    add("bound", b.bound);
    t.rows.push_back({std::string("estimated"), static_cast<long long>(b.estimated ? 1 : 0)});
    return t;
}

inline Table convergence_table(const RunConfig& cfg) {
    const Fixture fx = fixture_by_name(cfg.problem, cfg.depth);
    Table t;
    t.header = {"n", "delta_n", "bound"};
    for (int n = 1; n <= cfg.level; ++n)
        t.rows.push_back({static_cast<long long>(n), delta_n(fx, n), theorem_bound(fx.spec, n).bound});
    return t;
}

inline Table compare_rk_table(const RunConfig& cfg) {
    const Fixture fx = fixture_by_name(cfg.problem, cfg.depth);
    const SurrogateSolution sol = solve(fx.spec, cfg.level);
    const RealFn exact = exact_solution(fx);
    const double h = cfg.step.value_or(std::ldexp(1.0, -cfg.level));
    Table t;
    t.header = {"x", "y_exact", "y_surrogate", "surrogate_abs_err", "y_rk4", "rk4_abs_err", "rk4_status"};
    const std::size_t points = (std::size_t{1} << cfg.level) + 1;
    for (std::size_t j = 0; j < points; ++j) {
        const double x = std::ldexp(static_cast<double>(j), -cfg.level);
        const double ye = exact(x);
        const double ys = sol.eval(x);
        std::vector<Cell> row{x, ye, ys, std::abs(ys - ye)};
        const Rk4Result rk = rk4_baseline(fx.spec, h, x);
        if (const auto* v = std::get_if<double>(&rk)) {
            row.emplace_back(*v);
            row.emplace_back(std::abs(*v - ye));
            row.emplace_back(std::string("ok"));
        } else {
            const auto& rep = std::get<NonFiniteReport>(rk);
            row.emplace_back(std::string());
            row.emplace_back(std::string());
            row.emplace_back("nonfinite stage " + std::to_string(rep.stage) + " at t=" + format_number(rep.t));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table hake_table(const RunConfig& cfg) {
    if (cfg.problem != "example1" && cfg.problem != "example2")
        throw Error("hake needs --problem example1 or example2");
    const Fixture fx = fixture_by_name(cfg.problem, cfg.depth);
    const auto sums = hake_partial_sums(fx.hake_segments, fx.hake_segments.size());
    Table t;
    t.header = {"depth", "signed_sum", "abs_sum"};
    for (std::size_t m = 0; m < sums.size(); ++m)
        t.rows.push_back({static_cast<long long>(m + 1), sums[m].partial_integral, sums[m].partial_abs_integral});
    return t;
}

inline Table build_table(const RunConfig& cfg) {
    switch (cfg.command) {
        case Command::solve: return solve_table(cfg);
        case Command::table1: return table1();
        case Command::table2: return table2();
        case Command::bound: return bound_table(cfg);
        case Command::convergence: return convergence_table(cfg);
        case Command::compare_rk: return compare_rk_table(cfg);
        case Command::hake: return hake_table(cfg);
    }
    throw Error("unhandled command");
}

/// Executes one command. Returns 0 on success, 1 on a hard error (message on
/// `err`, output stream untouched).
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        cfg.check();
        const Table t = build_table(cfg);
        if (cfg.output_path) {
            std::ofstream file(*cfg.output_path, std::ios::binary);
            if (!file) throw Error("cannot open output file '" + *cfg.output_path + "'");
            write_table(file, t, cfg.format);
            if (!file) throw Error("failed writing '" + *cfg.output_path + "'");
        } else {
            write_table(out, t, cfg.format);
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

/// Parses argv into a RunConfig. On failure prints usage to `err` and
/// returns the exit code instead.
inline std::variant<RunConfig, int> parse_args(int argc, const char* const* argv, std::ostream& out,
                                               std::ostream& err) {
    CLI::App app{"Surrogate solver for y' + p'(x) y = q'(x) with singular coefficients", "henstock_ode"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string format = "csv";
    std::optional<int> level;
    std::optional<std::string> problem;

    struct Sub {
        const char* name;
        Command command;
        const char* help;
    };
    const std::array<Sub, 7> subs = {{
        {"solve", Command::solve, "surrogate vs exact solution on the level-n grid (or --dense points)"},
        {"table1", Command::table1, "example3 at x in {0,.125,.25,.5,.75,1} for N = 16..128"},
        {"table2", Command::table2, "grid error delta_n of example4 for n = 4..10"},
        {"bound", Command::bound, "a-priori error budget at --level"},
        {"convergence", Command::convergence, "n, delta_n, bound for n = 1..--level"},
        {"compare-rk", Command::compare_rk, "surrogate vs fixed-step RK4 on the level grid"},
        {"hake", Command::hake, "signed and absolute partial sums of the sawtooth integrals"},
    }};
    std::vector<CLI::App*> handles;
    for (const auto& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--problem", problem, "example1 | example2 | example3 | example4");
        sub->add_option("--level", level, "dyadic level n (0..30)");
        sub->add_option("--dense", cfg.dense, "solve: number of equispaced output points");
        sub->add_option("--format", format, "csv | pretty")->check(CLI::IsMember({"csv", "pretty"}));
        sub->add_option("--out", cfg.output_path, "write output to this path");
        sub->add_option("--depth", cfg.depth, "sawtooth truncation depth (example1/example2)");
        sub->add_option("--step", cfg.step, "compare-rk: RK4 step (default 2^-level)");
        handles.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    for (std::size_t i = 0; i < subs.size(); ++i)
        if (handles[i]->parsed()) cfg.command = subs[i].command;

    switch (cfg.command) {
        case Command::convergence:
            cfg.problem = problem.value_or("example4");
            cfg.level = level.value_or(10);
            break;
        case Command::compare_rk:
            cfg.problem = problem.value_or("example3");
            cfg.level = level.value_or(7);
            break;
        case Command::hake:
            cfg.problem = problem.value_or("example1");
            cfg.level = level.value_or(0);
            break;
        default:
            cfg.problem = problem.value_or("example3");
            cfg.level = level.value_or(4);
    }
    cfg.format = format == "pretty" ? Format::pretty : Format::csv;
    try {
        cfg.check();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return 2;
    }
    return cfg;
}

inline int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    auto parsed = parse_args(argc, argv, out, err);
    if (const int* code = std::get_if<int>(&parsed)) return *code;
    return run(std::get<RunConfig>(parsed), out, err);
}

}  // namespace henstock_ode::cli
