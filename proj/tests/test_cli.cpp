#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "henstock_ode/cli.hpp"

namespace henstock_ode::cli {
namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "henstock_ode");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) row.push_back(field);
        if (!line.empty() && line.back() == ',') row.emplace_back();
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string to_csv(const std::vector<std::vector<std::string>>& rows) {
    std::string s;
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
        s += '\n';
    }
    return s;
}

TEST(FormatNumber, Basics) {
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(0.125), "0.125");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.3333333333");
}

TEST(Cli, Table1Cell) {
    const Outcome r = invoke({"table1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 7u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"x", "y_exact", "N16", "N32", "N64", "N128"}));
    EXPECT_EQ(rows[6][0], "1");
    EXPECT_NEAR(std::stod(rows[6][3]), 1.99952, 5e-5);
}

TEST(Cli, SolveLevelZeroFirstRow) {
    const Outcome r = invoke({"solve", "--problem", "example3", "--level", "0"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n', r.out.find('\n') + 1) + 1), "x,y_exact,y_approx,abs_err\n0,0,0,0\n");
}

TEST(Cli, Table2LevelSeven) {
    const Outcome r = invoke({"table2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 8u);
    EXPECT_EQ(rows[4][0], "7");
    EXPECT_NEAR(std::stod(rows[4][1]), 8.6e-5, 0.15 * 8.6e-5);
}

TEST(Cli, OutputIsDeterministic) {
    for (const std::vector<std::string>& args : std::vector<std::vector<std::string>>{
             {"table1"}, {"solve", "--problem", "example4", "--level", "6"}, {"bound"}, {"hake", "--depth", "40"}}) {
        const Outcome a = invoke(args);
        const Outcome b = invoke(args);
        EXPECT_EQ(a.code, 0);
        EXPECT_EQ(a.out, b.out);
    }
}

TEST(Cli, CsvRoundTrip) {
    for (const std::vector<std::string>& args : std::vector<std::vector<std::string>>{
             {"table1"}, {"table2"}, {"compare-rk", "--level", "3"}, {"convergence", "--level", "5"}}) {
        const Outcome r = invoke(args);
        ASSERT_EQ(r.code, 0) << r.err;
        EXPECT_EQ(r.out.find('\r'), std::string::npos);
        ASSERT_FALSE(r.out.empty());
        EXPECT_EQ(r.out.back(), '\n');
        const auto rows = parse_csv(r.out);
        for (const auto& row : rows) EXPECT_EQ(row.size(), rows[0].size());
        EXPECT_EQ(to_csv(rows), r.out);
    }
}

TEST(Cli, CompareRkReportsNonFinite) {
    const Outcome r = invoke({"compare-rk", "--problem", "example3", "--level", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("nonfinite stage 1 at t=0"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(invoke({"solve"}).code, 0);
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_EQ(invoke({"frobnicate"}).code, 2);
    EXPECT_EQ(invoke({"solve", "--level", "abc"}).code, 2);
    EXPECT_EQ(invoke({"solve", "--level", "31"}).code, 2);
    EXPECT_EQ(invoke({"solve", "--format", "xml"}).code, 2);
    const Outcome unknown = invoke({"solve", "--problem", "example9"});
    EXPECT_NE(unknown.code, 0);
    EXPECT_TRUE(unknown.out.empty());
    EXPECT_NE(unknown.err.find("example9"), std::string::npos);
    EXPECT_NE(invoke({"hake", "--problem", "example3"}).code, 0);
    // runtime failure after a valid parse
    EXPECT_EQ(invoke({"solve", "--problem", "example1", "--depth", "0"}).code, 1);
}

TEST(Cli, OutFileMatchesStdout) {
    const auto path = std::filesystem::temp_directory_path() / "henstock_ode_cli_test.csv";
    const Outcome to_file = invoke({"table2", "--out", path.string()});
    ASSERT_EQ(to_file.code, 0) << to_file.err;
    EXPECT_TRUE(to_file.out.empty());
    std::ifstream in(path, std::ios::binary);
    const std::string written((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    EXPECT_EQ(written, invoke({"table2"}).out);
    std::filesystem::remove(path);
    EXPECT_EQ(invoke({"table2", "--out", "/nonexistent-dir/x.csv"}).code, 1);
}

TEST(Cli, PrettyFormat) {
    const Outcome r = invoke({"table1", "--format", "pretty"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.find(','), std::string::npos);
    EXPECT_NE(r.out.find("0.99793"), std::string::npos);
    EXPECT_NE(r.out.find("1.99862"), std::string::npos);
}

TEST(Cli, BoundMatchesLibrary) {
    const Outcome r = invoke({"bound", "--problem", "example4", "--level", "6"});
    ASSERT_EQ(r.code, 0) << r.err;
    const ErrorBudget b = theorem_bound(example4().spec, 6);
    const auto rows = parse_csv(r.out);
    bool seen = false;
    for (const auto& row : rows) {
        if (row[0] == "bound") {
            EXPECT_EQ(row[1], format_number(b.bound));
            seen = true;
        }
        if (row[0] == "omega_q") {
            EXPECT_EQ(row[1], format_number(b.omega_q));
        }
    }
    EXPECT_TRUE(seen);
}

TEST(Cli, DenseOutput) {
    const Outcome r = invoke({"solve", "--problem", "example4", "--level", "5", "--dense", "11"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 12u);
    EXPECT_EQ(rows[6][0], "0.5");
}

}  // namespace
}  // namespace henstock_ode::cli
