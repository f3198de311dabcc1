// End-to-end checks of the command-line tool: exit codes per error family,
// byte-stable outputs, and the shape of the emitted tables. The binary is
// located via SSC_CLI (falling back to the build-tree path baked in at
// configure time).

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"

using testutil::config_file;
using testutil::data_file;
using testutil::run_cli;
using testutil::scratch_dir;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

int line_count(const std::string& text) {
    int n = 0;
    for (char c : text) n += (c == '\n');
    return n;
}

std::string shell_quote(const std::string& path) { return "'" + path + "'"; }

}  // namespace

TEST_CASE("exit codes follow the documented table") {
    std::string out = scratch_dir("exit");

    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("--version") == 0);
    CHECK(run_cli("fit --panel " + shell_quote(data_file("panel_basic.csv")) +
                  " --out " + shell_quote(out)) == 0);

    // Usage problems and unreadable inputs.
    CHECK(run_cli("--frobnicate") == 2);
    CHECK(run_cli("fit --panel " + shell_quote(data_file("no_such_panel.csv")) +
                  " --out " + shell_quote(out)) == 2);

    // Panel validation failures.
    for (const char* name : {"panel_nonabsorbing.csv", "panel_nopre.csv",
                             "panel_dupcell.csv", "panel_missingcell.csv",
                             "panel_untreated.csv"}) {
        CHECK(run_cli("fit --panel " + shell_quote(data_file(name)) + " --out " +
                      shell_quote(out)) == 3);
    }

    // Singular effect system: every unit treated in some post period.
    CHECK(run_cli("fit --panel " + shell_quote(data_file("panel_alltreated.csv")) +
                  " --out " + shell_quote(out)) == 4);

    // Hypothesis construction: a matrix whose rows do not match the panel.
    std::string bad_matrix = out + "/bad_matrix.csv";
    std::ofstream(bad_matrix) << "1,0,0,5\n";  // three coefficients, panel has two cells
    CHECK(run_cli("test --panel " + shell_quote(data_file("panel_basic.csv")) +
                  " --matrix " + shell_quote(bad_matrix) + " --out " + shell_quote(out)) == 5);

    // Infeasible level: six pre-periods and a two-period window cannot
    // support a 10% test.
    CHECK(run_cli("test --panel " + shell_quote(data_file("panel_quarterly.csv")) +
                  " --att 1 --out " + shell_quote(out)) == 6);

    // plotdata before fit.
    std::string empty = scratch_dir("nofit");
    CHECK(run_cli("plotdata --panel " + shell_quote(data_file("panel_basic.csv")) +
                  " --dir " + shell_quote(empty) + " --out " + shell_quote(out)) == 8);

    // Config mistakes surface as usage errors.
    std::string bad_cfg = out + "/bad.cfg";
    std::ofstream(bad_cfg) << "design = st\nadoption = 41,0\nunits = 2\nbogus = 1\n";
    CHECK(run_cli("simulate --config " + shell_quote(bad_cfg) + " --seed 1 --out " +
                  shell_quote(out)) == 2);

    std::filesystem::remove_all(out);
    std::filesystem::remove_all(empty);
}

TEST_CASE("hypothesis flags are mutually exclusive") {
    std::string out = scratch_dir("flags");
    std::string panel = shell_quote(data_file("panel_basic.csv"));
    CHECK(run_cli("test --panel " + panel + " --att 1 --contrast A B --out " +
                  shell_quote(out)) == 2);
    CHECK(run_cli("test --panel " + panel + " --att 1 --matrix x.csv --out " +
                  shell_quote(out)) == 2);
    std::filesystem::remove_all(out);
}

TEST_CASE("ingest canonicalizes row order") {
    // A shuffled copy of the twin panel must ingest to the same bytes as the
    // original: ordering is part of the output contract.
    std::string work = scratch_dir("ingest");
    std::string shuffled_src = work + "/shuffled.csv";
    {
        std::ifstream in(data_file("panel_basic.csv"));
        REQUIRE(in.good());
        std::string header;
        std::getline(in, header);
        std::vector<std::string> rows;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty()) rows.push_back(line);
        }
        // Deterministic reorder: reverse, then interleave halves.
        std::vector<std::string> mixed;
        std::size_t half = rows.size() / 2;
        for (std::size_t i = 0; i < half; ++i) {
            mixed.push_back(rows[rows.size() - 1 - i]);
            mixed.push_back(rows[i]);
        }
        for (std::size_t i = 2 * half; i < rows.size(); ++i) {
            mixed.push_back(rows[i]);
        }
        std::ofstream outfile(shuffled_src);
        outfile << header << "\n";
        for (const std::string& row : mixed) outfile << row << "\n";
    }

    std::string dir_a = work + "/a";
    std::string dir_b = work + "/b";
    REQUIRE(run_cli("ingest --panel " + shell_quote(data_file("panel_basic.csv")) +
                    " --out " + shell_quote(dir_a)) == 0);
    REQUIRE(run_cli("ingest --panel " + shell_quote(shuffled_src) + " --out " +
                    shell_quote(dir_b)) == 0);
    CHECK(slurp(dir_a + "/panel.csv") == slurp(dir_b + "/panel.csv"));

    std::filesystem::remove_all(work);
}

TEST_CASE("fit output is byte-stable across runs") {
    std::string dir_a = scratch_dir("fit_a");
    std::string dir_b = scratch_dir("fit_b");
    std::string panel = shell_quote(data_file("panel_noisy.csv"));
    REQUIRE(run_cli("fit --panel " + panel + " --out " + shell_quote(dir_a)) == 0);
    REQUIRE(run_cli("fit --panel " + panel + " --threads 3 --out " +
                    shell_quote(dir_b)) == 0);
    for (const char* name : {"weights.csv", "fit_diagnostics.csv", "tau.csv",
                             "att.csv", "manifest.txt"}) {
        CAPTURE(name);
        CHECK(slurp(dir_a + "/" + name) == slurp(dir_b + "/" + name));
    }
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
}

TEST_CASE("the twin panel pipeline produces the expected artifacts") {
    std::string out = scratch_dir("pipeline");
    std::string panel = shell_quote(data_file("panel_basic.csv"));

    REQUIRE(run_cli("fit --panel " + panel + " --out " + shell_quote(out)) == 0);
    REQUIRE(run_cli("test --panel " + panel + " --att 1 --null 2 --out " +
                    shell_quote(out)) == 0);

    std::string report = slurp(out + "/test_report.txt");
    CHECK(report.find("hypothesis: ATT[s=1] = 2") != std::string::npos);
    CHECK(report.find("decision: fail_to_reject") != std::string::npos);
    CHECK(report.find("statistic: 0\n") != std::string::npos);

    // 20 pre-periods, window of 2: 18 rolling draws plus the header.
    CHECK(line_count(slurp(out + "/draws.csv")) == 19);

    REQUIRE(run_cli("ci --panel " + panel + " --out " + shell_quote(out)) == 0);
    std::string ci = slurp(out + "/ci.csv");
    CHECK(ci.find("1,2,2,2,") != std::string::npos);  // degenerate at the truth
    CHECK(ci.find("2,3,3,3,") != std::string::npos);

    REQUIRE(run_cli("plotdata --panel " + panel + " --dir " + shell_quote(out) +
                    " --out " + shell_quote(out)) == 0);
    std::string att_ci = slurp(out + "/att_ci.csv");
    CHECK(att_ci.find("s,n_s,att_hat,lo,hi,alpha") == 0);
    std::string gaps = slurp(out + "/gaps.csv");
    CHECK(gaps.find("unit,time,event_time,gap") == 0);
    // Four units over 22 periods.
    CHECK(line_count(gaps) == 1 + 4 * 22);

    std::filesystem::remove_all(out);
}

TEST_CASE("simulate is reproducible for a fixed seed") {
    std::string dir_a = scratch_dir("sim_a");
    std::string dir_b = scratch_dir("sim_b");
    std::string base = "simulate --config " + shell_quote(config_file("study_smoke.cfg")) +
                       " --seed 42 --set reps=2";
    REQUIRE(run_cli(base + " --out " + shell_quote(dir_a)) == 0);
    REQUIRE(run_cli(base + " --threads 2 --out " + shell_quote(dir_b)) == 0);
    for (const char* name :
         {"mc_report.txt", "mc_horizons.csv", "mc_rates.csv", "manifest.txt"}) {
        CAPTURE(name);
        CHECK(slurp(dir_a + "/" + name) == slurp(dir_b + "/" + name));
    }
    CHECK(slurp(dir_a + "/mc_report.txt").find("replications") != std::string::npos);
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
}
