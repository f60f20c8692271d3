#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "panelhet/bandwidth.hpp"
#include "panelhet/panel.hpp"
#include "panelhet/unit_stats.hpp"

#ifndef PANELHET_CLI_PATH
#error "PANELHET_CLI_PATH must point at the command-line binary"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kTmp = "cli_tmp";

struct RunResult {
    int code = -1;
    std::string out, err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    fs::create_directories(kTmp);
    std::string out_f = std::string(kTmp) + "/stdout.txt";
    std::string err_f = std::string(kTmp) + "/stderr.txt";
    std::string cmd = std::string(PANELHET_CLI_PATH) + " " + args + " >" + out_f +
                      " 2>" + err_f;
    int rc = std::system(cmd.c_str());
    RunResult res;
    res.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    res.out = slurp(out_f);
    res.err = slurp(err_f);
    return res;
}

std::string write_long_panel(const std::string& name, int N, int T,
                             std::uint64_t seed, int constant_unit = -1) {
    fs::create_directories(kTmp);
    std::string path = std::string(kTmp) + "/" + name;
    std::ofstream out(path);
    out << "unit,time,value\n";
    oracle::TestRand rnd(seed);
    char buf[64];
    for (int i = 0; i < N; ++i) {
        for (int t = 0; t < T; ++t) {
            double v = i == constant_unit ? 5.0 : rnd.uniform(-2, 2);
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << "u" << (i + 1 < 10 ? "0" : "") << i + 1 << "," << t + 1 << ","
                << buf << "\n";
        }
    }
    return path;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::vector<std::vector<double>> parse_csv_numbers(const std::string& path) {
    std::vector<std::vector<double>> rows;
    auto ls = lines_of(slurp(path));
    for (std::size_t i = 1; i < ls.size(); ++i) {  // skip header
        std::vector<double> row;
        std::istringstream ss(ls[i]);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (tok.find_first_not_of("0123456789+-.eEinfa") == std::string::npos)
                row.push_back(std::stod(tok));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("estimate subcommand happy path") {
    auto input = write_long_panel("panel_a.csv", 60, 12, 11);
    std::string out = std::string(kTmp) + "/est_a.csv";
    auto r = run_cli("estimate --input " + input + " --kind acor1 --output " + out);
    CHECK(r.code == 0);

    auto ls = lines_of(slurp(out));
    REQUIRE(ls.size() == 513);  // header + default 512-point grid
    CHECK(ls[0] == "x,f_ne,f_hpj,ci_lo,ci_hi");
    auto rows = parse_csv_numbers(out);
    double prev_x = -1e300;
    for (const auto& row : rows) {
        REQUIRE(row.size() == 5);
        for (double v : row) CHECK(std::isfinite(v));
        CHECK(row[0] > prev_x);
        prev_x = row[0];
        CHECK(row[3] <= row[4]);  // ci_lo <= ci_hi
    }

    json meta = json::parse(slurp(out + ".meta.json"));
    CHECK(meta["command"] == "estimate");
    CHECK(meta["kind"] == "acor1");
    CHECK(meta["n_units"] == 60);
    CHECK(meta["n_times"] == 12);
    CHECK(meta["bandwidth"].get<double>() > 0.0);
    CHECK(meta["estimators"] == json::array({"ne", "hpj"}));
    CHECK(meta["ci"]["estimator"] == "hpj");

    // Re-running the same command reproduces the output byte for byte.
    std::string out2 = std::string(kTmp) + "/est_a2.csv";
    auto r2 = run_cli("estimate --input " + input + " --kind acor1 --output " + out2);
    CHECK(r2.code == 0);
    CHECK(slurp(out) == slurp(out2));
}

TEST_CASE("estimate rejects bad inputs with exit code 2") {
    auto input = write_long_panel("panel_b.csv", 20, 10, 12);
    auto r = run_cli("estimate --input " + input + " --bandwidth -0.1 --output " +
                     std::string(kTmp) + "/x.csv");
    CHECK(r.code == 2);
    CHECK(r.err.find("InvalidBandwidth") != std::string::npos);

    auto degen = write_long_panel("panel_degen.csv", 20, 10, 13, /*constant_unit=*/6);
    r = run_cli("estimate --input " + degen + " --kind acor1 --output " +
                std::string(kTmp) + "/x.csv");
    CHECK(r.code == 2);
    CHECK(r.err.find("DegenerateUnit") != std::string::npos);
    CHECK(r.err.find("u07") != std::string::npos);

    r = run_cli("estimate --input " + input + " --target kcdf --estimators ne,hpj "
                "--output " + std::string(kTmp) + "/x.csv");
    CHECK(r.code == 2);
    CHECK(r.err.find("UnsupportedEstimator") != std::string::npos);

    r = run_cli("estimate --input " + input + " --estimators ie --output " +
                std::string(kTmp) + "/x.csv");
    CHECK(r.code == 2);
    CHECK(r.err.find("UnsupportedEstimator") != std::string::npos);
}

TEST_CASE("missing input file exits with code 1") {
    auto r = run_cli("estimate --input " + std::string(kTmp) +
                     "/no_such_file.csv --output " + std::string(kTmp) + "/x.csv");
    CHECK(r.code == 1);
    CHECK(!r.err.empty());
}

TEST_CASE("cdf targets") {
    auto input = write_long_panel("panel_c.csv", 50, 9, 14);
    std::string out = std::string(kTmp) + "/kcdf.csv";
    auto r = run_cli("estimate --input " + input + " --target kcdf --estimators ne "
                     "--output " + out);
    CHECK(r.code == 0);
    auto ls = lines_of(slurp(out));
    CHECK(ls[0] == "x,f_ne");
    auto rows = parse_csv_numbers(out);
    double prev = -1.0;
    for (const auto& row : rows) {
        CHECK(row[1] >= 0.0);
        CHECK(row[1] <= 1.0);
        CHECK(row[1] >= prev - 1e-15);
        prev = row[1];
    }

    std::string out_e = std::string(kTmp) + "/ecdf.csv";
    r = run_cli("estimate --input " + input + " --target ecdf --estimators ne "
                "--at -3,0,3 --output " + out_e);
    CHECK(r.code == 0);
    auto rows_e = parse_csv_numbers(out_e);
    REQUIRE(rows_e.size() == 3);
    CHECK(rows_e[0][0] == -3.0);
    CHECK(rows_e[2][1] == 1.0);  // everything lies below x = 3
}

TEST_CASE("explicit evaluation points") {
    auto input = write_long_panel("panel_d.csv", 30, 8, 15);
    std::string out = std::string(kTmp) + "/at.csv";
    auto r = run_cli("estimate --input " + input + " --at 1,0,2,1 --estimators ne "
                     "--no-ci --output " + out);
    CHECK(r.code == 0);
    auto rows = parse_csv_numbers(out);
    REQUIRE(rows.size() == 3);  // sorted, duplicates removed
    CHECK(rows[0][0] == 0.0);
    CHECK(rows[1][0] == 1.0);
    CHECK(rows[2][0] == 2.0);
    CHECK(lines_of(slurp(out))[0] == "x,f_ne");
}

TEST_CASE("wide layout loads the same panel as long layout") {
    auto input = write_long_panel("panel_e.csv", 12, 6, 16);
    // Rewrite the same data in wide layout.
    auto p = panelhet::load_csv_file(input, panelhet::CsvLayout::Long);
    std::string wide = std::string(kTmp) + "/panel_e_wide.csv";
    {
        std::ofstream w(wide);
        w << "unit";
        for (const auto& t : p.time_ids) w << "," << t;
        w << "\n";
        char buf[64];
        for (std::size_t i = 0; i < p.n_units(); ++i) {
            w << p.unit_ids[i];
            for (std::size_t t = 0; t < p.n_times(); ++t) {
                std::snprintf(buf, sizeof buf, "%.17g", p.at(i, t));
                w << "," << buf;
            }
            w << "\n";
        }
    }
    std::string out_l = std::string(kTmp) + "/est_long.csv";
    std::string out_w = std::string(kTmp) + "/est_wide.csv";
    auto rl = run_cli("estimate --input " + input + " --output " + out_l);
    auto rw = run_cli("estimate --input " + wide + " --layout wide --output " + out_w);
    CHECK(rl.code == 0);
    CHECK(rw.code == 0);
    CHECK(slurp(out_l) == slurp(out_w));
}

TEST_CASE("simulate subcommand is deterministic across thread counts") {
    std::string out1 = std::string(kTmp) + "/sim1.csv";
    std::string out2 = std::string(kTmp) + "/sim2.csv";
    std::string base = "simulate --N 40 --T 12 --R 6 --seed 9 --kinds mean,acov0,acor1 "
                       "--estimators ne,hpj,toj,ie --quantiles 0.3,0.7 ";
    auto r1 = run_cli(base + "--threads 1 --output " + out1);
    auto r2 = run_cli(base + "--threads 8 --output " + out2);
    CHECK(r1.code == 0);
    CHECK(r2.code == 0);
    CHECK(slurp(out1) == slurp(out2));
    CHECK(slurp(out1).substr(0, 50).find("kind,quantile,estimator,true,bias,std,cp") == 0);
    REQUIRE(lines_of(slurp(out1)).size() == 1 + 3 * 2 * 4);

    auto r3 = run_cli(base + "--threads 1 --output " + out1);
    CHECK(r3.code == 0);
    CHECK(slurp(out1) == slurp(out2));
}

TEST_CASE("simulate validation failures exit with code 2") {
    auto r = run_cli("simulate --R 0 --output " + std::string(kTmp) + "/x.csv");
    CHECK(r.code == 2);
    r = run_cli("simulate --R 2 --quantiles 0.5,1.5 --output " + std::string(kTmp) +
                "/x.csv");
    CHECK(r.code == 2);
    r = run_cli("simulate --R 2 --kinds acov1 --output " + std::string(kTmp) + "/x.csv");
    CHECK(r.code == 2);  // no closed-form target for acov1
    CHECK(r.err.find("OutOfSupport") != std::string::npos);
}

TEST_CASE("preset fills unset simulate flags") {
    std::string out = std::string(kTmp) + "/preset.csv";
    auto r = run_cli("simulate --preset table1-cell --R 2 --output " + out);
    CHECK(r.code == 0);
    json meta = json::parse(slurp(out + ".meta.json"));
    CHECK(meta["kinds"] == json::array({"mean"}));
    CHECK(meta["estimators"] == json::array({"ne", "hpj", "ie"}));
    CHECK(meta["N"] == 1000);
    CHECK(meta["T"] == 96);
    CHECK(meta["R"] == 2);  // explicit flag wins over the preset
    CHECK(meta["seed"] == 20260815);
    CHECK(meta["bandwidth"].get<double>() == 0.650);
    CHECK(lines_of(slurp(out)).size() == 1 + 3);
}

TEST_CASE("thread count environment variable") {
    std::string out = std::string(kTmp) + "/env.csv";
    setenv("PANELHET_THREADS", "3", 1);
    auto r = run_cli("simulate --N 20 --T 8 --R 3 --seed 2 --quantiles 0.5 "
                     "--estimators ne --output " + out);
    CHECK(r.code == 0);
    json meta = json::parse(slurp(out + ".meta.json"));
    CHECK(meta["threads"] == 3);

    setenv("PANELHET_THREADS", "abc", 1);
    r = run_cli("simulate --N 20 --T 8 --R 3 --seed 2 --quantiles 0.5 "
                "--estimators ne --output " + out);
    CHECK(r.code == 2);
    unsetenv("PANELHET_THREADS");

    // An explicit flag beats the environment.
    setenv("PANELHET_THREADS", "abc", 1);
    r = run_cli("simulate --N 20 --T 8 --R 3 --seed 2 --quantiles 0.5 "
                "--estimators ne --threads 2 --output " + out);
    CHECK(r.code == 0);
    unsetenv("PANELHET_THREADS");
}

TEST_CASE("bandwidth subcommand") {
    auto input = write_long_panel("panel_f.csv", 80, 10, 17);
    auto r = run_cli("bandwidth --input " + input);
    CHECK(r.code == 0);
    // The printed value matches an in-process resolution of the same rule.
    auto p = panelhet::load_csv_file(input, panelhet::CsvLayout::Long);
    auto xi = panelhet::estimate_units(p, panelhet::HeterogeneityKind::Mean());
    double want = panelhet::rot_bandwidth(xi, panelhet::KernelSpec::epanechnikov());
    CHECK(std::stod(r.out) == doctest::Approx(want).epsilon(1e-5));

    r = run_cli("bandwidth --input " + input + " --bandwidth 0.5");
    CHECK(r.code == 0);
    CHECK(r.out == "0.5\n");

    auto flat = write_long_panel("panel_flat.csv", 10, 5, 18, -1);
    {
        std::ofstream out(flat);  // all units identical -> zero dispersion of means
        out << "unit,time,value\n";
        for (int i = 0; i < 10; ++i)
            for (int t = 0; t < 5; ++t)
                out << "u" << i + 1 << "," << t + 1 << "," << (t + 1) * 0.5 << "\n";
    }
    r = run_cli("bandwidth --input " + flat);
    CHECK(r.code == 2);
    CHECK(r.err.find("DegenerateDispersion") != std::string::npos);
}

TEST_CASE("usage errors and help") {
    auto r = run_cli("--help");
    CHECK(r.code == 0);
    CHECK(r.out.find("estimate") != std::string::npos);
    CHECK(r.out.find("simulate") != std::string::npos);
    CHECK(r.out.find("bandwidth") != std::string::npos);

    r = run_cli("");
    CHECK(r.code == 2);  // a subcommand is required

    r = run_cli("estimate");
    CHECK(r.code == 2);  // --input is required

    r = run_cli("frobnicate");
    CHECK(r.code == 2);
}

}  // TEST_SUITE
