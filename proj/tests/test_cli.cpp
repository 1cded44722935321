// test_cli.cpp - exercises the installed command line tool end to end:
// exit codes, stdout payloads and deterministic experiment outputs.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "crosslocate/derivative.hpp"
#include "crosslocate/experiment.hpp"
#include "crosslocate/pattern.hpp"
#include "test_util.hpp"

using namespace crosslocate;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args, const std::filesystem::path& out_file) {
    const std::string cmd = std::string(CROSSLOCATE_CLI_PATH) + " " + args + " >" +
                            out_file.string() + " 2>" + out_file.string() + ".err";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = testutil::slurp(out_file);
    return r;
}

} // namespace

TEST_CASE("cli: planted match fixture returns the true center with value 0") {
    testutil::TempDir tmp("cli_match");

    SyntheticTerrainSpec ts;
    ts.seed = 21;
    ts.nrows = 128;
    ts.ncols = 128;
    const DemCloud dem = synth_terrain(ts);
    save_ascii_grid(dem, tmp.file("dem.asc"));

    CrossSpec cs;
    cs.center = Point3{64, 64, 0};
    cs.arm_length_points = 15;
    cs.first_arm_angle_deg = 25.0;
    const PointPattern cross = build_cross(dem, cs);
    const PointPattern target = extract_target(cross, exact_indices(arc_derivative(cross)));
    write_pattern_json(target, tmp.file("target.json"));

    const RunResult r = run_cli("match --dem " + tmp.file("dem.asc").string() +
                                    " --pattern " + tmp.file("target.json").string() +
                                    " --guess 64,64 --measure w2 --lambda 20" +
                                    " --radius 5 --angles 4",
                                tmp.file("match.out"));
    REQUIRE(r.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j.at("best").at("x").get<double>() == 64.0);
    CHECK(j.at("best").at("y").get<double>() == 64.0);
    CHECK(j.at("best").at("value").get<double>() == 0.0);
    CHECK(j.at("best").at("measure").get<std::string>() == "w2");
    CHECK(j.at("candidates_evaluated").get<long>() > 0);

    // --out writes the same report to a file.
    const RunResult r2 = run_cli("match --dem " + tmp.file("dem.asc").string() +
                                     " --pattern " + tmp.file("target.json").string() +
                                     " --guess 64,64 --radius 5 --angles 4 --out " +
                                     tmp.file("report.json").string(),
                                 tmp.file("match2.out"));
    REQUIRE(r2.exit_code == 0);
    CHECK(std::filesystem::exists(tmp.file("report.json")));
}

TEST_CASE("cli: missing dem file exits 1, bad flags exit 64, no candidates exit 2") {
    testutil::TempDir tmp("cli_errors");
    PointPattern pat;
    pat.points = {Point3{0, 0, 0}, Point3{1, 0, 0}};
    write_pattern_json(pat, tmp.file("p.json"));

    const RunResult missing = run_cli(
        "match --dem /nonexistent.asc --pattern " + tmp.file("p.json").string() +
            " --guess 0,0",
        tmp.file("a.out"));
    CHECK(missing.exit_code == 1);

    SyntheticTerrainSpec ts;
    ts.seed = 3;
    ts.nrows = 64;
    ts.ncols = 64;
    save_ascii_grid(synth_terrain(ts), tmp.file("dem.asc"));

    const RunResult bogus = run_cli("match --dem " + tmp.file("dem.asc").string() +
                                        " --pattern " + tmp.file("p.json").string() +
                                        " --guess 10,10 --measure bogus",
                                    tmp.file("b.out"));
    CHECK(bogus.exit_code == 64);

    const RunResult unknown_flag =
        run_cli("match --not-a-flag", tmp.file("c.out"));
    CHECK(unknown_flag.exit_code == 64);

    const RunResult unknown_cmd = run_cli("frobnicate", tmp.file("d.out"));
    CHECK(unknown_cmd.exit_code == 64);

    // Guess height nowhere near the terrain: infeasible, exit 2.
    const RunResult nocand = run_cli("match --dem " + tmp.file("dem.asc").string() +
                                         " --pattern " + tmp.file("p.json").string() +
                                         " --guess 32,32,-5000 --radius 4",
                                     tmp.file("e.out"));
    CHECK(nocand.exit_code == 2);
}

TEST_CASE("cli: derive writes patterns and rejects out-of-bounds centers") {
    testutil::TempDir tmp("cli_derive");
    SyntheticTerrainSpec ts;
    ts.seed = 31;
    ts.nrows = 128;
    ts.ncols = 128;
    save_ascii_grid(synth_terrain(ts), tmp.file("dem.asc"));

    const std::string prefix = (tmp.path / "out").string();
    const RunResult ok = run_cli("derive --dem " + tmp.file("dem.asc").string() +
                                     " --center 64,64 --alpha 45 --arm-points 20 " +
                                     "--out-prefix " + prefix,
                                 tmp.file("a.out"));
    REQUIRE(ok.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(ok.out);
    CHECK(j.at("indices").size() == 41);
    const PointPattern cross = read_pattern_json(prefix + "_cross.json");
    const PointPattern target = read_pattern_json(prefix + "_target.json");
    CHECK(cross.size() == 81);
    CHECK(target.size() == 41);
    CHECK(std::filesystem::exists(prefix + "_derivative.csv"));

    const RunResult oob = run_cli("derive --dem " + tmp.file("dem.asc").string() +
                                      " --center 2,2 --arm-points 20 --out-prefix " +
                                      prefix,
                                  tmp.file("b.out"));
    CHECK(oob.exit_code == 2);
}

TEST_CASE("cli: derive alpha symmetry on an isotropic fixture") {
    // On a radially symmetric paraboloid, arm 1 at alpha=0 equals arm 2 at
    // alpha=270 (both head north).
    testutil::TempDir tmp("cli_alpha");
    const DemCloud dem = testutil::make_grid(129, 129, 1.0, -64, -64, [](double x, double y) {
        return 0.02 * (x * x + y * y);
    });
    save_ascii_grid(dem, tmp.file("dem.asc"));
    const RunResult a0 = run_cli("derive --dem " + tmp.file("dem.asc").string() +
                                     " --center 0,0 --alpha 0 --arm-points 10 " +
                                     "--out-prefix " + (tmp.path / "a0").string(),
                                 tmp.file("a.out"));
    const RunResult a270 = run_cli("derive --dem " + tmp.file("dem.asc").string() +
                                       " --center 0,0 --alpha 270 --arm-points 10 " +
                                       "--out-prefix " + (tmp.path / "a270").string(),
                                   tmp.file("b.out"));
    REQUIRE(a0.exit_code == 0);
    REQUIRE(a270.exit_code == 0);
    const PointPattern c0 = read_pattern_json((tmp.path / "a0").string() + "_cross.json");
    const PointPattern c270 = read_pattern_json((tmp.path / "a270").string() + "_cross.json");
    // Arm 1 of the first (indices 1..10) vs arm 2 of the second (11..20).
    for (int k = 0; k < 10; ++k) {
        CHECK(c0.points[1 + k].x == c270.points[11 + k].x);
        CHECK(c0.points[1 + k].y == c270.points[11 + k].y);
        CHECK(c0.points[1 + k].z == c270.points[11 + k].z);
    }

    // Likewise alpha=90 arm 1 (west) coincides with alpha=0 arm 2.
    const RunResult a90 = run_cli("derive --dem " + tmp.file("dem.asc").string() +
                                      " --center 0,0 --alpha 90 --arm-points 10 " +
                                      "--out-prefix " + (tmp.path / "a90").string(),
                                  tmp.file("c.out"));
    REQUIRE(a90.exit_code == 0);
    const PointPattern c90 = read_pattern_json((tmp.path / "a90").string() + "_cross.json");
    for (int k = 0; k < 10; ++k) {
        CHECK(c90.points[1 + k].x == c0.points[11 + k].x);
        CHECK(c90.points[1 + k].y == c0.points[11 + k].y);
    }
}

TEST_CASE("cli: CROSSLOCATE_THREADS mirrors --threads") {
    testutil::TempDir tmp("cli_env");
    testutil::spit(tmp.file("spec.json"), R"({
      "terrain": {"synthetic": {"seed": 9, "nrows": 96, "ncols": 96, "n_bumps": 40}},
      "n_trials": 1,
      "perturbation_range": 2,
      "lambda_sweep": [20],
      "rng_seed": 5,
      "cross": {"arm_points": 10},
      "search": {"radius": 4, "n_angles": 2}
    })");
    const std::string base = "experiment --spec " + tmp.file("spec.json").string();
    const RunResult flag = run_cli(base + " --out-dir " + (tmp.path / "flag").string() +
                                       " --threads 2",
                                   tmp.file("a.out"));
    REQUIRE(flag.exit_code == 0);
    const std::string cmd = "CROSSLOCATE_THREADS=2 " + std::string(CROSSLOCATE_CLI_PATH) +
                            " " + base + " --out-dir " + (tmp.path / "env").string() +
                            " >" + tmp.file("b.out").string() + " 2>/dev/null";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(testutil::slurp(tmp.path / "flag" / "trials.csv") ==
          testutil::slurp(tmp.path / "env" / "trials.csv"));
}

TEST_CASE("cli: synth then info round-trip") {
    testutil::TempDir tmp("cli_synth");
    const RunResult s = run_cli("synth --seed 5 --rows 64 --cols 80 --out " +
                                    tmp.file("t.asc").string(),
                                tmp.file("a.out"));
    REQUIRE(s.exit_code == 0);
    const RunResult i = run_cli("info --dem " + tmp.file("t.asc").string(),
                                tmp.file("b.out"));
    REQUIRE(i.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(i.out);
    CHECK(j.at("nrows").get<int>() == 64);
    CHECK(j.at("ncols").get<int>() == 80);
    CHECK(j.at("valid_cells").get<long>() == 64 * 80);
}

TEST_CASE("cli: experiment dry-run validates without writing") {
    testutil::TempDir tmp("cli_dry");
    testutil::spit(tmp.file("spec.json"), R"({
      "terrain": {"synthetic": {"seed": 8, "nrows": 96, "ncols": 96, "n_bumps": 40}},
      "n_trials": 1,
      "perturbation_range": 3,
      "lambda_sweep": [1, 20],
      "rng_seed": 77,
      "cross": {"arm_points": 10},
      "search": {"radius": 5, "n_angles": 2}
    })");
    const RunResult dry = run_cli("experiment --spec " + tmp.file("spec.json").string() +
                                      " --out-dir " + (tmp.path / "never").string() +
                                      " --dry-run",
                                  tmp.file("a.out"));
    REQUIRE(dry.exit_code == 0);
    CHECK_FALSE(std::filesystem::exists(tmp.path / "never"));

    testutil::spit(tmp.file("bad.json"), R"({"terrain": {"synthetic": {}}, "n_trials": 0})");
    const RunResult bad = run_cli("experiment --spec " + tmp.file("bad.json").string() +
                                      " --dry-run",
                                  tmp.file("b.out"));
    CHECK(bad.exit_code == 1);
}

TEST_CASE("cli: experiment runs twice to byte-identical outputs") {
    testutil::TempDir tmp("cli_exp");
    testutil::spit(tmp.file("spec.json"), R"({
      "terrain": {"synthetic": {"seed": 8, "nrows": 96, "ncols": 96, "n_bumps": 40,
                                 "sigma_min": 6, "sigma_max": 15}},
      "n_trials": 2,
      "perturbation_range": 3,
      "lambda_sweep": [1, 20],
      "rng_seed": 77,
      "cross": {"arm_points": 10},
      "search": {"radius": 5, "n_angles": 2}
    })");
    const RunResult a = run_cli("experiment --spec " + tmp.file("spec.json").string() +
                                    " --out-dir " + (tmp.path / "a").string() +
                                    " --threads 1",
                                tmp.file("a.out"));
    REQUIRE(a.exit_code == 0);
    const RunResult b = run_cli("experiment --spec " + tmp.file("spec.json").string() +
                                    " --out-dir " + (tmp.path / "b").string() +
                                    " --threads 2",
                                tmp.file("b.out"));
    REQUIRE(b.exit_code == 0);
    CHECK(testutil::slurp(tmp.path / "a" / "trials.csv") ==
          testutil::slurp(tmp.path / "b" / "trials.csv"));
    CHECK(testutil::slurp(tmp.path / "a" / "summary.txt") ==
          testutil::slurp(tmp.path / "b" / "summary.txt"));
    CHECK(testutil::slurp(tmp.path / "a" / "profiles" / "trial_1.csv") ==
          testutil::slurp(tmp.path / "b" / "profiles" / "trial_1.csv"));
}

TEST_CASE("cli: stdout carries only the json payload") {
    testutil::TempDir tmp("cli_stdout");
    SyntheticTerrainSpec ts;
    ts.seed = 51;
    ts.nrows = 64;
    ts.ncols = 64;
    save_ascii_grid(synth_terrain(ts), tmp.file("dem.asc"));
    const RunResult i = run_cli("info --dem " + tmp.file("dem.asc").string(),
                                tmp.file("a.out"));
    REQUIRE(i.exit_code == 0);
    const nlohmann::json parsed = nlohmann::json::parse(i.out);
    CHECK(parsed.is_object());
}
