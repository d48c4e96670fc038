// End-to-end checks of the installed command surface: exit codes (0 ok,
// 1 contract violation, 2 usage), file round trips, and the no-partial-output
// rule for failed experiment runs.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "frostlab/io.hpp"

namespace {

namespace fs = std::filesystem;

const std::string kCli = FROSTLAB_CLI_PATH;

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

fs::path work_dir() {
    auto p = fs::temp_directory_path() / "frostlab_cli_tests";
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
    CHECK(run("no-such-subcommand") == 2);
    CHECK(run("verify-set") == 2);                       // missing required args
    CHECK(run("dim somefile --ladder nonsense") == 2);   // bad ladder syntax
    CHECK(run("--help") == 0);
}

TEST_CASE("contract violations exit with 1") {
    CHECK(run("verify-set /nonexistent/points.txt --s 1") == 1);
    auto dir = work_dir();
    CHECK(run("gen --kind bogus --out " + (dir / "x.txt").string()) == 1);
    CHECK(run("gen --kind grid --scale-exp 3") == 1);  // --out is required
}

TEST_CASE("generate, verify, and dimension round trip") {
    auto dir = work_dir();
    const auto pts = dir / "grid.txt";
    REQUIRE(run("gen --kind grid --scale-exp 3 --out " + pts.string()) == 0);
    CHECK(frostlab::load_points(pts.string()).size() == 64);

    const auto rep = dir / "verify.txt";
    REQUIRE(run("verify-set " + pts.string() + " --s 2 --out " + rep.string()) == 0);
    auto block = frostlab::parse_key_value(slurp(rep));
    CHECK(block.at("kind") == "ball");
    CHECK(std::stod(block.at("best_C")) >= 1.0);

    // Ladder stops at the set's native depth 3; beyond it the covering
    // saturates at 64 and would drag the fitted slope down.
    const auto dim_dir = dir / "dim";
    REQUIRE(run("dim " + pts.string() + " --ladder 1..3 --out " + dim_dir.string()) == 0);
    auto fit = frostlab::parse_key_value(slurp(dim_dir / "report.txt"));
    CHECK(std::stod(fit.at("slope")) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("dualize emits tubes and inverts back") {
    auto dir = work_dir();
    const auto pts = dir / "rnd.txt";
    REQUIRE(run("gen --kind random_delta --s 1 --scale-exp 6 --seed 2 --out " +
                pts.string()) == 0);
    const auto tubes = dir / "rnd_tubes.txt";
    REQUIRE(run("dualize " + pts.string() + " --out " + tubes.string()) == 0);
    const auto n_pts = frostlab::load_points(pts.string()).size();
    CHECK(frostlab::load_tubes(tubes.string()).size() == n_pts);
    const auto back = dir / "rnd_back.txt";
    REQUIRE(run("dualize " + tubes.string() + " --invert --scale-exp 6 --out " +
                back.string()) == 0);
    CHECK(frostlab::load_points(back.string()).size() == n_pts);
}

TEST_CASE("uniformize writes measure, profile, and level log") {
    auto dir = work_dir();
    const auto mu = dir / "measure.txt";
    REQUIRE(run("gen --kind measure --dim 1 --block-size 9 --blocks 2 --seed 3 --out " +
                mu.string()) == 0);
    const auto out = dir / "uni";
    REQUIRE(run("uniformize " + mu.string() + " --eta 0.5 --out " + out.string()) == 0);
    CHECK(fs::exists(out / "measure.txt"));
    CHECK(fs::exists(out / "profile.txt"));
    CHECK(fs::exists(out / "levels.csv"));
    REQUIRE(run("stable-scale " + (out / "profile.txt").string() + " --eps 0.5 --out " +
                (dir / "stable.txt").string()) == 0);
    auto block = frostlab::parse_key_value(slurp(dir / "stable.txt"));
    CHECK(block.count("delta_exp") == 1);
    CHECK(block.count("steps") == 1);
}

TEST_CASE("experiment runs from a config file") {
    auto dir = work_dir();
    const auto cfg = dir / "sweep.cfg";
    {
        std::ofstream out(cfg);
        out << "[experiment]\nsuite = fu-ren-sweep\n"
            << "[params]\ndelta_lo = 6\ndelta_hi = 6\nseeds = 1\n";
    }
    const auto out_dir = dir / "sweep_out";
    fs::remove_all(out_dir);
    REQUIRE(run("experiment --config " + cfg.string() + " --out " + out_dir.string() +
                " --seed 1") == 0);
    CHECK(fs::exists(out_dir / "sweep.csv"));
    CHECK(fs::exists(out_dir / "report.txt"));
}

TEST_CASE("malformed configs leave no partial output") {
    auto dir = work_dir();
    const auto cfg = dir / "broken.cfg";
    {
        std::ofstream out(cfg);
        out << "[experiment]\nsuite = fu-ren-sweep\nthis line is broken\n";
    }
    const auto out_dir = dir / "broken_out";
    fs::remove_all(out_dir);
    CHECK(run("experiment --config " + cfg.string() + " --out " + out_dir.string()) == 1);
    CHECK_FALSE(fs::exists(out_dir));

    // Same for a config naming an unknown suite.
    const auto cfg2 = dir / "unknown.cfg";
    {
        std::ofstream out(cfg2);
        out << "[experiment]\nsuite = wat\n";
    }
    CHECK(run("experiment --config " + cfg2.string() + " --out " + out_dir.string()) == 1);
    CHECK_FALSE(fs::exists(out_dir));
}
