#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chirplock/cli.hpp"

namespace fs = std::filesystem;
using namespace chirplock;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "chirplock");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("chirplock_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("configuration errors exit with code 2") {
        const auto bad = invoke({"ladder", "--p1", "0.5", "--p2", "-1", "--tau-end", "1"});
        CHECK(bad.code == cli::kExitConfig);
        CHECK(bad.err.find("--p2") != std::string::npos);
        CHECK(invoke({"ladder", "--p1", "0.5"}).code == cli::kExitConfig);
        CHECK(invoke({"no-such-command"}).code == cli::kExitConfig);
        const auto dir = scratch_dir("badtime");
        CHECK(invoke({"-o", dir.string(), "ladder", "--p1", "1", "--p2", "1", "--tau0", "2", "--tau-end", "1"}).code ==
              cli::kExitConfig);
        fs::remove_all(dir);
    }

    TEST_CASE("solver errors exit with code 3") {
        const auto dir = scratch_dir("miss");
        const auto r = invoke({"-o", dir.string(), "scan", "--p2", "8", "--p1", "0.05"});
        CHECK(r.code == cli::kExitSolver);
        fs::remove_all(dir);
    }

    TEST_CASE("a run writes its manifest and resolved configuration") {
        const auto dir = scratch_dir("ladder");
        const auto r = invoke({"-o", dir.string(), "ladder", "--p1", "0.8", "--p2", "2", "--tau-end", "5"});
        REQUIRE(r.code == cli::kExitOk);
        for (const char* f : {"manifest.json", "resolved.toml", "populations.csv", "run.json", "populations.gp"}) {
            CHECK(fs::exists(dir / f));
        }
        CHECK(slurp(dir / "populations.csv").rfind("tau,n,re,im,population\n", 0) == 0);

        // replaying the resolved configuration reproduces the run
        const auto again = scratch_dir("ladder_replay");
        const auto r2 = invoke({"--config", (dir / "resolved.toml").string(), "-o", again.string()});
        REQUIRE(r2.code == cli::kExitOk);
        CHECK(slurp(again / "populations.csv") == slurp(dir / "populations.csv"));

        // flags override the configuration file
        const auto over = scratch_dir("ladder_override");
        const auto r3 = invoke({"--config", (dir / "resolved.toml").string(), "-o", over.string(), "ladder",
                                "--tau-end", "4"});
        REQUIRE(r3.code == cli::kExitOk);
        CHECK(slurp(over / "resolved.toml").find("tau-end = 4") != std::string::npos);
        for (const auto& d : {dir, again, over}) fs::remove_all(d);
    }

    TEST_CASE("worker count does not change the output bytes") {
        const auto one = scratch_dir("w1");
        const auto many = scratch_dir("w4");
        const std::vector<std::string> scan{"scan", "--p2", "3", "--points", "6", "--half-span", "0.5"};
        auto a = std::vector<std::string>{"-o", one.string(), "-j", "1"};
        auto b = std::vector<std::string>{"-o", many.string(), "-j", "4"};
        a.insert(a.end(), scan.begin(), scan.end());
        b.insert(b.end(), scan.begin(), scan.end());
        REQUIRE(invoke(a).code == cli::kExitOk);
        REQUIRE(invoke(b).code == cli::kExitOk);
        CHECK(slurp(one / "s_curve.csv") == slurp(many / "s_curve.csv"));
        CHECK(slurp(one / "s_curve.json") == slurp(many / "s_curve.json"));
        fs::remove_all(one);
        fs::remove_all(many);
    }

    TEST_CASE("harmonic Wigner smoke run") {
        const auto dir = scratch_dir("wigner");
        const auto r = invoke({"-o", dir.string(), "wigner", "--frame", "fixed", "--beta-bar", "0", "--eps-bar", "0",
                               "--times", "6.283185307179586", "--half-width", "10", "--points", "64"});
        REQUIRE(r.code == cli::kExitOk);
        CHECK(fs::exists(dir / "summary.json"));
        CHECK(fs::exists(dir / "series.csv"));
        fs::remove_all(dir);
    }
}
