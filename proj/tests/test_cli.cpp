#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <iterator>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "otasync/cli.hpp"

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "otasync");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = otasync::cli::parse_and_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("otasync_cli_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("version and help exit zero") {
    const auto v = run({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out.find("otasync 1.0.0 (config schema 1)") != std::string::npos);
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"fig7", "--help"}).code == 0);
}

TEST_CASE("usage errors exit two") {
    CHECK(run({}).code == 2);
    CHECK(run({"fig9"}).code == 2);
    CHECK(run({"table1", "--samples", "abc"}).code == 2);
    CHECK(run({"table1", "--samples", "10"}).code == 2);
    CHECK(run({"fig4", "--scs", "45"}).code == 2);
    CHECK(run({"fig4", "--granularity-ns", "10", "--granularity-range", "1:2"}).code == 2);
    CHECK(run({"fig4", "--granularity-range", "12"}).code == 2);
    CHECK(run({"fig4", "--toa-model", "laplace"}).code == 2);
    CHECK(run({"fig4", "--correction", "lots"}).code == 2);
    CHECK(run({"simulate", "--scs", "15,30"}).code == 2);
    CHECK(run({"simulate", "--period-ms", "60", "--period-ms", "120"}).code == 2);
    CHECK(run({"simulate", "--tick-ms", "0.7"}).code == 2);
    CHECK(run({"capacity", "--format", "xml"}).code == 2);
    CHECK(run({"capacity", "--jobs", "0"}).code == 2);
    const auto r = run({"fig7", "--period-ms", "200"});
    CHECK(r.code == 2);
    CHECK(r.err.find("[1, 150]") != std::string::npos);
}

TEST_CASE("io failure exits one") {
    const auto dir = scratch_dir("io");
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "file") << "x";
    CHECK(run({"capacity", "--out", (dir / "file").string()}).code == 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("capacity writes both formats") {
    const auto dir = scratch_dir("cap");
    const auto r = run({"capacity", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("8 domains") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "capacity.csv"));
    CHECK(std::filesystem::exists(dir / "capacity.json"));
    const auto r2 = run({"capacity", "--out", dir.string(), "--sib-bits", "351"});
    CHECK(r2.out.find("0 domains") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("simulate honors flags and is reproducible") {
    const auto dir = scratch_dir("sim");
    const std::vector<std::string> args{"simulate", "--scs", "30", "--period-ms", "10",
                                        "--duration-ms", "50", "--seed", "4",
                                        "--format", "csv", "--out", dir.string()};
    REQUIRE(run(args).code == 0);
    std::ifstream a(dir / "simulate.csv");
    const std::string first((std::istreambuf_iterator<char>(a)), {});
    CHECK_FALSE(std::filesystem::exists(dir / "simulate.json"));
    REQUIRE(run(args).code == 0);
    std::ifstream b(dir / "simulate.csv");
    const std::string second((std::istreambuf_iterator<char>(b)), {});
    CHECK(first == second);
    // 50 ms at the default 1 ms tick: header plus 51 rows.
    CHECK(std::count(first.begin(), first.end(), '\n') == 52);
    std::filesystem::remove_all(dir);
}

TEST_CASE("config file sets options and rejects unknown keys") {
    const auto dir = scratch_dir("cfg");
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "ok.ini") << "seed = 3\nsib-bits = 704\nformat = json\n";
        std::ofstream(dir / "bad.ini") << "seed = 3\nnot-an-option = 1\n";
    }
    const auto ok = run({"--config", (dir / "ok.ini").string(), "capacity", "--out", dir.string()});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("2 domains") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "capacity.json"));
    CHECK_FALSE(std::filesystem::exists(dir / "capacity.csv"));
    CHECK(run({"--config", (dir / "bad.ini").string(), "capacity", "--out", dir.string()}).code == 2);
    std::filesystem::remove_all(dir);
}

TEST_CASE("options after the subcommand reach the experiment") {
    const auto dir = scratch_dir("fig5");
    const auto r = run({"fig5", "--scs", "60", "--samples", "10000", "--granularity-axis", "ns",
                        "--granularity-points", "10,100", "--format", "json", "--out", dir.string()});
    CHECK(r.code == 0);
    std::ifstream in(dir / "fig5.json");
    const std::string text((std::istreambuf_iterator<char>(in)), {});
    CHECK(text.find("\"granularity_axis\"") != std::string::npos);
    std::filesystem::remove_all(dir);
}
