#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "icp_cli_test";

int icp(const std::string& args)
{
    std::string cmd = std::string(ICP_BINARY) + " " + args + " >/dev/null 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string dir(const std::string& name) { return (kWork / name).string(); }

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

struct Workspace {
    Workspace()
    {
        fs::remove_all(kWork);
        fs::create_directories(kWork);
    }
};

}  // namespace

TEST_CASE("pipeline exit codes")
{
    Workspace ws;
    const std::string g = dir("gen");
    REQUIRE(icp("generate --kind patch --p 3 --q 7 --generations 3 --out-dir " + g) == 0);
    const std::string map = g + "/map.json";
    REQUIRE(fs::exists(map));
    REQUIRE(fs::exists(g + "/manifest.json"));

    CHECK(icp("validate --map " + map + " --out-dir " + dir("val")) == 0);
    CHECK(fs::exists(dir("val") + "/rivin.json"));

    const std::string s = dir("solve");
    CHECK(icp("solve --map " + map + " --method fixed-point --tol 1e-12 --out-dir " + s) == 0);
    CHECK(icp("solve --map " + map + " --method fixed-point --tol 1e-300 --max-iters 1 --out-dir " + dir("nc")) == 3);

    const std::string l = dir("layout");
    CHECK(icp("layout --map " + map + " --metric " + s + "/metric.json --disk --svg p.svg --out-dir " + l) == 0);
    CHECK(fs::exists(l + "/p.svg"));
    CHECK(fs::exists(l + "/consistency.json"));

    CHECK(icp("walk --map " + map + " --layout " + l + "/layout.csv --samples 50 --steps 1000 --out-dir " +
              dir("walk")) == 0);
    CHECK(fs::exists(dir("walk") + "/histogram.csv"));

    CHECK(icp("analyze ring --map " + map + " --metric " + s + "/metric.json --min-depth 1 --out-dir " + dir("ring")) ==
          0);
    CHECK(icp("analyze count --map " + map + " --layout " + l + "/layout.csv --out-dir " + dir("count")) == 0);
    CHECK(icp("analyze count --map " + map + " --layout " + l + "/layout.csv --bound 0.01 --out-dir " +
              dir("count2")) == 1);
    CHECK(icp("analyze dichotomy --p 3 --q 7 --generations 2,3 --out-dir " + dir("dich")) == 0);
    CHECK(icp("analyze dichotomy --p 3 --q 7 --generations 2,3 --max-iters 1 --tol 1e-300 --out-dir " +
              dir("dich2")) == 3);

    const std::string t = dir("torus");
    CHECK(icp("generate --kind torus --p 3 --q 6 --n 4 --flips 3 --perturb 0.1 --seed 2 --out-dir " + t) == 0);
    CHECK(icp("analyze mtp --map " + t + "/map.json --out-dir " + dir("mtp")) == 0);
}

TEST_CASE("assertion and input failures")
{
    Workspace ws;
    const std::string g = dir("bad");
    REQUIRE(icp("generate --kind patch --p 3 --q 7 --generations 3 --theta 1.0 --out-dir " + g) == 0);
    CHECK(icp("validate --map " + g + "/map.json --out-dir " + dir("v")) == 1);

    const std::string ok = dir("ok");
    REQUIRE(icp("generate --kind patch --p 3 --q 7 --generations 3 --out-dir " + ok) == 0);
    std::ofstream(dir("metric.json")) << "{\"root\": 0, \"radius\": []}";
    CHECK(icp("layout --map " + ok + "/map.json --metric " + dir("metric.json") + " --out-dir " + dir("l")) == 2);
    // unsolved radii on a curved patch do not close up
    REQUIRE(icp("solve --map " + ok + "/map.json --method fixed-point --max-iters 0 --out-dir " + dir("s0")) == 3);
    CHECK(icp("layout --map " + ok + "/map.json --metric " + dir("s0") + "/metric.json --out-dir " + dir("l0")) == 1);

    CHECK(icp("validate --map " + dir("missing.json")) == 2);
    std::ofstream(dir("junk.json")) << "{ not json";
    CHECK(icp("validate --map " + dir("junk.json") + " --out-dir " + dir("j")) == 2);
    CHECK(icp("frobnicate") == 2);
    CHECK(icp("--help") == 0);
    CHECK(icp("analyze mtp --map " + ok + "/map.json --out-dir " + dir("m")) == 2);
}

TEST_CASE("replay reproduces deterministic outputs")
{
    Workspace ws;
    const std::string g = dir("g");
    REQUIRE(icp("generate --kind patch --p 4 --q 5 --generations 3 --out-dir " + g) == 0);
    const std::string s = dir("s");
    REQUIRE(icp("solve --map " + g + "/map.json --method ricci-flow --r0 random --seed 5 --out-dir " + s) == 0);
    CHECK(icp("replay --manifest " + s + "/manifest.json --out-dir " + dir("again")) == 0);
    CHECK(slurp(s + "/metric.json") == slurp(dir("again") + "/metric.json"));

    auto m = nlohmann::json::parse(slurp(s + "/manifest.json"));
    CHECK(m["command"] == "solve");
    CHECK(m["seed"] == 5);
    CHECK(m["exit_code"] == 0);
    bool log_nondet = false;
    for (const auto& o : m["outputs"])
        if (o["path"] == "solver_log.csv") log_nondet = !o["deterministic"].get<bool>();
    CHECK(log_nondet);

    // tampering with an output makes the replay fail
    std::ofstream(s + "/metric.json", std::ios::app) << " ";
    CHECK(icp("replay --manifest " + s + "/manifest.json --out-dir " + dir("again2")) == 1);

    const std::string w = dir("w");
    REQUIRE(icp("layout --map " + g + "/map.json --metric " + s + "/metric.json --disk --out-dir " + dir("l")) == 0);
    REQUIRE(icp("walk --map " + g + "/map.json --layout " + dir("l") + "/layout.csv --samples 20 --steps 500 --seed 3 "
                "--out-dir " + w) == 0);
    CHECK(icp("replay --manifest " + w + "/manifest.json --out-dir " + dir("w2")) == 0);
    fs::remove_all(kWork);
}
