#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "fermat/medium.hpp"
#include "manifest.hpp"
#include "scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fermat::cli;

namespace {

struct CliRun {
    int code;
    std::string out, err;
    fs::path dir;
};

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        root_ = fs::temp_directory_path() / ("fermat_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(root_);
        fs::create_directories(root_);
    }
    void TearDown() override { fs::remove_all(root_); }

    fs::path write(const std::string& name, const std::string& text) {
        const fs::path p = root_ / name;
        std::ofstream(p) << text;
        return p;
    }

    CliRun run(std::vector<std::string> args) {
        args.push_back("--out");
        args.push_back((root_ / "runs").string());
        std::ostringstream out, err;
        CliRun r{run_cli(args, out, err), out.str(), err.str(), {}};
        const auto at = r.out.rfind("run directory: ");
        if (at != std::string::npos) {
            std::string d = r.out.substr(at + 15);
            d.erase(d.find_last_not_of("\r\n") + 1);
            r.dir = d;
        }
        return r;
    }

    static json manifest(const CliRun& r) {
        std::ifstream in(r.dir / "manifest.json");
        return json::parse(in);
    }

    fs::path root_;
};

const char* trace_toml = R"(kind = "trace"
[medium]
kind = "homogeneous"
dim = 2
n0 = 1.5

[trace]
x0 = [0.0, 0.0]
direction = [1.0, 1.0]
s_max = 1.0
ds = 0.01
)";

std::string scenario_dir() { return FERMAT_SCENARIO_DIR; }

}  // namespace

TEST_F(CliTest, TraceHappyPath) {
    const CliRun r = run({"trace", "--scenario", write("trace.toml", trace_toml).string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(r.dir / "ray.csv"));
    const json m = manifest(r);
    EXPECT_EQ(m["kind"], "trace");
    std::set<std::string> names;
    for (const auto& f : m["files"]) {
        names.insert(f["name"].get<std::string>());
        EXPECT_EQ(f["sha256"].get<std::string>(), sha256_file(r.dir / f["name"].get<std::string>()));
    }
    EXPECT_TRUE(names.count("ray.csv"));
    EXPECT_TRUE(names.count("summary.json"));
    EXPECT_TRUE(m.contains("wall_time_s"));
    EXPECT_EQ(m["params"]["scenario"]["medium"]["n0"], 1.5);
}

TEST_F(CliTest, RerunGivesIdenticalOutputs) {
    const fs::path sc = write("trace.toml", trace_toml);
    const CliRun a = run({"trace", "--scenario", sc.string(), "--seed", "7"});
    const CliRun b = run({"trace", "--scenario", sc.string(), "--seed", "7"});
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    EXPECT_NE(a.dir, b.dir);  // append-only: every run gets its own directory
    EXPECT_EQ(manifest_signature(manifest(a)), manifest_signature(manifest(b)));
    std::ifstream fa(a.dir / "ray.csv"), fb(b.dir / "ray.csv");
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    EXPECT_EQ(sa.str(), sb.str());
}

TEST_F(CliTest, UnknownKeyNamesNearestValidKey) {
    const fs::path sc = write("bad.toml", "kind = \"trace\"\n[medium]\nkind = \"homogeneous\"\nrefraction_index = 1.5\n");
    const CliRun r = run({"trace", "--scenario", sc.string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("bad.toml:4:"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("'refraction_index'"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("nearest valid key"), std::string::npos) << r.err;
}

TEST_F(CliTest, UnknownKeyInJsonIsLineAnchored) {
    const fs::path sc = write("bad.json", "{\n  \"medium\": {\n    \"kind\": \"homogeneous\",\n    \"dimm\": 2\n  }\n}\n");
    const CliRun r = run({"trace", "--scenario", sc.string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("bad.json:4:"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("nearest valid key is 'dim'"), std::string::npos) << r.err;
}

TEST_F(CliTest, MalformedTomlReportsLine) {
    const fs::path sc = write("broken.toml", "kind = \"trace\"\n[medium\n");
    const CliRun r = run({"trace", "--scenario", sc.string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("broken.toml:2"), std::string::npos) << r.err;
}

TEST_F(CliTest, NumericalErrorsCarryModuleContext) {
    const fs::path sc = write("far.toml", R"(kind = "connect"
[medium]
kind = "homogeneous"
dim = 2
n0 = 1.0
box_lo = [-1.0, -1.0]
box_hi = [1.0, 1.0]
[connect]
x_i = [0.0, 0.0]
x_f = [5.0, 0.0]
ds = 0.01
)");
    const CliRun r = run({"connect", "--scenario", sc.string()});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("fermat connect:"), std::string::npos) << r.err;
}

TEST_F(CliTest, MissingScenarioIsUsageError) {
    EXPECT_EQ(run({"trace"}).code, 2);
    EXPECT_EQ(run({"nonsense"}).code, 2);
}

TEST_F(CliTest, UserGridMediumFromFile) {
    fermat::GridData g;
    g.dim = 2;
    g.dims = {21, 21};
    g.spacing = 0.1;
    g.origin = fermat::Vec3(-1.0, -1.0, 0.0);
    for (int i = 0; i < 21; ++i)
        for (int j = 0; j < 21; ++j) {
            const double y = -1.0 + 0.1 * j;
            g.values.push_back(1.5 - 0.2 * y * y);
        }
    fermat::write_grid_file((root_ / "lens.grid").string(), g);
    const fs::path sc = write("grid.toml", R"(kind = "trace"
[medium]
kind = "user-grid"
dim = 2
file = "lens.grid"
cubic = true
[trace]
x0 = [-0.8, 0.1]
direction = [1.0, 0.0]
s_max = 1.5
ds = 0.01
)");
    const CliRun r = run({"trace", "--scenario", sc.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(r.dir / "summary.json");
    const json s = json::parse(in);
    // focusing medium: the ray bends back towards the axis
    EXPECT_LT(s["final_position"][1].get<double>(), 0.1);
}

// every run kind is reachable with the bundled example scenario
TEST_F(CliTest, EveryRunKindRuns) {
    for (const std::string& kind : run_kinds()) {
        const fs::path sc = fs::path(scenario_dir()) / (kind + ".toml");
        ASSERT_TRUE(fs::exists(sc)) << sc;
        std::vector<std::string> args = {kind, "--scenario", sc.string()};
        if (kind == "verify") args.insert(args.end(), {"--criteria", "1"});
        const CliRun r = run(args);
        EXPECT_EQ(r.code, 0) << kind << ": " << r.err;
        EXPECT_TRUE(fs::exists(r.dir / "manifest.json")) << kind;
    }
}

TEST_F(CliTest, ZetaIsSeededAndDeterministic) {
    const fs::path sc = fs::path(scenario_dir()) / "zeta.toml";
    const CliRun a = run({"zeta", "--scenario", sc.string(), "--seed", "11"});
    const CliRun b = run({"zeta", "--scenario", sc.string(), "--seed", "11"});
    const CliRun c = run({"zeta", "--scenario", sc.string(), "--seed", "12"});
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(manifest_signature(manifest(a)), manifest_signature(manifest(b)));
    EXPECT_NE(manifest_signature(manifest(a)), manifest_signature(manifest(c)));
}

TEST(Scenario, TomlSubset) {
    std::map<std::string, int> lines;
    const json j = parse_toml(R"(# comment
title = 'literal'
a.b = 0x10
[t]
x = [1, 2.5,
     -3e2]   # trailing
flag = true
inf_val = -inf
inline = { p = 1, q = "s" }
)",
                              "t.toml", &lines);
    EXPECT_EQ(j["title"], "literal");
    EXPECT_EQ(j["a"]["b"], 16);
    EXPECT_EQ(j["t"]["x"][2], -300.0);
    EXPECT_EQ(j["t"]["flag"], true);
    EXPECT_TRUE(std::isinf(j["t"]["inf_val"].get<double>()));
    EXPECT_EQ(j["t"]["inline"]["q"], "s");
    EXPECT_EQ(lines.at("t.flag"), 7);
    EXPECT_THROW(parse_toml("[[arr]]\n", "t.toml", nullptr), ScenarioError);
    EXPECT_THROW(parse_toml("a = 1\na = 2\n", "t.toml", nullptr), ScenarioError);
}

TEST(Scenario, EditDistance) {
    EXPECT_EQ(edit_distance("kitten", "sitting"), 3u);
    EXPECT_EQ(edit_distance("", "abc"), 3u);
}
