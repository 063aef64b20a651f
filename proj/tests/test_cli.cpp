#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;  // stdout and stderr interleaved
};

Run run(const std::string& args) {
    const std::string cmd = std::string(L2TOR_CLI) + " " + args + " 2>&1";
    Run r;
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf{};
    while (const auto n = std::fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
    const int st = ::pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

bool contains(const std::string& s, const std::string& x) { return s.find(x) != std::string::npos; }

fs::path scratch(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("l2tor_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

const std::string samples_dir = std::string(L2TOR_SOURCE_DIR) + "/samples/";

}  // namespace

TEST(Cli, VerifyPasses) {
    const auto d = scratch("verify");
    const auto r = run("verify --json " + (d / "v.json").string());
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_FALSE(contains(r.out, "FAIL"));
    std::ifstream in(d / "v.json");
    const auto j = nlohmann::json::parse(in);
    EXPECT_TRUE(j.at("ok").get<bool>());
    fs::remove_all(d);
}

TEST(Cli, VerifySingleSuite) {
    const auto r = run("verify --suite u0v0");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_TRUE(contains(r.out, "u0v0: "));
    EXPECT_FALSE(contains(r.out, "rules: "));
    EXPECT_FALSE(contains(r.out, "fox: "));
    EXPECT_EQ(run("verify --suite nosuch").code, 2);
}

TEST(Cli, InjectedFaultIsCaught) {
    const auto r = run("verify --suite fox --inject-fault fox");
    EXPECT_EQ(r.code, 1) << r.out;
    EXPECT_TRUE(contains(r.out, "FAIL fox: "));
}

TEST(Cli, InputErrors) {
    const auto broken = run("torsion --file " + samples_dir + "broken.pres");
    EXPECT_EQ(broken.code, 2);
    EXPECT_TRUE(contains(broken.out, "line 4")) << broken.out;
    EXPECT_EQ(run("torsion --catalog nosuch").code, 2);
    EXPECT_EQ(run("torsion --catalog trefoil --phi 1,0").code, 2);
    EXPECT_EQ(run("torsion --catalog trefoil --grid 2:1:5").code, 2);
    EXPECT_EQ(run("torsion --catalog trefoil --method magic").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
}

TEST(Cli, QuotientListing) {
    const auto r3 = run("quotients --catalog trefoil --quotient-degree 3");
    EXPECT_EQ(r3.code, 0);
    EXPECT_TRUE(contains(r3.out, "order=6 degree=3")) << r3.out;
    const auto r1 = run("quotients --catalog trefoil --quotient-degree 1");
    EXPECT_EQ(r1.code, 0);
    EXPECT_TRUE(contains(r1.out, "order=1 degree=1"));
    EXPECT_FALSE(contains(r1.out, "order=2"));
    EXPECT_TRUE(contains(r1.out, "1 quotient(s)"));
}

TEST(Cli, TorsionWritesArtifactsAndFitReadsThem) {
    const auto d = scratch("torsion");
    const auto r = run("torsion --catalog trefoil-torus --method rules --out " + d.string());
    EXPECT_EQ(r.code, 0) << r.out;
    for (const char* f : {"curve.csv", "curve.json", "report.json", "plot.svg"}) EXPECT_TRUE(fs::exists(d / f)) << f;
    std::ifstream in(d / "report.json");
    const auto rep = nlohmann::json::parse(in);
    EXPECT_NEAR(rep.at("fit").at("leading_coefficient").get<double>(), 1.0, 1e-12);
    EXPECT_TRUE(rep.at("bounds").at("satisfied").get<bool>());

    const auto f = run("fit " + (d / "curve.csv").string() + " --catalog trefoil-torus --out " + (d / "fit").string());
    EXPECT_EQ(f.code, 0) << f.out;
    EXPECT_TRUE(fs::exists(d / "fit" / "fit.json"));
    EXPECT_TRUE(fs::exists(d / "fit" / "bounds.json"));
    // an impossible lower bound is a property failure
    EXPECT_EQ(run("fit " + (d / "curve.csv").string() + " --A 2 --out " + d.string()).code, 1);
    fs::remove_all(d);
}

TEST(Cli, FitOnSyntheticCurve) {
    const auto d = scratch("fit");
    {
        std::ofstream out(d / "c.csv");
        out << "t,value\n";
        for (int i = -8; i <= 8; ++i) {
            const double t = std::pow(2.0, i / 2.0);
            out << t << "," << 1.3 * std::pow(std::max(1.0, t), 2) << "\n";
        }
    }
    const auto r = run("fit " + (d / "c.csv").string() + " --A 1.2");
    EXPECT_EQ(r.code, 0) << r.out;
    std::ifstream in(d / "fit.json");
    const auto j = nlohmann::json::parse(in);
    EXPECT_NEAR(j.at("thurston_estimate").get<double>(), 2.0, 1e-9);
    EXPECT_NEAR(j.at("leading_coefficient").get<double>(), 1.3, 1e-9);
    // too few points: non-convergence
    {
        std::ofstream out(d / "short.csv");
        out << "t,value\n1,1\n2,2\n";
    }
    EXPECT_EQ(run("fit " + (d / "short.csv").string()).code, 3);
    EXPECT_EQ(run("fit " + (d / "missing.csv").string()).code, 2);
    fs::remove_all(d);
}

TEST(Cli, FileInputMatchesCatalog) {
    const auto d = scratch("file");
    const auto r = run("torsion --file " + samples_dir + "trefoil.pres --method quotient --grid 1/4:4:3 --out " +
                       d.string());
    // three points cannot support the end-window fit, so the status is non-convergence,
    // but the curve itself is written
    EXPECT_EQ(r.code, 3) << r.out;
    std::ifstream in(d / "curve.json");
    const auto c = nlohmann::json::parse(in);
    const auto& pts = c.at("points");
    ASSERT_EQ(pts.size(), 3u);
    for (const auto& p : pts) {
        const double t = p.at("t").get<double>();
        EXPECT_NEAR(p.at("value").get<double>(), std::max(1.0, t), 1e-6) << t;
    }
    fs::remove_all(d);
}
