#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "l2tor/data.hpp"

using namespace l2tor;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("l2tor_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

VolumeTable parse(const std::string& text) {
    std::istringstream in(text);
    return parse_volumes(in, "t.csv");
}

std::string error_of(const std::string& text) {
    try {
        (void)parse(text);
    } catch (const DataError& e) {
        return e.what();
    }
    return "";
}

TorsionCurve exact_curve() {
    auto spec = TorsionSpec::from_catalog(catalog_get("trefoil-torus"));
    spec.estimator.method = TorsionMethod::Rules;
    spec.grid = log_grid(0.25, 4.0, 9);
    return torsion_curve(spec);
}

}  // namespace

TEST(Volumes, VendoredTable) {
    const auto t = load_volumes(fs::path(L2TOR_SOURCE_DIR) / "data" / "volumes.csv");
    EXPECT_EQ(t.records.size(), 8u);
    EXPECT_DOUBLE_EQ(t.volume("4_1"), 2.029883212819307);
    // the Borromean exterior is two regular ideal octahedra, the Whitehead exterior one
    EXPECT_NEAR(t.volume("borromean"), 2 * t.volume("whitehead"), 1e-12);
    EXPECT_THROW((void)t.volume("9_42"), std::out_of_range);
}

TEST(Volumes, ParseErrorsNameTheLine) {
    EXPECT_NE(error_of("name,vol\n").find("t.csv:1"), std::string::npos);
    EXPECT_NE(error_of("name,volume\nx,abc\n").find("t.csv:2"), std::string::npos);
    EXPECT_NE(error_of("name,volume\nx,1\nx,2\n").find("duplicate"), std::string::npos);
    EXPECT_NE(error_of("name,volume\nx,-1\n").find("negative"), std::string::npos);
    EXPECT_NE(error_of("name,volume\nx,1,extra\n").find("columns"), std::string::npos);
    EXPECT_NE(error_of("# only a comment\n").find("missing header"), std::string::npos);
    EXPECT_EQ(parse("name,volume\n# c\n a , 1.5 \n").volume("a"), 1.5);
    EXPECT_THROW(load_volumes("/nonexistent/volumes.csv"), DataError);
}

TEST(Curves, CsvRoundTripIsBitExact) {
    const auto c = exact_curve();
    std::istringstream in(curve_csv(c));
    const auto back = parse_curve_csv(in);
    ASSERT_EQ(back.samples.size(), c.points.size());
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        EXPECT_EQ(back.samples[i].t, c.points[i].t);
        EXPECT_EQ(back.samples[i].value, c.points[i].value);
        EXPECT_EQ(back.methods[i], "rules");
    }
    EXPECT_FALSE(back.any_heuristic);
}

TEST(Curves, CsvErrors) {
    std::istringstream empty("");
    EXPECT_THROW(parse_curve_csv(empty), DataError);
    std::istringstream bad("t,value\n1,x\n");
    try {
        (void)parse_curve_csv(bad, "c.csv");
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("c.csv:2"), std::string::npos);
    }
    // zero values come back flagged
    std::istringstream z("t,value\n1,0\n2,3\n");
    const auto c = parse_curve_csv(z);
    EXPECT_TRUE(c.samples[0].flagged);
    EXPECT_FALSE(c.samples[1].flagged);
}

TEST(Json, EstimateAndFitRoundTrip) {
    DeterminantEstimate e;
    e.value = 1.0 / 3.0;
    e.method = DetMethod::Quotient;
    e.params = {{"cyclic_order", 64}};
    e.diagnostics = {0.5, 0.4};
    e.notes = {"x"};
    e.kernel_defect = 0.125;
    e.log_uncertainty = 0.01;
    e.heuristic = true;
    const auto j = to_json(e);
    const auto back = estimate_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(to_json(back), j);

    FitReport f;
    f.k_minus = -1;
    f.k_plus = 0.1;
    f.gauge_k = 0;
    f.leading_coefficient = 1.0000001;
    f.notes = {"n"};
    EXPECT_EQ(to_json(fit_from_json(nlohmann::json::parse(to_json(f).dump()))), to_json(f));

    f.c_low = 0.9;
    f.c_high = 1.1;
    const auto b = bounds_report(1.0, f, 1.0, 2.0);
    EXPECT_EQ(to_json(bounds_from_json(nlohmann::json::parse(to_json(b).dump()))), to_json(b));
}

TEST(Results, StoreAndLoad) {
    const auto root = scratch_dir("store");
    auto spec = TorsionSpec::from_catalog(catalog_get("trefoil-torus"));
    const auto c = exact_curve();
    ResultRecord r;
    r.spec_text = canonical_spec(spec);
    r.created = utc_timestamp();
    const auto dir = store_result(root, r, &c);
    EXPECT_TRUE(fs::exists(dir / "curve.csv"));
    EXPECT_TRUE(fs::exists(dir / "curve.json"));
    const auto digest = dir.filename().string();
    EXPECT_EQ(digest, fnv_digest(r.spec_text));
    auto loaded = load_result(root, digest);
    EXPECT_EQ(loaded.spec_text, r.spec_text);
    EXPECT_EQ(loaded.curve_file, "curve.csv");
    // same spec, same digest
    EXPECT_EQ(fnv_digest(canonical_spec(spec)), digest);
    spec.grid.back() = 9.0;
    EXPECT_NE(fnv_digest(canonical_spec(spec)), digest);
    fs::remove_all(root);
}

TEST(Results, CorruptedRecordReportsByteOffset) {
    const auto root = scratch_dir("corrupt");
    ResultRecord r;
    r.spec_text = "x";
    const auto dir = store_result(root, r);
    {
        std::ofstream out(dir / "report.json", std::ios::trunc);
        out << "{\"spec_digest\": \"abc\", oops}";
    }
    try {
        (void)load_result(root, dir.filename().string());
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("at byte 24"), std::string::npos) << e.what();
    }
    {
        std::ofstream out(dir / "report.json", std::ios::trunc);
        out << "{\"spec_digest\": \"abc\"}";
    }
    EXPECT_THROW(load_result(root, dir.filename().string()), DataError);
    EXPECT_THROW(load_result(root, "missing"), DataError);
    fs::remove_all(root);
}

TEST(Results, RootFromEnvironment) {
    ::unsetenv("L2T_RESULTS_DIR");
    EXPECT_EQ(results_root("fallback"), fs::path("fallback"));
    ::setenv("L2T_RESULTS_DIR", "/tmp/elsewhere", 1);
    EXPECT_EQ(results_root("fallback"), fs::path("/tmp/elsewhere"));
    ::unsetenv("L2T_RESULTS_DIR");
}

TEST(Results, AtomicWriteLeavesNoTemporary) {
    const auto d = scratch_dir("atomic");
    write_atomic(d / "f.txt", "hello");
    EXPECT_TRUE(fs::exists(d / "f.txt"));
    EXPECT_FALSE(fs::exists(d / "f.txt.tmp"));
    EXPECT_THROW(write_atomic(d / "no" / "such" / "f.txt", "x"), DataError);
    fs::remove_all(d);
}
