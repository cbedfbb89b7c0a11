#include "svput/artifacts.hpp"
#include "svput/runner.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace svput;
using nlohmann::json;

namespace {

json small_doc(const std::string& outdir) {
    return json{
        {"model",
         {{"model", "heston"}, {"kappa", 2.0}, {"m", 0.04}, {"xi", 0.5}, {"rho", -0.7},
          {"r", 0.05}, {"K", 1.0}, {"T", 0.5}}},
        {"grid", {{"s_half_width", 4.0}, {"n_s", 21}, {"n_y", 11}, {"n_theta", 10}}},
        {"mc", {{"n_paths", 2000}, {"n_steps", 20}, {"seed", 3}}},
        {"spot", {{"x0", 1.0}, {"y0", 0.04}}},
        {"output", {{"directory", outdir}}},
    };
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("format_double survives round trips and encodes infinities") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("content hash is stable and sensitive") {
    const std::string a = "s,y,theta\n0,0,0\n";
    CHECK(content_hash_hex(a) == content_hash_hex(a));
    CHECK(content_hash_hex(a) != content_hash_hex(a + " "));
    CHECK(content_hash_hex(a).size() == 16);
}

TEST_CASE("finalized artifacts hash body+config and exclude timing") {
    const json cfg = {{"k", 1}};
    json a = finalize_artifact({{"price", 0.25}}, cfg, 1.5);
    json b = finalize_artifact({{"price", 0.25}}, cfg, 99.0);
    CHECK(a["content_hash"] == b["content_hash"]);
    CHECK(a["timing"]["wallclock_seconds"] != b["timing"]["wallclock_seconds"]);
    CHECK(without_timing(a) == without_timing(b));
    json c = finalize_artifact({{"price", 0.26}}, cfg, 1.5);
    CHECK(a["content_hash"] != c["content_hash"]);
}

TEST_CASE("surface csv carries the documented header and row count") {
    const SVModel m = heston_model(2.0, 0.04, 0.5, -0.7, 0.05, 1.0, 0.5);
    const Grid g = build_grid(m, 4.0, 1.0, 11, 5, 3);
    SolveConfig sc;
    const SolveResult res = solve(m, g, sc);
    const std::string csv = surface_csv(res);
    CHECK(csv.rfind("s,y,theta,u,payoff,residual\n", 0) == 0);
    const std::size_t rows = static_cast<std::size_t>(
        std::count(csv.begin(), csv.end(), '\n'));
    CHECK(rows == 1 + g.n_nodes() * (g.n_theta + 1));
}

TEST_CASE("boundary csv is plot-ready long format") {
    FreeBoundary fb;
    fb.y = {0.1, 0.2};
    fb.theta = {0.25, 0.5};
    fb.h = {-0.1, -0.2, -0.15, -0.25};
    fb.g = {0.9, 0.8, 0.85, 0.75};
    fb.T = 0.5;
    const std::string csv = boundary_csv(fb);
    CHECK(csv.rfind("y,theta,h,g\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}

TEST_CASE("cmd_price writes deterministic artifacts") {
    const std::string dir1 = "build_test_out/price_a";
    const std::string dir2 = "build_test_out/price_b";
    std::filesystem::remove_all("build_test_out");

    const CommandResult r1 = cmd_price(parse_run_config(small_doc(dir1)));
    const CommandResult r2 = cmd_price(parse_run_config(small_doc(dir2)));
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    CHECK(r1.summary["price"].get<double>() > 0.0);
    CHECK(r1.summary["price"] == r2.summary["price"]);

    // CSV artifacts byte-identical across reruns of the same config
    const std::string csv1 = slurp(dir1 + "/surface.csv");
    const std::string csv2 = slurp(dir2 + "/surface.csv");
    CHECK(csv1 == csv2);

    // JSON summaries identical once the timing block is stripped; the config
    // echo differs only in the output directory, so compare hashes of the body
    json s1 = json::parse(slurp(dir1 + "/price_summary.json"));
    json s2 = json::parse(slurp(dir2 + "/price_summary.json"));
    s1.erase("timing");
    s2.erase("timing");
    s1.erase("config");
    s2.erase("config");
    s1.erase("content_hash");
    s2.erase("content_hash");
    CHECK(s1 == s2);

    // sidecar hash matches the CSV bytes
    const json meta = json::parse(slurp(dir1 + "/surface.csv.meta.json"));
    CHECK(meta["content_hash"].get<std::string>() == content_hash_hex(csv1));
}

TEST_CASE("cmd_price rejects an F2 model with exit code 2 and names the case") {
    json doc = small_doc("build_test_out/f2");
    doc["model"]["xi"] = 0.3; // kappa m = 0.08 >= xi^2/2 = 0.045
    const CommandResult r = cmd_price(parse_run_config(doc));
    CHECK(r.exit_code == 2);
    CHECK(r.summary["error"].get<std::string>().find("F2") != std::string::npos);
}

TEST_CASE("cmd_price with n_theta=0 prices the payoff slice") {
    json doc = small_doc("build_test_out/ntheta0");
    doc["grid"] = {{"s_half_width", 4.0}, {"n_s", 81}, {"n_y", 11}, {"n_theta", 0}};
    doc["spot"]["x0"] = 0.8;
    const CommandResult r = cmd_price(parse_run_config(doc));
    REQUIRE(r.exit_code == 0);
    // bilinear payoff interpolation carries O(ds^2 e^s) curvature error
    CHECK(r.summary["price"].get<double>() == doctest::Approx(0.2).epsilon(0.01));
}

TEST_CASE("cmd_boundary reports the structure checks") {
    json doc = small_doc("build_test_out/boundary");
    doc["solver"] = {{"method", "psor"}, {"contact_tol", 2e-3}};
    doc["grid"] = {{"s_half_width", 4.0}, {"n_s", 41}, {"n_y", 15}, {"n_theta", 20}};
    const CommandResult r = cmd_boundary(parse_run_config(doc));
    CHECK(r.exit_code == 0);
    CHECK(r.summary["structure"]["all_passed"].get<bool>());
    CHECK(std::filesystem::exists("build_test_out/boundary/boundary.csv"));
}

TEST_CASE("cmd_verify runs the cross-check pipeline on a small budget") {
    json doc = small_doc("build_test_out/verify");
    doc["grid"] = {{"s_half_width", 4.0}, {"n_s", 81}, {"n_y", 35}, {"n_theta", 60}};
    doc["mc"] = {{"n_paths", 20000}, {"n_steps", 50}, {"seed", 9}};
    const CommandResult r = cmd_verify(parse_run_config(doc));
    CHECK(r.exit_code == 0);
    CHECK(r.summary["all_passed"].get<bool>());
    CHECK(std::filesystem::exists("build_test_out/verify/mc_lsmc.json"));
    CHECK(std::filesystem::exists("build_test_out/verify/exercise_histogram.csv"));
}

TEST_CASE("cmd_converge epsilon axis emits a shrinking difference column") {
    json doc = small_doc("build_test_out/converge");
    doc["grid"] = {{"s_half_width", 4.0}, {"n_s", 31}, {"n_y", 11}, {"n_theta", 10}};
    const CommandResult r = cmd_converge(parse_run_config(doc), ConvergeAxis::Epsilon, 3);
    REQUIRE(r.exit_code == 0);
    const auto& table = r.summary["table"];
    REQUIRE(table.size() == 3);
    CHECK(table[2]["abs_diff_prev"].get<double>() < table[1]["abs_diff_prev"].get<double>());
    CHECK(std::filesystem::exists("build_test_out/converge/converge_epsilon.csv"));
}

TEST_CASE("cmd_converge domain axis leaves the spot price unmoved") {
    json doc = small_doc("build_test_out/converge_domain");
    doc["grid"] = {{"s_half_width", 4.0}, {"n_s", 31}, {"n_y", 11}, {"n_theta", 10}};
    const CommandResult r = cmd_converge(parse_run_config(doc), ConvergeAxis::Domain, 2);
    REQUIRE(r.exit_code == 0);
    CHECK(r.summary["table"][1]["abs_diff_prev"].get<double>() <= 1e-3);
}

TEST_CASE("cmd_converge paths axis shrinks the standard error") {
    json doc = small_doc("build_test_out/converge_paths");
    doc["mc"] = {{"n_paths", 2000}, {"n_steps", 20}, {"seed", 3}};
    const CommandResult r = cmd_converge(parse_run_config(doc), ConvergeAxis::Paths, 3);
    REQUIRE(r.exit_code == 0);
    const auto& table = r.summary["table"];
    const double se0 = table[0]["std_error"].get<double>();
    const double se2 = table[2]["std_error"].get<double>();
    CHECK(se2 < se0 / 2.0); // quadrupled paths per level halve the SE, noise aside
}
