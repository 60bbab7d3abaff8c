#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "app.hpp"

namespace fs = std::filesystem;
using metagrav::app::run;
using nlohmann::json;

namespace {

fs::path config_dir() {
    const char* dir = std::getenv("METAGRAV_CONFIG_DIR");
    return dir ? fs::path(dir) : fs::path("configs");
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("metagrav_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

int invoke(std::vector<std::string> args, std::string* err_text = nullptr) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    if (err_text) *err_text = err.str();
    return code;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    fs::create_directories(dir);
    const auto p = dir / "run.cfg";
    std::ofstream(p) << text;
    return p;
}

} // namespace

TEST_CASE("cli: estimate on the reference scenario", "[cli]") {
    const auto out = scratch("estimate");
    const auto cfg = (config_dir() / "reference_ball.cfg").string();
    REQUIRE(invoke({"estimate", "--config", cfg, "--out", out.string()}) == 0);
    const auto s = load(out / "summary.json");
    CHECK(s["tau_loc_s"].get<double>() > 1.5e-3);
    CHECK(s["tau_loc_s"].get<double>() < 1.7e-3);
    CHECK(s["H_G_expect_erg"].get<double>() < 0.0);
    CHECK(s.contains("gaussian_convention"));
    const auto m = load(out / "manifest.json");
    CHECK(m["failed"] == false);
    CHECK(m["exit_code"] == 0);
    CHECK(m["config_hash"].get<std::string>().size() == 16);
    CHECK(m["summary"] == s);
}

TEST_CASE("cli: identical runs give byte-identical summaries", "[cli]") {
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    const auto cfg = write_config(scratch("det_cfg"),
                                  "mass_g = 1e-9\nradius_cm = 1e-3\nwidth_cm = 5e-3\nmc_samples = 20000\n");
    REQUIRE(invoke({"estimate", "--config", cfg.string(), "--seed", "7", "--out", a.string()}) == 0);
    REQUIRE(invoke({"estimate", "--config", cfg.string(), "--seed", "7", "--out", b.string()}) == 0);
    CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
    CHECK(load(a / "manifest.json")["config_hash"] == load(b / "manifest.json")["config_hash"]);

    const auto c = scratch("det_c");
    REQUIRE(invoke({"estimate", "--config", cfg.string(), "--seed", "8", "--out", c.string()}) == 0);
    CHECK(slurp(a / "summary.json") != slurp(c / "summary.json"));
    CHECK(load(a / "manifest.json")["config_hash"] != load(c / "manifest.json")["config_hash"]);
    // The sampled mean is a consistent cross-check of the quadrature.
    CHECK(std::abs(load(a / "summary.json")["sampled_potential"]["deviation_in_std_errors"].get<double>()) < 4.0);
}

TEST_CASE("cli: configuration errors exit with 2 and still leave a manifest", "[cli]") {
    const auto out = scratch("bad");
    const auto cfg = write_config(scratch("bad_cfg"), "mass_g = -1\nradius_cm = 1e-3\nwidth_cm = 0.1\n");
    std::string err;
    CHECK(invoke({"estimate", "--config", cfg.string(), "--out", out.string()}, &err) == 2);
    CHECK(err.find("mass") != std::string::npos);
    const auto m = load(out / "manifest.json");
    CHECK(m["failed"] == true);
    CHECK(m["exit_code"] == 2);

    CHECK(invoke({"estimate", "--out", scratch("missing").string()}) == 2);
    CHECK(invoke({"spectrum", "--kappa", "abc"}) == 2);
    CHECK(invoke({"frobnicate"}) == 2);
    CHECK(invoke({}) == 2);
    const auto garbled = write_config(scratch("garbled_cfg"), "kappa 25\n");
    CHECK(invoke({"spectrum", "--config", garbled.string(), "--out", scratch("garbled").string()}) == 2);
}

TEST_CASE("cli: numerical failure exits with 3 and flags the manifest", "[cli]") {
    // A time step beyond the kinetic stability limit is a configuration problem.
    const auto cfg = write_config(scratch("numfail_cfg"), "kappa = 25\nlambda0 = 2\ngrid = 64\nextent = 20\ntime = 1\n");
    CHECK(invoke({"evolve", "--config", cfg.string(), "--dt", "5", "--out", scratch("numfail").string()}) == 2);

    // Threshold not bracketed by the requested coupling window: numerical failure.
    const auto out2 = scratch("numfail2");
    const auto cfg2 = write_config(scratch("numfail2_cfg"), "kappa_lo = 100\nkappa_hi = 200\n");
    CHECK(invoke({"threshold", "--config", cfg2.string(), "--out", out2.string()}) == 3);
    const auto m = load(out2 / "manifest.json");
    CHECK(m["failed"] == true);
    CHECK(m["exit_code"] == 3);
    CHECK(m["error"].get<std::string>().find("bracket") != std::string::npos);
}

TEST_CASE("cli: potential and spectrum write CSV series", "[cli]") {
    const auto out = scratch("potential");
    REQUIRE(invoke({"potential", "--out", out.string()}) == 0);
    const auto csv = slurp(out / "potential.csv");
    CHECK(csv.rfind("u,v,dv_du\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 502);
    CHECK(load(out / "summary.json")["v_floor"] == -0.6);

    const auto sp = scratch("spectrum");
    REQUIRE(invoke({"spectrum", "--kappa", "100", "--out", sp.string()}) == 0);
    const auto s = load(sp / "summary.json");
    CHECK(s["level_count"].get<int>() > 10);
    CHECK(s["ground_energy"].get<double>() < -0.4);
    CHECK(s["first_tail_level"]["rel_deviation"].get<double>() < 0.05);
    CHECK(fs::exists(sp / "spectrum.csv"));
}

TEST_CASE("cli: short evolve run", "[cli]") {
    const auto out = scratch("evolve");
    const auto cfg = (config_dir() / "desk_evolve.cfg").string();
    REQUIRE(invoke({"evolve", "--config", cfg, "--grid", "128", "--time", "6", "--dt", "0.02", "--out",
                    out.string()}) == 0);
    const auto s = load(out / "summary.json");
    CHECK(s["entropy_initial"].get<double>() < 1e-6);
    CHECK(s["entropy_final"].get<double>() > s["entropy_initial"].get<double>());
    CHECK(s["density_matrix_valid"] == true);
    CHECK(s["grid"]["points"] == 128);
    CHECK(s["model"].get<std::string>().find("1D analog") != std::string::npos);
    CHECK(fs::exists(out / "entropy_vs_time.csv"));
    CHECK(fs::exists(out / "snapshots" / "marginal_0000.csv"));
    CHECK(fs::exists(out / "snapshots" / "relative_0006.csv"));
    CHECK(fs::exists(out / "coherence_profile.csv"));
}

TEST_CASE("cli: sweep fans out into per-run directories", "[cli]") {
    const auto out = scratch("sweep");
    const auto cfg = write_config(scratch("sweep_cfg"), "sweep_command = spectrum\nsweep_key = kappa\n"
                                                        "sweep_values = 10, 50\ne_top = -0.05\nworkers = 2\n");
    REQUIRE(invoke({"sweep", "--config", cfg.string(), "--out", out.string()}) == 0);
    const auto s = load(out / "summary.json");
    REQUIRE(s["runs"].size() == 2);
    CHECK(s["runs"][0]["dir"] == "run_000");
    CHECK(s["runs"][1]["value"] == "50");
    CHECK(fs::exists(out / "run_000" / "manifest.json"));
    CHECK(fs::exists(out / "run_001" / "spectrum.csv"));
    CHECK(s["runs"][0]["summary"]["level_count"].get<int>() <= s["runs"][1]["summary"]["level_count"].get<int>());

    // A failing member makes the whole sweep fail but keeps the others.
    const auto bad = scratch("sweep_bad");
    const auto cfg2 = write_config(scratch("sweep_bad_cfg"), "sweep_command = spectrum\nsweep_key = kappa\n"
                                                             "sweep_values = 10, -1\n");
    CHECK(invoke({"sweep", "--config", cfg2.string(), "--out", bad.string()}) == 2);
    CHECK(load(bad / "run_000" / "manifest.json")["failed"] == false);
    CHECK(load(bad / "run_001" / "manifest.json")["failed"] == true);
}
