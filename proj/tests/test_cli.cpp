#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wwlab/config.hpp"
#include "wwlab/symbolic.hpp"

using namespace ww;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}
} // namespace

TEST_SUITE("cli") {

TEST_CASE("config parses, validates and round-trips") {
    const char* text = R"({
        "grid": {"nx": 32, "nz": 16, "depth": 1.5},
        "eos": {"kind": "gamma-law", "kappa": 50.0, "gamma": 1.4},
        "initial": {"preset": "swirl", "amplitude": 0.05, "modes": 2},
        "stepper": {"dt": 5e-4, "t_final": 0.01},
        "sweep": {"kappas": [100.0, 1000.0], "t_final": 0.05},
        "probe": {"kinds": ["poincare"], "samples": 10},
        "r": 3, "seed": 99, "output_dir": "x"
    })";
    ExperimentConfig cfg = ExperimentConfig::from_json_text(text);
    CHECK(cfg.nx == 32);
    CHECK(cfg.depth == 1.5);
    CHECK(cfg.eos()->kappa() == 50.0);
    CHECK(cfg.r == 3);
    CHECK(cfg.stepper.dt == 5e-4);
    CHECK(cfg.kappas.size() == 2);
    // resolved form re-parses to the same values
    ExperimentConfig cfg2 = ExperimentConfig::from_json_text(cfg.resolved_json());
    CHECK(cfg2.resolved_json() == cfg.resolved_json());

    CHECK_THROWS(ExperimentConfig::from_json_text("{\"grid\": {\"nx\": 7}}"));
    CHECK_THROWS(ExperimentConfig::from_json_text("{\"unknown_key\": 1}"));
    CHECK_THROWS(ExperimentConfig::from_json_text("{\"r\": 9}"));
}

TEST_CASE("determinism: identical config and seed give identical outputs") {
    const char* cfg_text = R"({
        "grid": {"nx": 32, "nz": 16, "depth": 1.0},
        "eos": {"kind": "linear", "kappa": 100.0},
        "initial": {"preset": "swirl", "amplitude": 0.01, "modes": 1},
        "stepper": {"dt": 1e-3, "t_final": 0.01, "sample_every": 2},
        "r": 2, "seed": 5, "output_dir": "run"
    })";
    fs::path tmp = fs::temp_directory_path() / "wwlab_det_test";
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    std::ofstream(tmp / "cfg.json") << cfg_text;
    std::string exe = fs::path(WWLAB_CLI_PATH).string();
    for (const char* sub : {"a", "b"}) {
        std::string cmd = "WWLAB_OUTPUT_ROOT=" + (tmp / sub).string() + " " + exe +
                          " evolve -c " + (tmp / "cfg.json").string() + " > /dev/null";
        REQUIRE(std::system(cmd.c_str()) == 0);
    }
    CHECK(slurp(tmp / "a" / "run" / "timeseries.csv") ==
          slurp(tmp / "b" / "run" / "timeseries.csv"));
    CHECK(!slurp(tmp / "a" / "run" / "config.resolved.json").empty());

    // report on an empty directory says so explicitly
    fs::create_directories(tmp / "empty");
    std::string cmd = exe + " report " + (tmp / "empty").string() + " > " +
                      (tmp / "report_out.txt").string();
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(slurp(tmp / "report_out.txt").find("no results") != std::string::npos);
}

TEST_CASE("golden commutator term lists") {
    struct C {
        sym::Identity id;
        const char* name;
        int maxo;
    };
    for (C c : {C{sym::Identity::DtPartialR, "dt_partial_r", 4},
                C{sym::Identity::PartialDtK, "partial_dtk", 4},
                C{sym::Identity::LaplacianDt, "laplacian_dt", 3}}) {
        for (int o = 1; o <= c.maxo; ++o) {
            fs::path p = fs::path(WWLAB_GOLDEN_DIR) /
                         (std::string(c.name) + "_" + std::to_string(o) + ".txt");
            CAPTURE(p.string());
            CHECK(sym::print_terms(sym::expand_terms(c.id, o)) == slurp(p));
        }
    }
}

} // TEST_SUITE
