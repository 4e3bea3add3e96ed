#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "squeeze/config.hpp"
#include "squeeze/error.hpp"
#include "squeeze/runner.hpp"

using namespace squeeze;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("squeeze_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Runs the CLI with stderr captured; returns the exit status.
int cli(const std::string& args, const fs::path& err_file)
{
    const std::string cmd = std::string(SQUEEZE_CLI) + " " + args + " > /dev/null 2> " + err_file.string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("axes")
{
    CHECK(Axis{0.0, 1.0, 5, true}.values() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(Axis{0.0, 1.0, 4, false}.values() == std::vector<double>{0.0, 0.25, 0.5, 0.75});
    CHECK(Axis{0.3, 0.3, 1, true}.values() == std::vector<double>{0.3});
}

TEST_CASE("engine names round-trip")
{
    for (auto e : {Engine::TwoMode, Engine::Mixture, Engine::FockVerify, Engine::Tw})
        CHECK(engine_from_name(engine_name(e)) == e);
    CHECK_THROWS_AS(engine_from_name("gpu"), ConfigError);
}

TEST_CASE("unknown keys are rejected at every level")
{
    CHECK_THROWS_AS(parse_config_text(R"({"preset":"fig2","bogus":1})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"preset":"fig2","kerr":{"chi11":1,"chi33":2}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"preset":"fig3a","tw":{"dx":1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"preset":"fig2","sweep":{"phi":{"num":3}}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"preset":"nope"})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"preset":"fig2","sequence":{"theta1":"big"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"trap":{"omega":1,"axial_hz":2}})"), ConfigError);
}

TEST_CASE("semantic validation")
{
    CHECK_THROWS_AS(parse_config_text(R"({"preset":"fig2","initial":{"fano":2}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"preset":"fig2","sweep":{"t_hold":{"count":0}}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"preset":"fig2","engine":"fock-verify"})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"preset":"fig3a","tw":{"points":100}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"preset":"fig3a","tw":{"dt":1e-3}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"preset":"fig3a","tw":{"n_traj":1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"preset":"fig2","threads":0})"), ConfigError);
    CHECK_NOTHROW(parse_config_text(R"({"preset":"fig2-noise150"})"));
}

TEST_CASE("presets are valid and echo round-trips")
{
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        const auto c = preset(name);
        CHECK_NOTHROW(c.validate());
        const auto echo = config_to_json(c);
        const auto again = parse_config(echo);
        CHECK(config_to_json(again) == echo);
    }
    const auto f2 = preset("fig2");
    CHECK(f2.engine == Engine::TwoMode);
    CHECK(f2.initial.n0_mean == 1e7);
    CHECK(f2.theta1 == 0.3);
    CHECK(f2.theta2 == 0.025);
    CHECK(f2.kerr.chi11 == 0.018);
    CHECK(f2.kerr.chi22 == 0.019);
    CHECK(f2.kerr.chi12 == 0.018);
    CHECK(preset("fig2-noise150").initial.fano == 150.0);
    CHECK(preset("degenerate").kerr.degenerate());
    CHECK(preset("fig3a").engine == Engine::Tw);
}

TEST_CASE("overrides apply on top of a preset; auto dt resolves")
{
    const auto c = parse_config_text(R"({"preset":"fig3a","tw":{"dt":null,"n_traj":50},
                                          "trap":{"axial_hz":4000},"master_seed":9})");
    CHECK(c.tw.n_traj == 50);
    CHECK(c.master_seed == 9);
    CHECK(c.trap.omega == doctest::Approx(2 * kPi * 4000));
    CHECK(c.trap.omega_perp == doctest::Approx(2 * kPi * 200));
    CHECK_FALSE(c.tw.dt.has_value());
    CHECK(c.effective_dt() == doctest::Approx(std::min(1e-6, max_stable_dt(c.tw_params()))));
    CHECK(config_to_json(c)["tw"]["dt"].get<double>() == c.effective_dt());
}

TEST_CASE("CSV formatting")
{
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_double(kPi)) == kPi);
    CHECK(format_double(1e-300) == "1e-300");
    CHECK(format_double(-2.5e-7) == "-2.4999999999999999e-07");

    std::vector<ResultRow> rows{{0.5, 1.25, 10.0, 101.0, 0.1, 0.0, Engine::Mixture, 0, 0},
                                {0.5, 1.5, 3.0, 9.5, 0.25, 0.01, Engine::Tw, 100, 4}};
    CHECK(results_csv(rows) ==
          "t_hold,phi,mean_n2,mean_n2_sq,v,stderr_v,engine,n_traj,seed\n"
          "0.5,1.25,10,101,0.10000000000000001,0,mixture,0,0\n"
          "0.5,1.5,3,9.5,0.25,0.01,tw,100,4\n");
}

TEST_CASE("run writes artifacts; output is independent of thread count")
{
    auto c = preset("fig2");
    c.t_hold = {0.0, 0.01, 11, true};
    c.phi = {0.0, 2 * kPi, 16, false};
    const auto a = run(c);
    c.threads = 3;
    const auto b = run(c);
    CHECK(results_csv(a.rows) == results_csv(b.rows));
    REQUIRE(a.rows.size() == 176);
    CHECK(a.rows[0].v == doctest::Approx(1.0).epsilon(1e-12));

    const auto dir = scratch_dir("artifacts");
    write_artifacts(dir, a);
    CHECK(slurp(dir / "results.csv") == results_csv(a.rows));
    const auto meta = json::parse(slurp(dir / "meta.json"));
    CHECK(meta["rows"] == 176);
    CHECK(meta["config"]["engine"] == "two-mode");
    CHECK(meta["software"].contains("version"));
    CHECK(meta["min_v"]["v"].get<double>() < 1.0);
    CHECK_FALSE(fs::exists(dir / "density_t1_t2.csv"));
}

TEST_CASE("fock-verify engine agrees with the closed form")
{
    auto c = parse_config_text(R"({"engine":"fock-verify","kerr":{"chi11":0.4,"chi22":0.7,"chi12":0.2},
        "sequence":{"theta1":0.6,"theta2":0.3},"initial":{"n0_mean":12},
        "sweep":{"t_hold":{"start":0,"stop":1,"count":3},"phi":{"start":0,"stop":6.283185307179586,"count":4}}})");
    const auto fock = run(c);
    c.engine = Engine::TwoMode;
    const auto exact = run(c);
    REQUIRE(fock.rows.size() == exact.rows.size());
    for (std::size_t i = 0; i < fock.rows.size(); ++i)
        CHECK(fock.rows[i].v == doctest::Approx(exact.rows[i].v).epsilon(1e-7));
}

TEST_CASE("CLI exit codes and error reporting")
{
    const auto dir = scratch_dir("cli");
    const auto err = dir / "stderr.txt";

    CHECK(cli("--help", err) == 0);
    CHECK(cli("", err) == 2);
    CHECK(cli("run --preset fig2 --frobnicate", err) == 2);
    CHECK(json::parse(slurp(err))["error"]["exit_code"] == 2);

    std::ofstream(dir / "bad.json") << R"({"preset":"fig2","typo":true})";
    CHECK(cli("run --config " + (dir / "bad.json").string(), err) == 2);
    const auto e = json::parse(slurp(err));
    CHECK(e["error"]["kind"] == "config");
    CHECK(e["error"]["message"].get<std::string>().find("typo") != std::string::npos);

    CHECK(cli("run --config " + (dir / "missing.json").string(), err) == 4);
    std::ofstream(dir / "blocker") << "file";
    CHECK(cli("run --preset degenerate --out " + (dir / "blocker" / "sub").string(), err) == 4);

    // Ground state cannot fit in a box this small: numerical failure.
    std::ofstream(dir / "tiny_box.json")
        << R"({"preset":"fig3a","tw":{"box_ho_lengths":4,"n_traj":2,"dt":null},"sweep":{"phi":{"count":1}}})";
    CHECK(cli("run --config " + (dir / "tiny_box.json").string(), err) == 3);
    CHECK(json::parse(slurp(err))["error"]["kind"] == "numerical");

    const auto out = dir / "deg";
    CHECK(cli("sweep --preset degenerate --t-hold 0:0.01:3 --phi 0:6.283185307179586:4:open --out " +
                  out.string(),
              err) == 0);
    CHECK(fs::exists(out / "results.csv"));
    CHECK(fs::exists(out / "meta.json"));
    CHECK(cli("sweep --preset degenerate --t-hold 0:x:3", err) == 2);

    CHECK(cli("verify --suite fock", err) == 0);
    CHECK(cli("verify --suite fock --perturb-chi 1e-3", err) == 1);
}
