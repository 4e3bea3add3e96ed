// Command-line driver: run / sweep / verify.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "squeeze/config.hpp"
#include "squeeze/error.hpp"
#include "squeeze/runner.hpp"
#include "squeeze/verify.hpp"

using namespace squeeze;
using nlohmann::json;

namespace {

struct Common {
    std::string config_path;
    std::string preset_name;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> n_traj;
};

void add_common(CLI::App* cmd, Common& c)
{
    auto* cfg = cmd->add_option("--config", c.config_path, "JSON run configuration");
    auto* pre = cmd->add_option("--preset", c.preset_name, "built-in configuration")
                    ->check(CLI::IsMember(preset_names()));
    cfg->excludes(pre);
    cmd->add_option("--out", c.out_dir, "output directory (overrides out_dir)");
    cmd->add_option("--seed", c.seed, "master seed (overrides master_seed)");
    cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--n-traj", c.n_traj, "TW trajectory count")->check(CLI::Range(std::uint64_t{2}, UINT64_MAX));
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read config file " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

RunConfig load(const Common& c, const std::string& fallback_preset)
{
    RunConfig cfg;
    if (!c.config_path.empty())
        cfg = parse_config_text(read_file(c.config_path));
    else if (!c.preset_name.empty())
        cfg = preset(c.preset_name);
    else if (!fallback_preset.empty())
        cfg = preset(fallback_preset);
    else
        throw ConfigError("one of --config or --preset is required");
    if (!c.out_dir.empty())
        cfg.out_dir = c.out_dir;
    if (c.seed)
        cfg.master_seed = *c.seed;
    if (c.threads)
        cfg.threads = *c.threads;
    if (c.n_traj)
        cfg.tw.n_traj = *c.n_traj;
    cfg.validate();
    return cfg;
}

// "start:stop:count", optionally with ":open" to exclude the stop value.
Axis parse_axis(const std::string& spec, Axis axis)
{
    std::stringstream s(spec);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(s, part, ':'))
        parts.push_back(part);
    if (parts.size() < 3 || parts.size() > 4 || (parts.size() == 4 && parts[3] != "open" && parts[3] != "closed"))
        throw ConfigError("axis '" + spec + "' must be start:stop:count[:open|:closed]");
    try {
        std::size_t used = 0;
        axis.start = std::stod(parts[0], &used);
        axis.stop = std::stod(parts[1]);
        const long long count = std::stoll(parts[2]);
        if (count < 1)
            throw ConfigError("axis count must be at least 1");
        axis.count = static_cast<std::size_t>(count);
    } catch (const std::logic_error&) {
        throw ConfigError("axis '" + spec + "' has a malformed number");
    }
    if (parts.size() == 4)
        axis.endpoint = parts[3] == "closed";
    return axis;
}

int run_and_write(const RunConfig& cfg)
{
    const auto out = run(cfg, &std::cerr);
    write_artifacts(cfg.out_dir, out);
    const auto meta = metadata(out);
    std::cout << "engine " << engine_name(cfg.engine) << ": " << out.rows.size() << " rows in "
              << out.wall_time << " s";
    if (meta.contains("min_v"))
        std::cout << "; min v = " << meta["min_v"]["v"].get<double>() << " at t_hold = "
                  << meta["min_v"]["t_hold"].get<double>() << " s, phi = " << meta["min_v"]["phi"].get<double>();
    std::cout << "\nwrote " << cfg.out_dir << "\n";
    return 0;
}

int error_exit(const char* kind, const std::string& message, int code)
{
    const json err = {{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
    std::cerr << err.dump() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Kerr-Ramsey number squeezing: two-mode, mixture, Fock and truncated Wigner engines"};
    app.require_subcommand(1);

    Common run_opts;
    auto* run_cmd = app.add_subcommand("run", "run a configuration and write results.csv / meta.json");
    add_common(run_cmd, run_opts);
    bool dry_run = false;
    run_cmd->add_flag("--dry-run", dry_run, "print the effective configuration and exit");

    Common sweep_opts;
    std::string t_axis, phi_axis;
    auto* sweep_cmd = app.add_subcommand("sweep", "run with the sweep axes overridden");
    add_common(sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--t-hold", t_axis, "hold-time axis start:stop:count[:open|:closed] (s)");
    sweep_cmd->add_option("--phi", phi_axis, "phase axis start:stop:count[:open|:closed] (rad)");

    Common verify_opts;
    std::string suite = "all";
    double perturb_chi = 0.0;
    std::size_t samples = 100000;
    auto* verify_cmd = app.add_subcommand("verify", "run the built-in oracle suites");
    add_common(verify_cmd, verify_opts);
    verify_cmd->add_option("--suite", suite, "fock | wigner | frozen | multimode | all")
        ->check(CLI::IsMember({"fock", "wigner", "frozen", "multimode", "all"}));
    verify_cmd->add_option("--samples", samples, "Wigner identity sample count");
    // Sensitivity check: scales the two-mode chi values by (1 + value).
    verify_cmd->add_option("--perturb-chi", perturb_chi)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return error_exit("usage", e.what(), 2);
    }

    try {
        if (*run_cmd) {
            const auto cfg = load(run_opts, "");
            if (dry_run) {
                std::cout << config_to_json(cfg).dump(2) << '\n';
                return 0;
            }
            return run_and_write(cfg);
        }
        if (*sweep_cmd) {
            auto cfg = load(sweep_opts, "");
            if (!t_axis.empty())
                cfg.t_hold = parse_axis(t_axis, cfg.t_hold);
            if (!phi_axis.empty())
                cfg.phi = parse_axis(phi_axis, cfg.phi);
            cfg.validate();
            return run_and_write(cfg);
        }
        // verify
        const std::uint64_t seed = verify_opts.seed.value_or(1);
        const unsigned threads = verify_opts.threads.value_or(1);
        bool ok = true;
        auto report = [&](const SuiteReport& r) {
            print_report(std::cout, r);
            ok = ok && r.pass();
        };
        if (suite == "fock" || suite == "all") {
            OracleOptions o;
            o.seed = seed;
            o.threads = threads;
            o.chi_perturbation = perturb_chi;
            report(verify_fock_oracle(o));
        }
        if (suite == "wigner" || suite == "all")
            report(verify_wigner_identities(samples, seed));
        if (suite == "frozen" || suite == "all")
            report(verify_frozen_mode(load(verify_opts, "fig3a"), perturb_chi));
        if (suite == "multimode" || suite == "all")
            report(verify_multimode(load(verify_opts, "fig3b")));
        std::cout << (ok ? "all suites passed" : "verification FAILED") << '\n';
        return ok ? 0 : 1;
    } catch (const ConfigError& e) {
        return error_exit("config", e.what(), 2);
    } catch (const ParameterError& e) {
        return error_exit("config", e.what(), 2);
    } catch (const IoError& e) {
        return error_exit("io", e.what(), 4);
    } catch (const Error& e) {
        return error_exit("numerical", e.what(), 3);
    } catch (const std::exception& e) {
        return error_exit("internal", e.what(), 3);
    }
}
