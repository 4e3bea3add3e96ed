#include "squeeze/runner.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "squeeze/error.hpp"
#include "squeeze/fock_oracle.hpp"
#include "squeeze/parallel.hpp"

namespace squeeze {

using nlohmann::json;

namespace {

std::vector<ResultRow> run_exact(const RunConfig& c, const std::vector<double>& holds,
                                 const std::vector<double>& phases)
{
    const auto map = variance_map(c.initial, c.kerr, c.theta1, c.theta2, holds, phases, c.threads);
    std::vector<ResultRow> rows(holds.size() * phases.size());
    for (std::size_t i = 0; i < holds.size(); ++i) {
        for (std::size_t j = 0; j < phases.size(); ++j) {
            const std::size_t k = i * phases.size() + j;
            rows[k] = {holds[i], phases[j], map.mean_map[k], map.mean_sq_map[k], map.values[k], 0.0,
                       c.engine, 0, 0};
        }
    }
    return rows;
}

std::vector<ResultRow> run_fock(const RunConfig& c, const std::vector<double>& holds,
                                const std::vector<double>& phases)
{
    std::vector<ResultRow> rows(holds.size() * phases.size());
    const cplx alpha0(std::sqrt(c.initial.n0_mean), 0.0);
    parallel_for(rows.size(), c.threads, [&](std::size_t k) {
        const double hold = holds[k / phases.size()];
        const double phi = phases[k % phases.size()];
        const auto m = fock_sequence_moments(alpha0, {c.theta1, c.theta2, phi, hold}, c.kerr, c.fock_cutoff);
        rows[k] = {hold, phi, m.mean_n2, m.mean_n2_sq, m.variance_norm, 0.0, c.engine, 0, 0};
    });
    return rows;
}

json kerr_json(const KerrParams& k)
{
    return {{"chi11", k.chi11}, {"chi22", k.chi22}, {"chi12", k.chi12}};
}

void run_tw(const RunConfig& c, const std::vector<double>& holds, const std::vector<double>& phases,
            RunOutput& out, std::ostream* progress)
{
    const SpdeModel model(c.tw_params());
    const auto psi0 = model.ground_state(c.initial.n0_mean);
    const auto kerr = model.frozen_mode_kerr(psi0);
    out.extra["frozen_mode_kerr"] = kerr_json(kerr);
    out.extra["g_trap_units"] = {{"g11", model.g11()}, {"g22", model.g22()}, {"g12", model.g12()}};

    EnsembleOptions options;
    options.n_traj = c.tw.n_traj;
    options.master_seed = c.master_seed;
    options.threads = c.threads;
    std::size_t flagged = 0;
    json totals = json::array();
    for (std::size_t i = 0; i < holds.size(); ++i) {
        options.record_densities = c.tw.record_densities && i + 1 == holds.size();
        const auto schedule = PulseSchedule::from_areas(c.theta1, c.theta2, 0.0, holds[i], c.tw.rabi);
        const auto res = run_ensemble(model, psi0, schedule, phases, {c.initial.n0_mean, c.initial.fano}, options);
        for (std::size_t j = 0; j < phases.size(); ++j) {
            const auto& m = res.mode2[j];
            flagged += m.flagged ? 1 : 0;
            out.rows.push_back({holds[i], phases[j], m.mean_n2, m.mean_n2_sq, m.variance_norm, m.stderr_v,
                                Engine::Tw, res.n_traj, c.master_seed});
        }
        totals.push_back({{"t_hold", holds[i]},
                          {"total_t0", res.total_t0},
                          {"total_t0_stderr", res.total_t0_stderr},
                          {"total_t3", res.total_t3},
                          {"total_t3_stderr", res.total_t3_stderr}});
        if (options.record_densities)
            out.densities = {res.x, res.density1_t1, res.density2_t1, res.density1_t2, res.density2_t2};
        if (progress)
            *progress << "[tw] hold " << (i + 1) << "/" << holds.size() << " done (" << res.n_traj
                      << " trajectories)\n"
                      << std::flush;
    }
    out.extra["flagged_rows"] = flagged;
    out.extra["total_number"] = totals;
}

}  // namespace

std::string format_double(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

RunOutput run(const RunConfig& config, std::ostream* progress)
{
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    RunOutput out;
    out.config = config;
    out.extra = json::object();
    const auto holds = config.t_hold.values();
    const auto phases = config.phi.values();

    switch (config.engine) {
    case Engine::TwoMode:
    case Engine::Mixture:
        out.rows = run_exact(config, holds, phases);
        break;
    case Engine::FockVerify:
        out.rows = run_fock(config, holds, phases);
        break;
    case Engine::Tw:
        run_tw(config, holds, phases, out, progress);
        break;
    }
    out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows)
{
    out << "t_hold,phi,mean_n2,mean_n2_sq,v,stderr_v,engine,n_traj,seed\n";
    for (const auto& r : rows) {
        out << format_double(r.t_hold) << ',' << format_double(r.phi) << ',' << format_double(r.mean_n2) << ','
            << format_double(r.mean_n2_sq) << ',' << format_double(r.v) << ',' << format_double(r.stderr_v)
            << ',' << engine_name(r.engine) << ',' << r.n_traj << ',' << r.seed << '\n';
    }
}

std::string results_csv(const std::vector<ResultRow>& rows)
{
    std::ostringstream s;
    s.imbue(std::locale::classic());
    write_results_csv(s, rows);
    return s.str();
}

void write_density_csv(std::ostream& out, const DensityTable& t)
{
    out << "x,n1_t1,n2_t1,n1_t2,n2_t2\n";
    for (std::size_t i = 0; i < t.x.size(); ++i) {
        out << format_double(t.x[i]) << ',' << format_double(t.n1_t1[i]) << ',' << format_double(t.n2_t1[i])
            << ',' << format_double(t.n1_t2[i]) << ',' << format_double(t.n2_t2[i]) << '\n';
    }
}

json metadata(const RunOutput& o)
{
    json meta;
    meta["config"] = config_to_json(o.config);
    meta["software"] = {{"name", "squeeze"}, {"version", SQUEEZE_VERSION}, {"compiler", __VERSION__},
                        {"fft", fft_backend_version()}};
    meta["wall_time_s"] = o.wall_time;
    meta["rows"] = o.rows.size();
    if (!o.rows.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < o.rows.size(); ++i)
            if (o.rows[i].v < o.rows[best].v)
                best = i;
        meta["min_v"] = {{"v", o.rows[best].v}, {"t_hold", o.rows[best].t_hold}, {"phi", o.rows[best].phi}};
    }
    for (const auto& [key, value] : o.extra.items())
        meta[key] = value;
    return meta;
}

void write_artifacts(const std::filesystem::path& dir, const RunOutput& o)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

    auto open = [](const std::filesystem::path& p) {
        std::ofstream f(p, std::ios::binary | std::ios::trunc);
        if (!f)
            throw IoError("cannot open " + p.string() + " for writing");
        f.imbue(std::locale::classic());
        return f;
    };
    auto close = [](std::ofstream& f, const std::filesystem::path& p) {
        f.close();
        if (!f)
            throw IoError("failed writing " + p.string());
    };

    const auto results = dir / "results.csv";
    auto f = open(results);
    write_results_csv(f, o.rows);
    close(f, results);

    const auto meta_path = dir / "meta.json";
    auto m = open(meta_path);
    m << metadata(o).dump(2) << '\n';
    close(m, meta_path);

    if (o.config.engine == Engine::Tw && !o.densities.x.empty()) {
        const auto dens = dir / "density_t1_t2.csv";
        auto d = open(dens);
        write_density_csv(d, o.densities);
        close(d, dens);
    }
}

}  // namespace squeeze
