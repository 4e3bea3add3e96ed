#include "squeeze/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "squeeze/error.hpp"
#include "squeeze/fock_oracle.hpp"
#include "squeeze/parallel.hpp"
#include "squeeze/tw_stats.hpp"

namespace squeeze {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start)
{
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

KerrParams scaled(KerrParams k, double perturbation)
{
    k.chi11 *= 1.0 + perturbation;
    k.chi22 *= 1.0 + perturbation;
    k.chi12 *= 1.0 + perturbation;
    return k;
}

}  // namespace

bool SuiteReport::pass() const
{
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void SuiteReport::add(std::string name, bool ok, double measured, double threshold)
{
    checks.push_back({std::move(name), ok, measured, threshold});
}

void print_report(std::ostream& out, const SuiteReport& r)
{
    const auto flags = out.flags();
    out << (r.pass() ? "PASS " : "FAIL ") << r.suite << " (" << std::fixed << std::setprecision(1) << r.wall_time
        << " s)\n";
    out.flags(flags);
    for (const auto& c : r.checks) {
        out << "  " << (c.pass ? "ok   " : "FAIL ") << c.name << ": " << std::setprecision(4) << c.measured
            << " (threshold " << c.threshold << ")\n";
    }
    out.flags(flags);
}

SuiteReport verify_fock_oracle(const OracleOptions& o)
{
    const auto start = clock_type::now();
    struct Draw {
        double n0;
        SequenceSpec seq;
        KerrParams kerr;
    };
    std::vector<Draw> draws;
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (double n0 : o.n0_values) {
        for (std::size_t d = 0; d < o.draws; ++d) {
            Draw x{n0, {}, {}};
            x.seq = {0.5 * kPi * u01(rng), 0.5 * kPi * u01(rng), 2.0 * kPi * u01(rng), 2.0 * u01(rng)};
            x.kerr = {u01(rng), u01(rng), u01(rng), 0.0};
            draws.push_back(x);
        }
    }

    std::vector<double> dev_mean(draws.size()), dev_sq(draws.size());
    parallel_for(draws.size(), o.threads, [&](std::size_t i) {
        const auto& d = draws[i];
        const auto exact = closed_form_moments({d.n0, 1.0}, d.seq, scaled(d.kerr, o.chi_perturbation));
        const auto brute = fock_sequence_moments(std::sqrt(d.n0), d.seq, d.kerr);
        dev_mean[i] = rel(exact.mean_n2, brute.mean_n2);
        dev_sq[i] = rel(exact.mean_n2_sq, brute.mean_n2_sq);
    });

    SuiteReport r;
    r.suite = "fock oracle vs closed form";
    const std::size_t per = o.draws;
    for (std::size_t k = 0; k < o.n0_values.size(); ++k) {
        const auto b = dev_mean.begin() + static_cast<std::ptrdiff_t>(k * per);
        const auto c = dev_sq.begin() + static_cast<std::ptrdiff_t>(k * per);
        const double worst = std::max(*std::max_element(b, b + static_cast<std::ptrdiff_t>(per)),
                                      *std::max_element(c, c + static_cast<std::ptrdiff_t>(per)));
        std::ostringstream name;
        name << "N0=" << o.n0_values[k] << " max relative deviation over " << per << " draws";
        r.add(name.str(), worst <= 1e-6, worst, 1e-6);
    }
    r.wall_time = seconds_since(start);
    return r;
}

SuiteReport verify_wigner_identities(std::size_t samples, std::uint64_t seed)
{
    const auto start = clock_type::now();
    SuiteReport r;
    r.suite = "Wigner ordering identities";
    const double alpha = 10.0;
    for (std::size_t modes : {std::size_t{1}, std::size_t{64}, std::size_t{256}}) {
        std::mt19937_64 rng(seed + modes);
        std::normal_distribution<double> q(0.0, 0.5);
        MomentAccumulator vacuum, coherent;
        for (std::size_t s = 0; s < samples; ++s) {
            double nv = 0.0;
            for (std::size_t k = 0; k < modes; ++k) {
                const double a = q(rng), b = q(rng);
                nv += a * a + b * b;
            }
            vacuum.add(nv);
            // Same structure with mode 0 displaced by alpha.
            double nc = 0.0;
            for (std::size_t k = 0; k < modes; ++k) {
                const double a = q(rng) + (k == 0 ? alpha : 0.0), b = q(rng);
                nc += a * a + b * b;
            }
            coherent.add(nc);
        }
        const auto v = extract_moments(vacuum, modes);
        const auto c = extract_moments(coherent, modes);
        const std::string tag = "M=" + std::to_string(modes) + " ";
        const double z_mean = std::abs(v.mean_n2) / v.stderr_mean;
        const double z_sq = std::abs(v.mean_n2_sq) / v.stderr_mean_sq;
        r.add(tag + "vacuum |<N>|/stderr", z_mean <= 3.0, z_mean, 3.0);
        r.add(tag + "vacuum |<N^2>|/stderr", z_sq <= 3.0, z_sq, 3.0);
        const double z_cm = std::abs(c.mean_n2 - alpha * alpha) / c.stderr_mean;
        const double z_v = std::abs(c.variance_norm - 1.0) / c.stderr_v;
        r.add(tag + "coherent |<N> - |a|^2|/stderr", z_cm <= 3.0, z_cm, 3.0);
        r.add(tag + "coherent |v - 1|/stderr", z_v <= 3.0, z_v, 3.0);
    }
    r.wall_time = seconds_since(start);
    return r;
}

TwComparison compare_tw_two_mode(const RunConfig& config, double chi_perturbation)
{
    config.validate();
    if (config.engine != Engine::Tw)
        throw ConfigError("TW comparison needs a tw engine configuration");
    if (config.t_hold.count != 1)
        throw ConfigError("TW comparison runs at a single hold time");

    const SpdeModel model(config.tw_params());
    const auto psi0 = model.ground_state(config.initial.n0_mean);
    TwComparison out;
    out.kerr = model.frozen_mode_kerr(psi0);
    out.t_hold = config.t_hold.start;
    out.phases = config.phi.values();

    EnsembleOptions options;
    options.n_traj = config.tw.n_traj;
    options.master_seed = config.master_seed;
    options.threads = config.threads;
    options.record_densities = true;
    const auto schedule = PulseSchedule::from_areas(config.theta1, config.theta2, 0.0, out.t_hold, config.tw.rabi);
    out.ensemble = run_ensemble(model, psi0, schedule, out.phases,
                                {config.initial.n0_mean, config.initial.fano}, options);
    out.tw = out.ensemble.mode2;

    const auto kerr = scaled(out.kerr, chi_perturbation);
    for (double phi : out.phases) {
        const SequenceSpec seq{config.theta1, config.theta2, phi, out.t_hold};
        out.two_mode.push_back(config.initial.fano == 1.0 ? closed_form_moments(config.initial, seq, kerr)
                                                          : mixture_moments(config.initial, seq, kerr));
    }
    for (std::size_t i = 0; i < out.phases.size(); ++i) {
        const double z = (out.tw[i].variance_norm - out.two_mode[i].variance_norm) / out.tw[i].stderr_v;
        out.z.push_back(z);
        out.max_abs_z = std::max(out.max_abs_z, std::abs(z));
    }

    const auto& d1 = out.ensemble.density2_t1;
    const auto& d2 = out.ensemble.density2_t2;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < d1.size(); ++i) {
        num += (d2[i] - d1[i]) * (d2[i] - d1[i]);
        den += d1[i] * d1[i];
    }
    out.density2_l2_change = den > 0.0 ? std::sqrt(num / den) : 0.0;

    const auto& e = out.ensemble;
    for (std::size_t i = 0; i < e.total_t3.size(); ++i) {
        const double se = std::hypot(e.total_t0_stderr, e.total_t3_stderr[i]);
        out.total_drift_z = std::max(out.total_drift_z, std::abs(e.total_t3[i] - e.total_t0) / se);
    }
    return out;
}

SuiteReport verify_frozen_mode(const RunConfig& config, double chi_perturbation)
{
    const auto start = clock_type::now();
    const auto cmp = compare_tw_two_mode(config, chi_perturbation);
    SuiteReport r;
    r.suite = "frozen-mode TW vs two-mode";
    r.add("max |v_tw - v_two_mode| / stderr over " + std::to_string(cmp.phases.size()) + " phases",
          cmp.max_abs_z <= 3.0, cmp.max_abs_z, 3.0);
    r.add("total number drift t0 -> t3 / stderr", cmp.total_drift_z <= 3.0, cmp.total_drift_z, 3.0);
    r.wall_time = seconds_since(start);
    return r;
}

SuiteReport verify_multimode(const RunConfig& config)
{
    const auto start = clock_type::now();
    const auto cmp = compare_tw_two_mode(config);
    SuiteReport r;
    r.suite = "multimode breakdown";
    r.add("mode-2 density relative L2 change t1 -> t2", cmp.density2_l2_change > 0.05, cmp.density2_l2_change,
          0.05);
    r.add("max |v_tw - v_two_mode| / stderr", cmp.max_abs_z > 3.0, cmp.max_abs_z, 3.0);
    r.wall_time = seconds_since(start);
    return r;
}

}  // namespace squeeze
