#include "squeeze/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "squeeze/error.hpp"

namespace squeeze {

using nlohmann::json;

namespace {

constexpr std::pair<Engine, std::string_view> kEngines[] = {
    {Engine::TwoMode, "two-mode"},
    {Engine::Mixture, "mixture"},
    {Engine::FockVerify, "fock-verify"},
    {Engine::Tw, "tw"},
};

// Rejects keys outside `allowed`; `where` names the object in messages.
void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where)
{
    if (!obj.is_object())
        throw ConfigError(std::string(where) + " must be a JSON object");
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
}

template <class T>
void read(const json& obj, const char* key, T& out, std::string_view where)
{
    if (!obj.contains(key))
        return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string(where) + "." + key + " has the wrong type");
    }
}

void read_number(const json& obj, const char* key, double& out, std::string_view where)
{
    if (!obj.contains(key))
        return;
    if (!obj.at(key).is_number())
        throw ConfigError(std::string(where) + "." + key + " must be a number");
    out = obj.at(key).get<double>();
}

template <class U>
void read_unsigned(const json& obj, const char* key, U& out, std::string_view where)
{
    if (!obj.contains(key))
        return;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        throw ConfigError(std::string(where) + "." + key + " must be a non-negative integer");
    out = static_cast<U>(v.get<std::uint64_t>());
}

Axis read_axis(const json& obj, Axis axis, std::string_view where)
{
    check_keys(obj, {"start", "stop", "count", "endpoint"}, where);
    read_number(obj, "start", axis.start, where);
    read_number(obj, "stop", axis.stop, where);
    read_unsigned(obj, "count", axis.count, where);
    read(obj, "endpoint", axis.endpoint, where);
    return axis;
}

json axis_json(const Axis& a)
{
    return {{"start", a.start}, {"stop", a.stop}, {"count", a.count}, {"endpoint", a.endpoint}};
}

void apply(const json& doc, RunConfig& c)
{
    check_keys(doc,
               {"preset", "notes", "engine", "kerr", "species", "trap", "sequence", "initial", "sweep",
                "mixture", "fock", "tw", "master_seed", "threads", "out_dir"},
               "config");
    read(doc, "notes", c.notes, "config");
    if (doc.contains("engine")) {
        std::string name;
        read(doc, "engine", name, "config");
        c.engine = engine_from_name(name);
    }
    if (doc.contains("kerr")) {
        const auto& k = doc.at("kerr");
        check_keys(k, {"chi11", "chi22", "chi12"}, "kerr");
        read_number(k, "chi11", c.kerr.chi11, "kerr");
        read_number(k, "chi22", c.kerr.chi22, "kerr");
        read_number(k, "chi12", c.kerr.chi12, "kerr");
    }
    if (doc.contains("species")) {
        const auto& s = doc.at("species");
        if (s.is_string()) {
            if (s.get<std::string>() != "sodium")
                throw ConfigError("unknown species '" + s.get<std::string>() + "'");
            c.species = SpeciesParams::sodium();
        } else {
            check_keys(s, {"mass_kg", "a11_m", "a22_m", "a12_m"}, "species");
            read_number(s, "mass_kg", c.species.mass, "species");
            read_number(s, "a11_m", c.species.a11, "species");
            read_number(s, "a22_m", c.species.a22, "species");
            read_number(s, "a12_m", c.species.a12, "species");
        }
    }
    if (doc.contains("trap")) {
        const auto& t = doc.at("trap");
        check_keys(t, {"omega", "omega_perp", "axial_hz", "transverse_hz"}, "trap");
        if ((t.contains("omega") && t.contains("axial_hz")) ||
            (t.contains("omega_perp") && t.contains("transverse_hz")))
            throw ConfigError("trap: give each frequency either in rad/s or in Hz, not both");
        read_number(t, "omega", c.trap.omega, "trap");
        read_number(t, "omega_perp", c.trap.omega_perp, "trap");
        if (t.contains("axial_hz")) {
            double f = 0.0;
            read_number(t, "axial_hz", f, "trap");
            c.trap.omega = 2.0 * kPi * f;
        }
        if (t.contains("transverse_hz")) {
            double f = 0.0;
            read_number(t, "transverse_hz", f, "trap");
            c.trap.omega_perp = 2.0 * kPi * f;
        }
    }
    if (doc.contains("sequence")) {
        const auto& s = doc.at("sequence");
        check_keys(s, {"theta1", "theta2"}, "sequence");
        read_number(s, "theta1", c.theta1, "sequence");
        read_number(s, "theta2", c.theta2, "sequence");
    }
    if (doc.contains("initial")) {
        const auto& s = doc.at("initial");
        check_keys(s, {"n0_mean", "fano"}, "initial");
        read_number(s, "n0_mean", c.initial.n0_mean, "initial");
        read_number(s, "fano", c.initial.fano, "initial");
    }
    if (doc.contains("sweep")) {
        const auto& s = doc.at("sweep");
        check_keys(s, {"t_hold", "phi"}, "sweep");
        if (s.contains("t_hold"))
            c.t_hold = read_axis(s.at("t_hold"), c.t_hold, "sweep.t_hold");
        if (s.contains("phi"))
            c.phi = read_axis(s.at("phi"), c.phi, "sweep.phi");
    }
    if (doc.contains("mixture")) {
        const auto& s = doc.at("mixture");
        check_keys(s, {"rel_tolerance", "max_depth"}, "mixture");
        read_number(s, "rel_tolerance", c.mixture.rel_tolerance, "mixture");
        read_unsigned(s, "max_depth", c.mixture.max_depth, "mixture");
    }
    if (doc.contains("fock")) {
        const auto& s = doc.at("fock");
        check_keys(s, {"cutoff"}, "fock");
        unsigned cutoff = static_cast<unsigned>(c.fock_cutoff);
        read_unsigned(s, "cutoff", cutoff, "fock");
        c.fock_cutoff = static_cast<int>(std::min<unsigned>(cutoff, 1u << 20));
    }
    if (doc.contains("tw")) {
        const auto& s = doc.at("tw");
        check_keys(s, {"points", "box_ho_lengths", "dt", "rabi", "n_traj", "record_densities"}, "tw");
        read_unsigned(s, "points", c.tw.points, "tw");
        read_number(s, "box_ho_lengths", c.tw.box_ho_lengths, "tw");
        if (s.contains("dt")) {
            if (s.at("dt").is_null()) {
                c.tw.dt.reset();
            } else {
                double dt = 0.0;
                read_number(s, "dt", dt, "tw");
                c.tw.dt = dt;
            }
        }
        read_number(s, "rabi", c.tw.rabi, "tw");
        read_unsigned(s, "n_traj", c.tw.n_traj, "tw");
        read(s, "record_densities", c.tw.record_densities, "tw");
    }
    read_unsigned(doc, "master_seed", c.master_seed, "config");
    read_unsigned(doc, "threads", c.threads, "config");
    read(doc, "out_dir", c.out_dir, "config");
}

RunConfig fig2_base()
{
    RunConfig c;
    c.notes = "sodium |1,+1>/|2,0> in a 500 Hz spherical trap, Poissonian N0 = 1e7";
    c.engine = Engine::TwoMode;
    c.kerr = {0.018, 0.019, 0.018, 0.0};
    c.theta1 = 0.3;
    c.theta2 = 0.025;
    c.initial = {1e7, 1.0};
    c.t_hold = {0.0, 0.020, 201, true};
    c.phi = {0.0, 2.0 * kPi, 201, false};
    return c;
}

// Frozen-mode regime: a tight axial trap with weak transverse confinement
// keeps the mode close to the oscillator ground state and coarse on the grid.
RunConfig frozen_base()
{
    RunConfig c;
    c.engine = Engine::Tw;
    c.species = SpeciesParams::sodium();
    c.trap = {2.0 * kPi * 5000.0, 2.0 * kPi * 200.0};
    c.theta1 = 0.05;
    c.theta2 = 0.025;
    c.initial = {1e4, 1.0};
    c.phi = {0.0, 2.0 * kPi, 24, false};
    c.tw.points = 32;
    c.tw.box_ho_lengths = 20.0;
    c.tw.dt = 3e-6;
    c.tw.rabi = 5e4;
    c.tw.n_traj = 10000;
    return c;
}

}  // namespace

std::string_view engine_name(Engine engine)
{
    for (const auto& [e, name] : kEngines)
        if (e == engine)
            return name;
    return "unknown";
}

Engine engine_from_name(std::string_view name)
{
    for (const auto& [e, n] : kEngines)
        if (n == name)
            return e;
    throw ConfigError("unknown engine '" + std::string(name) + "' (two-mode, mixture, fock-verify, tw)");
}

std::vector<double> Axis::values() const
{
    std::vector<double> v(count);
    if (count == 1) {
        v[0] = start;
        return v;
    }
    const double divisions = static_cast<double>(endpoint ? count - 1 : count);
    for (std::size_t i = 0; i < count; ++i)
        v[i] = start + (stop - start) * (static_cast<double>(i) / divisions);
    if (endpoint)
        v.back() = stop;
    return v;
}

double RunConfig::effective_dt() const
{
    if (tw.dt)
        return *tw.dt;
    TwParams p;
    p.species = species;
    p.trap = trap;
    p.points = tw.points;
    p.box_ho_lengths = tw.box_ho_lengths;
    return std::min(1e-6, max_stable_dt(p));
}

TwParams RunConfig::tw_params() const
{
    TwParams p;
    p.species = species;
    p.trap = trap;
    p.points = tw.points;
    p.box_ho_lengths = tw.box_ho_lengths;
    p.dt = effective_dt();
    return p;
}

void RunConfig::validate() const
{
    auto check_axis = [](const Axis& a, const char* name) {
        if (a.count == 0)
            throw ConfigError(std::string("sweep.") + name + ".count must be at least 1");
        if (!std::isfinite(a.start) || !std::isfinite(a.stop))
            throw ConfigError(std::string("sweep.") + name + " bounds must be finite");
        if (a.count > 1 && !(a.stop > a.start))
            throw ConfigError(std::string("sweep.") + name + ".stop must exceed start");
    };
    check_axis(t_hold, "t_hold");
    check_axis(phi, "phi");
    if (!(t_hold.start >= 0.0))
        throw ConfigError("sweep.t_hold must be non-negative");
    if (threads == 0)
        throw ConfigError("threads must be at least 1");

    try {
        SequenceSpec{theta1, theta2, 0.0, t_hold.start}.validate();
        initial.validate();
        switch (engine) {
        case Engine::TwoMode:
        case Engine::FockVerify:
            kerr.validate();
            if (initial.fano != 1.0)
                throw ConfigError(std::string(engine_name(engine)) +
                                  " engine needs fano = 1; use the mixture engine for super-Poissonian input");
            if (engine == Engine::FockVerify && initial.n0_mean > 2000.0)
                throw ConfigError("fock-verify engine is limited to n0_mean <= 2000");
            break;
        case Engine::Mixture:
            kerr.validate();
            if (!(mixture.rel_tolerance > 0.0))
                throw ConfigError("mixture.rel_tolerance must be positive");
            break;
        case Engine::Tw:
            if (tw.n_traj < 2)
                throw ConfigError("tw.n_traj must be at least 2");
            if (!(tw.rabi > 0.0))
                throw ConfigError("tw.rabi must be positive");
            if (!(initial.n0_mean > 0.0))
                throw ConfigError("tw engine needs n0_mean > 0");
            tw_params().validate();
            break;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

RunConfig parse_config(const json& doc)
{
    if (!doc.is_object())
        throw ConfigError("config must be a JSON object");
    RunConfig c;
    if (doc.contains("preset")) {
        if (!doc.at("preset").is_string())
            throw ConfigError("config.preset must be a string");
        c = preset(doc.at("preset").get<std::string>());
    }
    apply(doc, c);
    c.validate();
    return c;
}

RunConfig parse_config_text(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

json config_to_json(const RunConfig& c)
{
    json j;
    if (!c.preset.empty())
        j["preset"] = c.preset;
    j["notes"] = c.notes;
    j["engine"] = std::string(engine_name(c.engine));
    j["kerr"] = {{"chi11", c.kerr.chi11}, {"chi22", c.kerr.chi22}, {"chi12", c.kerr.chi12}};
    j["species"] = {{"mass_kg", c.species.mass},
                    {"a11_m", c.species.a11},
                    {"a22_m", c.species.a22},
                    {"a12_m", c.species.a12}};
    j["trap"] = {{"omega", c.trap.omega}, {"omega_perp", c.trap.omega_perp}};
    j["sequence"] = {{"theta1", c.theta1}, {"theta2", c.theta2}};
    j["initial"] = {{"n0_mean", c.initial.n0_mean}, {"fano", c.initial.fano}};
    j["sweep"] = {{"t_hold", axis_json(c.t_hold)}, {"phi", axis_json(c.phi)}};
    j["mixture"] = {{"rel_tolerance", c.mixture.rel_tolerance}, {"max_depth", c.mixture.max_depth}};
    j["fock"] = {{"cutoff", c.fock_cutoff}};
    j["tw"] = {{"points", c.tw.points},
               {"box_ho_lengths", c.tw.box_ho_lengths},
               {"dt", c.effective_dt()},
               {"rabi", c.tw.rabi},
               {"n_traj", c.tw.n_traj},
               {"record_densities", c.tw.record_densities}};
    j["master_seed"] = c.master_seed;
    j["threads"] = c.threads;
    j["out_dir"] = c.out_dir;
    return j;
}

std::vector<std::string> preset_names()
{
    return {"fig2", "fig2-noise150", "fig2-noise5pct", "degenerate", "fig3a", "fig3b"};
}

RunConfig preset(std::string_view name)
{
    RunConfig c;
    if (name == "fig2") {
        c = fig2_base();
    } else if (name == "fig2-noise150") {
        c = fig2_base();
        c.engine = Engine::Mixture;
        c.initial.fano = 150.0;
        c.notes += "; number variance 150x Poissonian";
    } else if (name == "fig2-noise5pct") {
        c = fig2_base();
        c.engine = Engine::Mixture;
        c.initial.fano = 0.05 * 0.05 * c.initial.n0_mean;
        c.notes += "; 5% rms number fluctuations";
    } else if (name == "degenerate") {
        c = fig2_base();
        c.kerr = {0.018, 0.018, 0.018, 0.0};
        c.t_hold.count = 41;
        c.phi.count = 41;
        c.notes = "equal chi: no relative phase shear, v = 1 everywhere";
    } else if (name == "fig3a") {
        c = frozen_base();
        // Three times the hold at which (chi22 - chi12) sqrt(N0) t matches the
        // 500 Hz / N0 = 1e7 / 16 ms configuration.
        c.t_hold = {7.145e-3, 7.145e-3, 1, true};
        c.notes = "frozen-mode regime, 0.25% transfer, N0 = 1e4";
    } else if (name == "fig3b") {
        c = frozen_base();
        // Stronger nonlinearity: tighter transverse confinement and a larger
        // a22, resolved on a finer grid.
        c.trap.omega_perp = 2.0 * kPi * 2000.0;
        c.species.a22 = 4.2e-9;
        c.theta1 = 0.3;
        c.t_hold = {2.074e-4, 2.074e-4, 1, true};
        c.tw.points = 128;
        c.tw.dt = 3e-7;
        c.tw.n_traj = 2000;
        c.notes = "multimode regime, 9% transfer, N0 = 1e4";
    } else {
        std::ostringstream msg;
        msg << "unknown preset '" << name << "'; available:";
        for (const auto& n : preset_names())
            msg << ' ' << n;
        throw ConfigError(msg.str());
    }
    c.preset = std::string(name);
    return c;
}

}  // namespace squeeze
