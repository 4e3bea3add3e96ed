#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "squeeze/tw_engine.hpp"
#include "squeeze/two_mode.hpp"
#include "squeeze/units.hpp"

namespace squeeze {

enum class Engine { TwoMode, Mixture, FockVerify, Tw };

std::string_view engine_name(Engine engine);
Engine engine_from_name(std::string_view name);

/// Evenly spaced sweep axis. With endpoint = false the stop value is excluded
/// (the natural choice for a periodic phase axis).
struct Axis {
    double start = 0.0;
    double stop = 0.0;
    std::size_t count = 1;
    bool endpoint = true;

    std::vector<double> values() const;
};

struct TwConfig {
    std::size_t points = 256;
    double box_ho_lengths = 16.0;
    std::optional<double> dt;  // s; unset -> min(1 us, split-step bound)
    double rabi = 5e4;         // rad/s during the pulses
    std::uint64_t n_traj = 1000;
    bool record_densities = true;
};

/// Everything a run needs, SI throughout. The JSON form also accepts trap
/// frequencies in Hz via axial_hz / transverse_hz.
struct RunConfig {
    std::string preset;  // informational
    std::string notes;
    Engine engine = Engine::TwoMode;

    KerrParams kerr;  // two-mode, mixture and fock-verify engines
    SpeciesParams species = SpeciesParams::sodium();
    TrapParams trap = TrapParams::spherical_hz(500.0);

    double theta1 = 0.0;
    double theta2 = 0.0;
    InitialEnsemble initial{1.0, 1.0};
    Axis t_hold{0.0, 0.0, 1, true};
    Axis phi{0.0, 2.0 * kPi, 1, false};

    MixtureOptions mixture;
    int fock_cutoff = 0;  // 0 -> automatic
    TwConfig tw;

    std::uint64_t master_seed = 1;
    unsigned threads = 1;
    std::string out_dir = "out";

    /// Throws ConfigError describing the first problem found.
    void validate() const;

    /// TwParams with dt resolved.
    TwParams tw_params() const;
    double effective_dt() const;
};

/// Parses a JSON document. Unknown keys anywhere are rejected; missing keys
/// take the defaults of `base` (a preset when the document names one).
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(std::string_view text);

/// Effective configuration with every default resolved. parse_config of the
/// result reproduces the same configuration.
nlohmann::json config_to_json(const RunConfig& config);

std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
RunConfig preset(std::string_view name);

}  // namespace squeeze
