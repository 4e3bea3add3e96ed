#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "squeeze/config.hpp"

namespace squeeze {

/// One sweep cell. Standard errors, n_traj and seed are zero for exact engines.
struct ResultRow {
    double t_hold = 0.0;
    double phi = 0.0;
    double mean_n2 = 0.0;
    double mean_n2_sq = 0.0;
    double v = 0.0;
    double stderr_v = 0.0;
    Engine engine = Engine::TwoMode;
    std::uint64_t n_traj = 0;
    std::uint64_t seed = 0;
};

/// Ensemble-mean densities (1/m) at t1 and t2 of the longest hold, TW only.
struct DensityTable {
    std::vector<double> x;
    std::vector<double> n1_t1, n2_t1, n1_t2, n2_t2;
};

struct RunOutput {
    RunConfig config;
    std::vector<ResultRow> rows;  // row-major over (t_hold, phi)
    DensityTable densities;       // empty unless engine == tw
    nlohmann::json extra;         // engine-specific metadata
    double wall_time = 0.0;       // s
};

/// Executes the configured engine over the sweep. `progress` (may be null)
/// receives one line per completed hold time for TW runs.
RunOutput run(const RunConfig& config, std::ostream* progress = nullptr);

/// Fixed-column, locale-independent CSV with 17 significant digits.
void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::string results_csv(const std::vector<ResultRow>& rows);
void write_density_csv(std::ostream& out, const DensityTable& table);
nlohmann::json metadata(const RunOutput& output);

/// Writes results.csv, meta.json and (TW) density_t1_t2.csv into `dir`,
/// creating it if needed. Throws IoError.
void write_artifacts(const std::filesystem::path& dir, const RunOutput& output);

/// Shortest round-trip text is not required; this always uses 17 significant digits.
std::string format_double(double value);

}  // namespace squeeze
