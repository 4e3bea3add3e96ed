#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "squeeze/config.hpp"
#include "squeeze/tw_engine.hpp"

namespace squeeze {

/// One measured quantity against its threshold.
struct Check {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
};

struct SuiteReport {
    std::string suite;
    std::vector<Check> checks;
    double wall_time = 0.0;  // s

    bool pass() const;
    void add(std::string name, bool pass, double measured, double threshold);
};

void print_report(std::ostream& out, const SuiteReport& report);

/// Closed form against the truncated Fock oracle over random parameter draws
/// for each N0; passes if every relative deviation of <N2> and <N2^2> is
/// within 1e-6. `chi_perturbation` scales the closed form's chi values by
/// (1 + perturbation) to check that the suite can fail.
struct OracleOptions {
    std::vector<double> n0_values{1, 2, 4, 8, 16, 20};
    std::size_t draws = 50;
    std::uint64_t seed = 1;
    double chi_perturbation = 0.0;
    unsigned threads = 1;
};
SuiteReport verify_fock_oracle(const OracleOptions& options = {});

/// Symmetric-to-normal ordering identities on synthetic Gaussian ensembles
/// (vacuum and one displaced mode) for M in {1, 64, 256}.
SuiteReport verify_wigner_identities(std::size_t samples = 100000, std::uint64_t seed = 1);

/// TW ensemble next to the two-mode closed form with chi taken from the
/// simulated ground state, for a single-hold TW configuration.
struct TwComparison {
    KerrParams kerr;
    double t_hold = 0.0;
    std::vector<double> phases;
    std::vector<MomentSet> tw;
    std::vector<MomentSet> two_mode;
    std::vector<double> z;  // (v_tw - v_two_mode) / stderr_v
    double max_abs_z = 0.0;
    double density2_l2_change = 0.0;  // ||n2(t2) - n2(t1)|| / ||n2(t1)||
    double total_drift_z = 0.0;       // worst |total(t3) - total(t0)| / stderr
    EnsembleResult ensemble;
};
TwComparison compare_tw_two_mode(const RunConfig& config, double chi_perturbation = 0.0);

/// Frozen-mode contract: |z| <= 3 at every phase; total number conserved.
SuiteReport verify_frozen_mode(const RunConfig& config, double chi_perturbation = 0.0);

/// Multimode breakdown: mode-2 density changes by more than 5% between t1
/// and t2 and TW departs from the two-mode prediction by more than 3 stderr.
SuiteReport verify_multimode(const RunConfig& config);

}  // namespace squeeze
