#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "squeeze/moments.hpp"
#include "squeeze/tw_stats.hpp"
#include "squeeze/two_mode.hpp"
#include "squeeze/units.hpp"

namespace squeeze {

/// Uniform periodic grid centred on the trap. `length` in metres.
struct Grid1D {
    std::size_t points = 256;
    double length = 0.0;

    double dx() const noexcept { return length / static_cast<double>(points); }
    /// Coordinates x_i = (i - M/2) dx, metres.
    std::vector<double> x() const;
    void validate() const;
};

/// Physical model of the 1D two-component field (SI).
struct TwParams {
    SpeciesParams species;
    TrapParams trap;
    std::size_t points = 256;
    double box_ho_lengths = 16.0;  // box length in units of sqrt(hbar/(m omega))
    double dt = 1e-6;              // s

    Grid1D grid() const;
    void validate() const;
};

/// Version string of the FFT library backing the split-step integrator.
const char* fft_backend_version();

/// Largest time step (s) the split-step integrator accepts for these parameters.
double max_stable_dt(const TwParams& params);

/// Coupling pulse timing (s) and Rabi frequency (rad/s). The first pulse has
/// phase 0, the second carries `phi2`.
struct PulseSchedule {
    double t0 = 0.0;
    double t1 = 0.0;
    double t2 = 0.0;
    double t3 = 0.0;
    double omega0 = 0.0;
    double phi2 = 0.0;

    double theta1() const noexcept { return omega0 * (t1 - t0); }
    double theta2() const noexcept { return omega0 * (t3 - t2); }
    double t_hold() const noexcept { return t2 - t1; }
    void validate() const;

    static PulseSchedule from_areas(double theta1, double theta2, double phi, double t_hold,
                                    double omega0, double t0 = 0.0);
};

/// Pair of complex fields. Amplitudes are in trap units
/// (oscillator length^{-1/2}); `time` is in seconds.
struct FieldState {
    std::vector<std::complex<double>> psi1;
    std::vector<std::complex<double>> psi2;
    double time = 0.0;
};

/// Coupling active during one step: i d/dt (psi1, psi2) = (Omega psi2, Omega^* psi1),
/// Omega = rabi * e^{i phase}, rabi in rad/s.
struct Coupling {
    double rabi = 0.0;
    double phase = 0.0;
};

/// Discretised split-step model in harmonic-oscillator units. Immutable after
/// construction and shareable between threads; each integration uses its own
/// scratch buffers.
class SpdeModel {
public:
    explicit SpdeModel(const TwParams& params);
    ~SpdeModel();
    SpdeModel(const SpdeModel&) = delete;
    SpdeModel& operator=(const SpdeModel&) = delete;

    const TwParams& params() const noexcept { return params_; }
    const TrapUnits& units() const noexcept { return units_; }
    std::size_t points() const noexcept { return params_.points; }
    /// Grid spacing in oscillator lengths.
    double dx() const noexcept { return dx_; }
    std::span<const double> x() const noexcept { return x_; }
    /// Dimensionless 1D couplings g_ij = U_ij^{1D} / (hbar omega a_ho).
    double g11() const noexcept { return g11_; }
    double g22() const noexcept { return g22_; }
    double g12() const noexcept { return g12_; }

    /// One symmetric split step of length dt (s): half kinetic, local
    /// (potential + nonlinearity with vacuum compensation + exact coupling
    /// rotation, itself Strang-split), half kinetic.
    void step(FieldState& state, double dt, Coupling coupling) const;

    /// Integrates over `duration` (s) in equal steps no longer than params().dt,
    /// fusing adjacent kinetic half steps. Throws IntegrationError on non-finite fields.
    void propagate(FieldState& state, double duration, Coupling coupling) const;

    /// Real-time evolution of a single noiseless field under the 1D mean-field
    /// equation with nonlinearity g11 * atoms. Used for stationarity checks.
    void propagate_mean_field(std::vector<std::complex<double>>& psi, double atoms,
                              double duration) const;

    /// Mean-field ground state of component 1 with `atoms` atoms, by
    /// imaginary-time split-step propagation. Normalised to sum |psi|^2 dx = 1
    /// in trap units. Throws NumericalError if it does not converge.
    std::vector<double> ground_state(double atoms) const;

    /// Kinetic, potential and interaction energies of a normalised real mode
    /// (trap units, interaction with g11 * atoms).
    struct Energies {
        double kinetic = 0.0;
        double potential = 0.0;
        double interaction = 0.0;
        double total() const noexcept { return kinetic + potential + interaction; }
    };
    Energies energies(std::span<const double> psi, double atoms) const;

    /// Two-mode constants for a frozen spatial mode psi0 (trap units, normalised),
    /// chi_ij = (U_ij / 2 hbar) * sum |psi0|^4 dx, returned in rad/s.
    KerrParams frozen_mode_kerr(std::span<const double> psi0) const;

private:
    struct Fft;

    void kinetic(FieldState& state, std::span<const std::complex<double>> factor, Fft& fft) const;
    void local(FieldState& state, double dt_scaled, Coupling coupling) const;
    void nonlinear_phase(FieldState& state, double dt_scaled) const;
    std::vector<std::complex<double>> kinetic_factor(double dt_scaled) const;

    TwParams params_;
    TrapUnits units_;
    double dx_;
    std::vector<double> x_;
    std::vector<double> k2_;
    std::vector<double> potential_;
    double g11_, g22_, g12_;
    std::unique_ptr<Fft> plans_;
};

/// Single symmetric split step of length dt (s).
void step_spde(const SpdeModel& model, FieldState& state, double dt, Coupling coupling);

/// Mean-field ground state in SI: grid, U11 (J m), atom number, trap omega, mass.
/// Returns psi0 in m^{-1/2}, normalised to integral |psi0|^2 dx = 1.
std::vector<double> gpe_ground_state(const Grid1D& grid, double u11_1d, double n0_mean,
                                     double omega, double mass);

/// Wigner sample of the initial state: psi1 = sqrt(N) psi0 + eta1, psi2 = eta2 with
/// <eta(x_i) eta^*(x_k)> = delta_ik / (2 dx). N = n0_mean when fano <= 1,
/// otherwise drawn from a Gaussian with variance (fano - 1) n0_mean truncated at 0.
/// psi0 and the result are in trap units; dx is the trap-unit spacing.
FieldState sample_wigner_initial(std::span<const double> psi0, double dx, double n0_mean,
                                 double fano, std::uint64_t seed);

/// Per-trajectory seed derived from the master seed and trajectory index.
std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index);

/// Observables of one trajectory. The second pulse is applied once for each
/// requested phase to a copy of the field at t2.
struct TrajectoryRecord {
    double nw1_t0 = 0.0;
    double nw2_t0 = 0.0;
    std::vector<double> nw1_t3;  // per phase
    std::vector<double> nw2_t3;
    std::vector<double> density1_t1;  // |psi|^2 in trap units, Wigner (uncorrected)
    std::vector<double> density2_t1;
    std::vector<double> density1_t2;
    std::vector<double> density2_t2;
};

struct InitialCondition {
    double n0_mean = 0.0;
    double fano = 1.0;
};

TrajectoryRecord run_trajectory(const SpdeModel& model, std::span<const double> psi0,
                                const PulseSchedule& schedule, std::span<const double> phases,
                                const InitialCondition& init, std::uint64_t seed,
                                bool record_densities = true);

/// Ensemble accumulators. Per-phase Wigner number statistics at t3 plus the
/// mean Wigner densities at t1 and t2.
struct EnsembleStats {
    std::uint64_t n_traj = 0;
    MomentAccumulator total_t0;
    MomentAccumulator n1_t0;
    std::vector<MomentAccumulator> n1_t3;
    std::vector<MomentAccumulator> n2_t3;
    std::vector<MomentAccumulator> total_t3;
    std::vector<double> density1_t1_sum;
    std::vector<double> density2_t1_sum;
    std::vector<double> density1_t2_sum;
    std::vector<double> density2_t2_sum;

    void reset(std::size_t phases, std::size_t points);
    void add(const TrajectoryRecord& record);
    void merge(const EnsembleStats& other);
};

struct EnsembleOptions {
    std::uint64_t n_traj = 1000;
    std::uint64_t master_seed = 1;
    unsigned threads = 1;
    bool record_densities = true;
};

/// Everything the CLI and the acceptance checks need from one ensemble.
struct EnsembleResult {
    std::vector<double> phases;
    std::vector<MomentSet> mode2;  // per phase, at t3
    std::vector<MomentSet> mode1;
    MomentSet mode1_initial;
    double total_t0 = 0.0;  // extracted <N1 + N2>
    double total_t0_stderr = 0.0;
    std::vector<double> total_t3;  // per phase
    std::vector<double> total_t3_stderr;
    /// Ensemble-mean densities in SI (1/m), vacuum-corrected by 1/(2 dx).
    std::vector<double> x;  // m
    std::vector<double> density1_t1, density2_t1, density1_t2, density2_t2;
    std::uint64_t n_traj = 0;
};

/// Runs n_traj independent trajectories. Trajectories are reduced in fixed
/// chunks combined in index order, so the result does not depend on `threads`.
EnsembleResult run_ensemble(const SpdeModel& model, std::span<const double> psi0,
                            const PulseSchedule& schedule, std::span<const double> phases,
                            const InitialCondition& init, const EnsembleOptions& options);

/// Builds EnsembleResult from accumulated statistics (moment extraction with
/// ordering corrections for M = model.points() modes).
EnsembleResult summarize_ensemble(const SpdeModel& model, const EnsembleStats& stats,
                                  std::span<const double> phases);

}  // namespace squeeze
