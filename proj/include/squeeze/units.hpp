#pragma once

#include <span>

namespace squeeze {

// CODATA 2018.
inline constexpr double kHbar = 1.054571817e-34;           // J s
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg
inline constexpr double kPi = 3.14159265358979323846;

/// Atomic species: mass and the three s-wave scattering lengths (SI).
struct SpeciesParams {
    double mass = 0.0;  // kg
    double a11 = 0.0;   // m
    double a22 = 0.0;
    double a12 = 0.0;

    void validate() const;

    /// 23Na in |F=1,mF=+1> (state 1) and |F=2,mF=0> (state 2).
    static SpeciesParams sodium();
};

/// Harmonic trap. `omega` is the spherical (or axial, for the 1D model)
/// angular frequency; `omega_perp` is the frozen transverse frequency.
struct TrapParams {
    double omega = 0.0;       // rad/s
    double omega_perp = 0.0;  // rad/s

    void validate() const;

    static TrapParams spherical_hz(double frequency_hz);
};

/// Two-mode interaction constants, all in rad/s.
struct KerrParams {
    double chi11 = 0.0;
    double chi22 = 0.0;
    double chi12 = 0.0;
    double delta = 0.0;  // must stay 0: every engine runs in the resonant rotating frame

    void validate() const;

    /// True iff chi11 == chi22 == chi12, the case with no relative phase shear.
    bool degenerate() const noexcept { return chi11 == chi22 && chi22 == chi12; }
};

/// Contact interaction strength U = 4 pi hbar^2 a / m, in J m^3.
double interaction_strength_3d(double scattering_length, double mass);

/// Effective 1D strength for a frozen transverse Gaussian ground state,
/// U_1d = U_3d / (2 pi a_perp^2) with a_perp = sqrt(hbar / (m omega_perp)). J m.
double reduce_to_1d(double u3d, double omega_perp, double mass);

/// |psi0|^2 sampled on a uniform Cartesian grid of any dimension;
/// `cell_volume` is dx, dx*dy or dx*dy*dz in SI.
struct CartesianDensity {
    std::span<const double> values;
    double cell_volume = 0.0;
};

/// Spherically symmetric |psi0|^2 sampled on a uniform radial grid starting at r = 0.
/// The number of samples must be odd (composite Simpson).
struct RadialDensity {
    std::span<const double> radius;
    std::span<const double> values;
};

/// chi = U/(2 hbar) * integral |psi0|^4, in rad/s (or 1/s per unit of U/hbar).
/// Throws NormalizationError if the density does not integrate to 1 within 1e-6.
double chi_from_mode(double u, const CartesianDensity& density);
double chi_from_mode(double u, const RadialDensity& density);

/// Harmonic-oscillator units for a 1D trap: length sqrt(hbar/(m omega)),
/// time 1/omega, energy hbar omega.
class TrapUnits {
public:
    TrapUnits(double mass, double omega);

    double length() const noexcept { return length_; }
    double time() const noexcept { return 1.0 / omega_; }
    double energy() const noexcept { return kHbar * omega_; }

    double to_length(double meters) const noexcept { return meters / length_; }
    double from_length(double scaled) const noexcept { return scaled * length_; }
    double to_time(double seconds) const noexcept { return seconds * omega_; }
    double from_time(double scaled) const noexcept { return scaled / omega_; }
    double to_rate(double per_second) const noexcept { return per_second / omega_; }
    double from_rate(double scaled) const noexcept { return scaled * omega_; }
    /// J m -> dimensionless 1D coupling.
    double to_coupling_1d(double u1d) const noexcept { return u1d / (energy() * length_); }
    double from_coupling_1d(double g) const noexcept { return g * energy() * length_; }

private:
    double omega_;
    double length_;
};

}  // namespace squeeze
