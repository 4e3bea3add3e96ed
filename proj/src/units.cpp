#include "squeeze/units.hpp"

#include <cmath>
#include <sstream>

#include "squeeze/error.hpp"

namespace squeeze {

namespace {

constexpr double kNormTolerance = 1e-6;

void check_norm(double norm)
{
    if (!(std::abs(norm - 1.0) <= kNormTolerance)) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "mode density integrates to " << norm << ", expected 1";
        throw NormalizationError(msg.str(), norm);
    }
}

}  // namespace

void SpeciesParams::validate() const
{
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw ParameterError("species mass must be positive");
    for (double a : {a11, a22, a12})
        if (!(a >= 0.0) || !std::isfinite(a))
            throw ParameterError("scattering lengths must be finite and non-negative");
}

SpeciesParams SpeciesParams::sodium()
{
    return {22.98976928 * kAtomicMassUnit, 2.8e-9, 3.0e-9, 2.8e-9};
}

void TrapParams::validate() const
{
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw ParameterError("trap omega must be positive");
    if (!(omega_perp > 0.0) || !std::isfinite(omega_perp))
        throw ParameterError("trap omega_perp must be positive");
}

TrapParams TrapParams::spherical_hz(double frequency_hz)
{
    const double w = 2.0 * kPi * frequency_hz;
    return {w, w};
}

void KerrParams::validate() const
{
    for (double c : {chi11, chi22, chi12})
        if (!std::isfinite(c))
            throw ParameterError("chi values must be finite");
    if (delta != 0.0)
        throw ParameterError("delta must be 0 (resonant rotating frame)");
}

double interaction_strength_3d(double scattering_length, double mass)
{
    if (!(mass > 0.0))
        throw ParameterError("mass must be positive");
    return 4.0 * kPi * kHbar * kHbar * scattering_length / mass;
}

double reduce_to_1d(double u3d, double omega_perp, double mass)
{
    if (!(omega_perp > 0.0))
        throw ParameterError("omega_perp must be positive");
    if (!(mass > 0.0))
        throw ParameterError("mass must be positive");
    const double a_perp_sq = kHbar / (mass * omega_perp);
    return u3d / (2.0 * kPi * a_perp_sq);
}

double chi_from_mode(double u, const CartesianDensity& density)
{
    if (!(density.cell_volume > 0.0))
        throw ParameterError("cell volume must be positive");
    double norm = 0.0;
    double quartic = 0.0;
    for (double rho : density.values) {
        norm += rho;
        quartic += rho * rho;
    }
    check_norm(norm * density.cell_volume);
    return u / (2.0 * kHbar) * quartic * density.cell_volume;
}

double chi_from_mode(double u, const RadialDensity& density)
{
    const auto n = density.values.size();
    if (n != density.radius.size())
        throw ParameterError("radius and density sizes differ");
    if (n < 3 || n % 2 == 0)
        throw ParameterError("radial grid needs an odd number (>= 3) of samples");
    const double h = density.radius[1] - density.radius[0];
    if (!(h > 0.0))
        throw ParameterError("radial grid must be ascending");

    double norm = 0.0;
    double quartic = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const double r = density.radius[i];
        const double shell = 4.0 * kPi * r * r;
        norm += w * shell * density.values[i];
        quartic += w * shell * density.values[i] * density.values[i];
    }
    norm *= h / 3.0;
    quartic *= h / 3.0;
    check_norm(norm);
    return u / (2.0 * kHbar) * quartic;
}

TrapUnits::TrapUnits(double mass, double omega)
    : omega_(omega)
{
    if (!(mass > 0.0) || !(omega > 0.0))
        throw ParameterError("trap units need positive mass and omega");
    length_ = std::sqrt(kHbar / (mass * omega));
}

}  // namespace squeeze
