#include "doctest.h"

#include <cmath>
#include <vector>

#include "squeeze/error.hpp"
#include "squeeze/units.hpp"

using namespace squeeze;

namespace {

// Normalised 3D Gaussian ground mode exp(-r^2/(2 sigma^2)) density on a radial grid.
RadialDensity gaussian_radial(double sigma, std::size_t samples, double r_max,
                              std::vector<double>& r, std::vector<double>& rho)
{
    r.resize(samples);
    rho.resize(samples);
    const double norm = std::pow(kPi * sigma * sigma, -1.5);
    for (std::size_t i = 0; i < samples; ++i) {
        r[i] = r_max * static_cast<double>(i) / (samples - 1);
        rho[i] = norm * std::exp(-r[i] * r[i] / (sigma * sigma));
    }
    return {r, rho};
}

}  // namespace

TEST_CASE("interaction_strength_3d")
{
    CHECK(interaction_strength_3d(0.0, 1e-26) == 0.0);
    const double u = interaction_strength_3d(2.8e-9, 3.8177e-26);
    CHECK(interaction_strength_3d(5.6e-9, 3.8177e-26) == doctest::Approx(2.0 * u).epsilon(1e-15));
    // mpmath (30 digits) and hand evaluation of 4 pi hbar^2 a / m.
    CHECK(u == doctest::Approx(1.02498714584413e-50).epsilon(1e-12));
    CHECK_THROWS_AS(interaction_strength_3d(2.8e-9, 0.0), ParameterError);
    CHECK_THROWS_AS(interaction_strength_3d(2.8e-9, -1.0), ParameterError);
}

TEST_CASE("sodium preset")
{
    const auto na = SpeciesParams::sodium();
    CHECK(na.a11 == 2.8e-9);
    CHECK(na.a12 == 2.8e-9);
    CHECK(na.a22 == 3.0e-9);
    CHECK(na.mass == doctest::Approx(3.8177e-26).epsilon(1e-4));
    CHECK_NOTHROW(na.validate());
    SpeciesParams bad = na;
    bad.a22 = -1e-9;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("kerr params")
{
    KerrParams k{0.018, 0.019, 0.018, 0.0};
    CHECK_FALSE(k.degenerate());
    k.chi22 = 0.018;
    CHECK(k.degenerate());
    k.delta = 1.0;
    CHECK_THROWS_AS(k.validate(), ParameterError);
}

TEST_CASE("chi_from_mode: flat mode")
{
    const double volume = 2.0e-18;
    const std::size_t cells = 1000;
    std::vector<double> rho(cells, 1.0 / volume);
    const double u = 1e-50;
    const double chi = chi_from_mode(u, CartesianDensity{rho, volume / cells});
    CHECK(chi == doctest::Approx(u / (2.0 * kHbar * volume)).epsilon(1e-12));
}

TEST_CASE("chi_from_mode: ratio follows scattering lengths")
{
    std::vector<double> r, rho;
    const auto density = gaussian_radial(1e-6, 2001, 1e-5, r, rho);
    const auto na = SpeciesParams::sodium();
    const double chi11 = chi_from_mode(interaction_strength_3d(na.a11, na.mass), density);
    const double chi22 = chi_from_mode(interaction_strength_3d(na.a22, na.mass), density);
    CHECK(chi22 / chi11 == doctest::Approx(3.0 / 2.8).epsilon(1e-13));
}

TEST_CASE("chi_from_mode: Gaussian mode against closed form")
{
    const double sigma = 1.3e-6;
    std::vector<double> r, rho;
    const auto density = gaussian_radial(sigma, 2001, 10.0 * sigma, r, rho);
    const double u = 1.0e-50;
    // integral |psi0|^4 d^3r = (2 pi sigma^2)^{-3/2}
    const double exact = u / (2.0 * kHbar) * std::pow(2.0 * kPi * sigma * sigma, -1.5);
    CHECK(chi_from_mode(u, density) == doctest::Approx(exact).epsilon(1e-6));

    // 3D Cartesian sampling of the same mode.
    const int n = 64;
    const double h = 12.0 * sigma / n;
    std::vector<double> cube(static_cast<std::size_t>(n) * n * n);
    const double norm = std::pow(kPi * sigma * sigma, -1.5);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const double x = (i - n / 2) * h, y = (j - n / 2) * h, z = (k - n / 2) * h;
                cube[(static_cast<std::size_t>(i) * n + j) * n + k] =
                    norm * std::exp(-(x * x + y * y + z * z) / (sigma * sigma));
            }
    CHECK(chi_from_mode(u, CartesianDensity{cube, h * h * h}) == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("chi_from_mode: grid refinement")
{
    const double sigma = 1e-6;
    std::vector<double> r1, rho1, r2, rho2;
    const double coarse = chi_from_mode(1.0, gaussian_radial(sigma, 801, 10 * sigma, r1, rho1));
    const double fine = chi_from_mode(1.0, gaussian_radial(sigma, 1601, 10 * sigma, r2, rho2));
    CHECK(std::abs(fine - coarse) / fine < 1e-6);
}

TEST_CASE("chi_from_mode: unnormalised density")
{
    std::vector<double> rho(10, 1.0);
    try {
        chi_from_mode(1.0, CartesianDensity{rho, 0.2});
        FAIL("expected NormalizationError");
    } catch (const NormalizationError& e) {
        CHECK(e.norm() == doctest::Approx(2.0));
    }
    std::vector<double> even(4, 1.0);
    std::vector<double> r{0, 1, 2, 3};
    CHECK_THROWS_AS(chi_from_mode(1.0, RadialDensity{r, even}), ParameterError);
}

TEST_CASE("reduce_to_1d")
{
    const auto na = SpeciesParams::sodium();
    const double w = 2.0 * kPi * 500.0;
    CHECK(reduce_to_1d(0.0, w, na.mass) == 0.0);
    const double u3 = interaction_strength_3d(na.a11, na.mass);
    const double u1 = reduce_to_1d(u3, w, na.mass);
    CHECK(reduce_to_1d(u3, 4.0 * w, na.mass) == doctest::Approx(4.0 * u1).epsilon(1e-14));
    // mpmath 2D quadrature of the transverse Gaussian |phi|^4.
    CHECK(u1 == doctest::Approx(1.85529964086322e-39).epsilon(1e-12));
    // Same integral by a 2D midpoint sum.
    const double a2 = kHbar / (na.mass * w);
    const int n = 400;
    const double h = 16.0 * std::sqrt(a2) / n;
    double quartic = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x = (i - n / 2 + 0.5) * h, y = (j - n / 2 + 0.5) * h;
            const double rho = std::exp(-(x * x + y * y) / a2) / (kPi * a2);
            quartic += rho * rho * h * h;
        }
    CHECK(u1 == doctest::Approx(u3 * quartic).epsilon(1e-10));
    CHECK_THROWS_AS(reduce_to_1d(u3, 0.0, na.mass), ParameterError);
}

TEST_CASE("trap units round trip")
{
    const auto na = SpeciesParams::sodium();
    const TrapUnits units(na.mass, 2.0 * kPi * 500.0);
    for (double v : {1e-9, 3.3e-6, 0.016, 42.0}) {
        CHECK(units.from_length(units.to_length(v)) == doctest::Approx(v).epsilon(1e-15));
        CHECK(units.from_time(units.to_time(v)) == doctest::Approx(v).epsilon(1e-15));
        CHECK(units.from_rate(units.to_rate(v)) == doctest::Approx(v).epsilon(1e-15));
        CHECK(units.from_coupling_1d(units.to_coupling_1d(v)) == doctest::Approx(v).epsilon(1e-15));
    }
    CHECK_THROWS_AS(TrapUnits(0.0, 1.0), ParameterError);
}
