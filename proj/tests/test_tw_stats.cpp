#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <set>
#include <vector>

#include "squeeze/tw_engine.hpp"
#include "squeeze/tw_stats.hpp"

using namespace squeeze;

namespace {

// Sum over `modes` sites of |eta|^2 with <|eta|^2> = 1/2, one mode displaced by alpha.
double gaussian_number(std::mt19937_64& rng, std::size_t modes, double alpha)
{
    std::normal_distribution<double> q(0.0, 0.5);
    double n = 0.0;
    for (std::size_t k = 0; k < modes; ++k) {
        const double a = q(rng) + (k == 0 ? alpha : 0.0), b = q(rng);
        n += a * a + b * b;
    }
    return n;
}

std::vector<double> gaussian_mode(std::size_t points, double dx)
{
    std::vector<double> psi(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double x = (static_cast<double>(i) - 0.5 * static_cast<double>(points)) * dx;
        psi[i] = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
    }
    return psi;
}

}  // namespace

TEST_CASE("moment accumulator merge matches sequential accumulation")
{
    std::mt19937_64 rng(3);
    std::gamma_distribution<double> g(2.0, 3.0);
    std::vector<double> xs(1001);
    for (auto& x : xs)
        x = g(rng);

    MomentAccumulator all, left, right;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        all.add(xs[i]);
        (i < 377 ? left : right).add(xs[i]);
    }
    left.merge(right);
    CHECK(left.count() == all.count());
    CHECK(left.mean() == doctest::Approx(all.mean()).epsilon(1e-13));
    CHECK(left.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
    CHECK(left.third() == doctest::Approx(all.third()).epsilon(1e-10));
    CHECK(left.fourth() == doctest::Approx(all.fourth()).epsilon(1e-11));

    MomentAccumulator tiny;
    for (double x : {1.0, 2.0, 3.0, 4.0})
        tiny.add(x);
    CHECK(tiny.mean() == doctest::Approx(2.5));
    CHECK(tiny.variance() == doctest::Approx(1.25));
    CHECK(tiny.third() == doctest::Approx(0.0));
    CHECK(tiny.fourth() == doctest::Approx(2.5625));
    CHECK(tiny.mean_square() == doctest::Approx(7.5));

    MomentAccumulator empty;
    empty.merge(tiny);
    CHECK(empty.mean() == tiny.mean());
}

TEST_CASE("ordering corrections on vacuum and coherent ensembles")
{
    for (std::size_t modes : {std::size_t{1}, std::size_t{16}, std::size_t{128}}) {
        CAPTURE(modes);
        std::mt19937_64 rng(11 + modes);
        MomentAccumulator vac, coh;
        for (int s = 0; s < 40000; ++s) {
            vac.add(gaussian_number(rng, modes, 0.0));
            coh.add(gaussian_number(rng, modes, 6.0));
        }
        const auto v = extract_moments(vac, modes);
        CHECK(std::abs(v.mean_n2) < 4.0 * v.stderr_mean);
        CHECK(std::abs(v.mean_n2_sq) < 4.0 * v.stderr_mean_sq);
        CHECK(v.flagged);
        CHECK(v.variance_norm == 1.0);

        const auto c = extract_moments(coh, modes);
        CHECK_FALSE(c.flagged);
        CHECK(std::abs(c.mean_n2 - 36.0) < 4.0 * c.stderr_mean);
        CHECK(std::abs(c.variance_norm - 1.0) < 4.0 * c.stderr_v);
    }
}

TEST_CASE("closed-form ordering identity is exact on a fixed ensemble")
{
    // <N^2> = <N_W^2> - M <N> - M(M+1)/4 equals Var_W - M/4 + <N>^2.
    MomentAccumulator acc;
    for (double x : {40.0, 52.5, 47.25, 61.0, 38.5})
        acc.add(x);
    const std::size_t m = 8;
    const auto r = extract_moments(acc, m);
    const double mean = acc.mean() - 0.5 * m;
    CHECK(r.mean_n2 == doctest::Approx(mean));
    CHECK(r.mean_n2_sq == doctest::Approx(acc.mean_square() - m * mean - m * (m + 1) / 4.0));
    CHECK(r.variance() == doctest::Approx(acc.variance() - m / 4.0));
}

TEST_CASE("Wigner initial state noise")
{
    const std::size_t points = 64;
    const double dx = 0.25;
    const auto psi0 = gaussian_mode(points, dx);
    const double n0 = 400.0;

    MomentAccumulator noise2, noise1, quartic;
    std::complex<double> mean_eta{0.0, 0.0};
    for (std::uint64_t s = 0; s < 2000; ++s) {
        const auto st = sample_wigner_initial(psi0, dx, n0, 1.0, trajectory_seed(5, s));
        REQUIRE(st.psi1.size() == points);
        for (std::size_t i = 0; i < points; ++i) {
            noise2.add(std::norm(st.psi2[i]));
            const auto eta = st.psi1[i] - std::sqrt(n0) * psi0[i];
            noise1.add(std::norm(eta));
            mean_eta += st.psi2[i];
        }
        // Single-site fourth moment of alpha + eta at the trap centre.
        quartic.add(std::pow(std::norm(st.psi1[points / 2]), 2));
    }
    const double sigma2 = 1.0 / (2.0 * dx);
    CHECK(noise2.mean() == doctest::Approx(sigma2).epsilon(0.01));
    CHECK(noise1.mean() == doctest::Approx(sigma2).epsilon(0.01));
    CHECK(std::abs(mean_eta) / (2000.0 * points) < 0.01);

    // Complex Gaussian: <|a + eta|^4> = |a|^4 + 4 |a|^2 s + 2 s^2.
    const double a2 = n0 * psi0[points / 2] * psi0[points / 2];
    const double expected = a2 * a2 + 4.0 * a2 * sigma2 + 2.0 * sigma2 * sigma2;
    CHECK(std::abs(quartic.mean() - expected) < 4.0 * std::sqrt(quartic.variance() / 2000.0));
}

TEST_CASE("super-Poissonian initial number spread")
{
    const std::size_t points = 32;
    const double dx = 0.5;
    const auto psi0 = gaussian_mode(points, dx);
    const double n0 = 1e4, fano = 101.0;
    MomentAccumulator n;
    for (std::uint64_t s = 0; s < 4000; ++s) {
        const auto st = sample_wigner_initial(psi0, dx, n0, fano, trajectory_seed(9, s));
        double total = 0.0;
        for (const auto& z : st.psi1)
            total += std::norm(z) * dx;
        n.add(total);
    }
    // Number variance (fano - 1) N0 from the mixture plus N0 from the coherent part.
    CHECK(n.variance() == doctest::Approx(fano * n0).epsilon(0.08));
    CHECK(n.mean() - 0.5 * points == doctest::Approx(n0).epsilon(0.01));
}

TEST_CASE("trajectory seeds are distinct and reproducible")
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i)
        seen.insert(trajectory_seed(1, i));
    CHECK(seen.size() == 10000);
    CHECK(trajectory_seed(1, 17) == trajectory_seed(1, 17));
    CHECK(trajectory_seed(1, 17) != trajectory_seed(2, 17));
}
