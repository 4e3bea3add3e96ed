#include "doctest.h"

#include <cmath>
#include <random>

#include "squeeze/error.hpp"
#include "squeeze/fock_oracle.hpp"
#include "squeeze/two_mode.hpp"

using namespace squeeze;

namespace {

const KerrParams kSodium{0.018, 0.019, 0.018, 0.0};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("beamsplitter_transform")
{
    const cplx a(1.3, -0.4), b(0.2, 0.7);
    const auto id = beamsplitter_transform({a, b}, 0.0, 1.1);
    CHECK(std::abs(id.a1 - a) == 0.0);
    CHECK(std::abs(id.a2 - b) == 0.0);

    const double alpha0 = 3.0, theta1 = 0.3;
    const auto first = beamsplitter_transform({alpha0, 0.0}, theta1, 0.0);
    CHECK(std::abs(first.a1 - cplx(alpha0 * std::cos(theta1), 0.0)) < 1e-15);
    CHECK(std::abs(first.a2 - cplx(0.0, -alpha0 * std::sin(theta1))) < 1e-15);

    const auto full = beamsplitter_transform({1.0, 0.0}, kPi / 2, 0.0);
    CHECK(std::abs(full.a1) < 1e-15);
    CHECK(std::abs(full.a2 - cplx(0.0, -1.0)) < 1e-15);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const ModeAmplitudes in{{u(rng), u(rng)}, {u(rng), u(rng)}};
        const auto out = beamsplitter_transform(in, u(rng), u(rng));
        CHECK(std::norm(out.a1) + std::norm(out.a2) ==
              doctest::Approx(std::norm(in.a1) + std::norm(in.a2)).epsilon(1e-14));
    }
}

TEST_CASE("kerr_energy")
{
    const KerrParams k{0.3, 0.7, 0.11, 0.0};
    CHECK(kerr_energy(0, 0, k) == 0.0);
    CHECK(kerr_energy(1, 0, KerrParams{0.3, 0.7, 0.0, 0.0}) == 0.0);
    CHECK(kerr_energy(0, 1, KerrParams{0.3, 0.7, 0.0, 0.0}) == 0.0);
    // Phase of the (2,0)<->(1,1) coherence from the density-matrix phase expression.
    CHECK(kerr_energy(2, 0, k) - kerr_energy(1, 1, k) ==
          doctest::Approx(2 * k.chi11 - 2 * k.chi12).epsilon(1e-15));
    const KerrParams flat{0.2, 0.2, 0.2, 0.0};
    for (int n1 = 0; n1 < 6; ++n1)
        for (int n2 = 0; n2 < 6; ++n2) {
            const double n = n1 + n2;
            CHECK(kerr_energy(n1, n2, flat) == doctest::Approx(0.2 * n * (n - 1)));
        }
    CHECK_THROWS_AS(kerr_energy(-1, 0, k), ParameterError);
}

TEST_CASE("closed form: no hold gives coherent statistics")
{
    const double n0 = 1e7, th1 = 0.3, th2 = 0.025;
    for (double phi : {0.0, 0.7, 2.0, 4.5}) {
        const auto m = closed_form_moments({n0, 1.0}, {th1, th2, phi, 0.0}, kSodium);
        const cplx amp = std::sin(th1) * std::cos(th2) +
                         std::cos(th1) * std::sin(th2) * std::polar(1.0, -phi);
        CHECK(m.variance_norm == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(m.mean_n2 == doctest::Approx(n0 * std::norm(amp)).epsilon(1e-12));
    }
}

TEST_CASE("closed form: degenerate chi gives no squeezing")
{
    const KerrParams flat{0.018, 0.018, 0.018, 0.0};
    for (double t : {0.001, 0.016, 0.5})
        for (double phi : {0.1, 1.5, 3.0, 5.9}) {
            const auto m = closed_form_moments({1e7, 1.0}, {0.3, 0.025, phi, t}, flat);
            CHECK(std::abs(m.variance_norm - 1.0) < 1e-9);
        }
}

TEST_CASE("closed form: invariants")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int draw = 0; draw < 40; ++draw) {
        const double n0 = std::pow(10.0, 1.0 + 6.0 * u01(rng));
        const SequenceSpec seq{1.5 * u01(rng), 1.5 * u01(rng), 2 * kPi * u01(rng), 0.03 * u01(rng)};
        const KerrParams k{0.02 * u01(rng), 0.02 * u01(rng), 0.02 * u01(rng), 0.0};
        const auto ref = kerr_ramsey_sequence(std::sqrt(n0), seq, k);

        // Number conservation.
        CHECK(rel(ref.mean_n1 + ref.mean_n2, n0) < 1e-12);
        CHECK(ref.var_n2 >= 0.0);

        // Global phase of the initial amplitude is irrelevant.
        for (int p = 0; p < 8; ++p) {
            const auto rot = kerr_ramsey_sequence(std::polar(std::sqrt(n0), 2 * kPi * u01(rng)), seq, k);
            CHECK(rel(rot.mean_n2, ref.mean_n2) < 1e-12);
            CHECK(std::abs(rot.var_n2 - ref.var_n2) <= 1e-10 * (ref.var_n2 + ref.mean_n2));
        }

        // 2 pi periodicity in phi.
        SequenceSpec shifted = seq;
        shifted.phi += 2 * kPi;
        const auto per = kerr_ramsey_sequence(std::sqrt(n0), shifted, k);
        CHECK(rel(per.mean_n2, ref.mean_n2) < 1e-12);
        CHECK(std::abs(per.var_n2 - ref.var_n2) <= 1e-9 * (ref.var_n2 + ref.mean_n2));
    }
}

TEST_CASE("closed form agrees with the truncated Fock oracle")
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (double n0 : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        for (int draw = 0; draw < 6; ++draw) {
            const SequenceSpec seq{0.5 * kPi * u01(rng), 0.5 * kPi * u01(rng), 2 * kPi * u01(rng),
                                   2.0 * u01(rng)};
            const KerrParams k{u01(rng), u01(rng), u01(rng), 0.0};
            const auto exact = closed_form_moments({n0, 1.0}, seq, k);
            const auto brute = fock_sequence_moments(std::sqrt(n0), seq, k);
            CHECK(rel(exact.mean_n2, brute.mean_n2) < 1e-6);
            CHECK(rel(exact.mean_n2_sq, brute.mean_n2_sq) < 1e-6);
        }
    }
}

TEST_CASE("closed form rejects super-Poissonian input")
{
    CHECK_THROWS_AS(closed_form_moments({100.0, 2.0}, {0.3, 0.1, 0.0, 0.0}, kSodium), ParameterError);
    CHECK_THROWS_AS(closed_form_moments({100.0, 1.0}, {0.3, 0.1, 0.0, -1.0}, kSodium), ParameterError);
    CHECK_THROWS_AS(closed_form_moments({100.0, 1.0}, {2.0, 0.1, 0.0, 0.0}, kSodium), ParameterError);
}

TEST_CASE("theta2 = 0 leaves the post-first-pulse Poissonian")
{
    const auto m = closed_form_moments({1e6, 1.0}, {0.3, 0.0, 1.0, 0.016}, kSodium);
    CHECK(m.variance_norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.mean_n2 == doctest::Approx(1e6 * std::pow(std::sin(0.3), 2)).epsilon(1e-12));
}

TEST_CASE("mixture: zero excess recovers the coherent result")
{
    const SequenceSpec seq{0.3, 0.025, 1.3, 0.012};
    const auto coherent = closed_form_moments({1e7, 1.0}, seq, kSodium);
    for (double fano : {0.0, 0.5, 1.0}) {
        const auto mix = mixture_moments({1e7, fano}, seq, kSodium);
        CHECK(mix.mean_n2 == coherent.mean_n2);
        CHECK(mix.variance_norm == coherent.variance_norm);
    }
    const auto no_hold = mixture_moments({1e7, 0.0}, {0.3, 0.025, 1.3, 0.0}, kSodium);
    CHECK(no_hold.variance_norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mixture: quadrature against a brute-force sum over the atom number")
{
    const SequenceSpec seq{0.3, 0.025, 2.2, 0.016};
    const double n0 = 1e7, fano = 150.0;
    const auto mix = mixture_moments({n0, fano}, seq, kSodium);

    // Fine midpoint sum of the total-variance decomposition.
    const double sigma = std::sqrt((fano - 1.0) * n0);
    const int samples = 20001;
    const double lo = n0 - 12 * sigma, hi = n0 + 12 * sigma, h = (hi - lo) / samples;
    double w_sum = 0, m1 = 0, m2 = 0;
    for (int i = 0; i < samples; ++i) {
        const double n = lo + (i + 0.5) * h;
        const double w = std::exp(-0.5 * std::pow((n - n0) / sigma, 2));
        const auto out = kerr_ramsey_sequence(std::sqrt(n), seq, kSodium);
        w_sum += w;
        m1 += w * out.mean_n2;
        m2 += w * (out.var_n2 + out.mean_n2 * out.mean_n2);
    }
    m1 /= w_sum;
    m2 /= w_sum;
    CHECK(rel(mix.mean_n2, m1) < 1e-9);
    CHECK(rel(mix.variance(), m2 - m1 * m1) < 1e-5);

    // Classical excess noise raises v well above the coherent value at zero hold.
    const auto raw = mixture_moments({n0, fano}, {0.3, 0.025, 2.2, 0.0}, kSodium);
    CHECK(raw.variance_norm > 5.0);
}

TEST_CASE("variance map")
{
    const InitialEnsemble init{1e7, 1.0};
    const std::vector<double> holds{0.0, 0.004, 0.016};
    const std::vector<double> phis{0.0, 1.0, 2.0, 3.0};
    const auto map = variance_map(init, kSodium, 0.3, 0.025, holds, phis, 2);
    REQUIRE(map.values.size() == 12);
    for (std::size_t j = 0; j < phis.size(); ++j)
        CHECK(map.at(0, j) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < holds.size(); ++i)
        for (std::size_t j = 0; j < phis.size(); ++j) {
            const auto single = closed_form_moments(init, {0.3, 0.025, phis[j], holds[i]}, kSodium);
            CHECK(map.at(i, j) == single.variance_norm);
        }
    const auto one = variance_map(init, kSodium, 0.3, 0.025, {0.01}, {0.5});
    CHECK(one.values[0] == closed_form_moments(init, {0.3, 0.025, 0.5, 0.01}, kSodium).variance_norm);
    CHECK_THROWS_AS(variance_map(init, kSodium, 0.3, 0.025, {}, {0.0}), ParameterError);
    CHECK_THROWS_AS(variance_map(init, kSodium, 0.3, 0.025, {0.1, 0.0}, {0.0}), ParameterError);
}
