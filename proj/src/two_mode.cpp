#include "squeeze/two_mode.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "squeeze/error.hpp"
#include "squeeze/parallel.hpp"

namespace squeeze {

namespace {

// e^{iu} - 1 without cancellation for small u.
cplx expm1_i(double u)
{
    const double h = std::sin(0.5 * u);
    return {-2.0 * h * h, std::sin(u)};
}

// e^{z} - 1 for complex z.
cplx expm1_c(cplx z)
{
    const double h = std::sin(0.5 * z.imag());
    const double re = std::expm1(z.real()) * std::cos(z.imag()) - 2.0 * h * h;
    const double im = std::exp(z.real()) * std::sin(z.imag());
    return {re, im};
}

// Counts of a1 and a2 among the creation (p, q) and annihilation (r, s)
// operators of a normally ordered monomial a1^dag^p a2^dag^q a1^r a2^s.
struct Monomial {
    int p = 0;
    int q = 0;
    int r = 0;
    int s = 0;

    Monomial operator+(const Monomial& o) const { return {p + o.p, q + o.q, r + o.r, s + o.s}; }
};

Monomial creation(int mode) { return mode == 0 ? Monomial{1, 0, 0, 0} : Monomial{0, 1, 0, 0}; }
Monomial annihilation(int mode) { return mode == 0 ? Monomial{0, 0, 1, 0} : Monomial{0, 0, 0, 1}; }

// Expectations of normally ordered monomials in the state
// exp(-i E t)|alpha, beta>. Each one factorises as the coherent value times
//   exp(l1 (e^{i u1} - 1) + l2 (e^{i u2} - 1) + i u0),
// because E(j1+p, j2+q) - E(j1+r, j2+s) is linear in the Poisson variables j1, j2.
class KerrCoherentState {
public:
    KerrCoherentState(cplx alpha, cplx beta, const KerrParams& kerr, double t)
        : amp_{alpha, beta}, l1_(std::norm(alpha)), l2_(std::norm(beta)), kerr_(kerr), t_(t)
    {}

    double u1(const Monomial& m) const
    {
        return t_ * (2.0 * kerr_.chi11 * (m.p - m.r) + 2.0 * kerr_.chi12 * (m.q - m.s));
    }
    double u2(const Monomial& m) const
    {
        return t_ * (2.0 * kerr_.chi22 * (m.q - m.s) + 2.0 * kerr_.chi12 * (m.p - m.r));
    }
    double u0(const Monomial& m) const
    {
        const double c11 = m.p * (m.p - 1) - m.r * (m.r - 1);
        const double c22 = m.q * (m.q - 1) - m.s * (m.s - 1);
        const double c12 = m.p * m.q - m.r * m.s;
        return t_ * (kerr_.chi11 * c11 + kerr_.chi22 * c22 + 2.0 * kerr_.chi12 * c12);
    }

    cplx log_factor(const Monomial& m) const
    {
        return l1_ * expm1_i(u1(m)) + l2_ * expm1_i(u2(m)) + cplx(0.0, u0(m));
    }

    // log F(a + b) - log F(a) - log F(b) for first-order monomials a, b.
    cplx connected_log(const Monomial& a, const Monomial& b) const
    {
        const Monomial ab = a + b;
        return l1_ * expm1_i(u1(a)) * expm1_i(u1(b)) + l2_ * expm1_i(u2(a)) * expm1_i(u2(b)) +
               cplx(0.0, u0(ab) - u0(a) - u0(b));
    }

    cplx amplitude(int mode) const { return amp_[mode]; }

private:
    std::array<cplx, 2> amp_;
    double l1_;
    double l2_;
    KerrParams kerr_;
    double t_;
};

// <b^dag b> and Var(b^dag b) for b = w[0] a1 + w[1] a2. The variance is
// assembled as <b^dag b> + sum (F_ijkl - F_ik F_jl) * coherent weights, so it
// vanishes identically when the Kerr shear is absent.
std::pair<double, double> output_mode_statistics(const KerrCoherentState& st,
                                                 const std::array<cplx, 2>& w)
{
    std::array<std::array<cplx, 2>, 2> log_first{};
    std::array<std::array<cplx, 2>, 2> coef_first{};
    cplx mean = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int k = 0; k < 2; ++k) {
            const Monomial m = creation(i) + annihilation(k);
            log_first[i][k] = st.log_factor(m);
            coef_first[i][k] = std::conj(w[i] * st.amplitude(i)) * w[k] * st.amplitude(k);
            mean += coef_first[i][k] * std::exp(log_first[i][k]);
        }
    }

    cplx connected = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) {
                    const Monomial a = creation(i) + annihilation(k);
                    const Monomial b = creation(j) + annihilation(l);
                    const cplx base = std::exp(log_first[i][k] + log_first[j][l]);
                    connected += coef_first[i][k] * coef_first[j][l] * base *
                                 expm1_c(st.connected_log(a, b));
                }

    const double m = mean.real();
    return {m, m + connected.real()};
}

}  // namespace

void SequenceSpec::validate() const
{
    constexpr double half_pi = 0.5 * kPi;
    if (!(theta1 >= 0.0 && theta1 <= half_pi) || !(theta2 >= 0.0 && theta2 <= half_pi))
        throw ParameterError("pulse areas must lie in [0, pi/2]");
    if (!std::isfinite(phi))
        throw ParameterError("phi must be finite");
    if (!(t_hold >= 0.0) || !std::isfinite(t_hold))
        throw ParameterError("t_hold must be non-negative");
}

void InitialEnsemble::validate() const
{
    if (!(n0_mean > 0.0) || !std::isfinite(n0_mean))
        throw ParameterError("n0_mean must be positive");
    if (!(fano >= 0.0) || !std::isfinite(fano))
        throw ParameterError("fano must be non-negative");
}

ModeAmplitudes beamsplitter_transform(ModeAmplitudes in, double theta, double phi)
{
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const cplx minus_i(0.0, -1.0);
    const cplx e = std::polar(1.0, phi);
    return {in.a1 * c + minus_i * s * e * in.a2, in.a2 * c + minus_i * s * std::conj(e) * in.a1};
}

double kerr_energy(std::int64_t n1, std::int64_t n2, const KerrParams& kerr)
{
    if (n1 < 0 || n2 < 0)
        throw ParameterError("occupations must be non-negative");
    const double d1 = static_cast<double>(n1);
    const double d2 = static_cast<double>(n2);
    return kerr.chi11 * d1 * (d1 - 1.0) + kerr.chi22 * d2 * (d2 - 1.0) +
           2.0 * kerr.chi12 * d1 * d2;
}

SequenceOutput kerr_ramsey_sequence(cplx alpha0, const SequenceSpec& seq, const KerrParams& kerr)
{
    seq.validate();
    kerr.validate();
    const ModeAmplitudes after_first = beamsplitter_transform({alpha0, 0.0}, seq.theta1, 0.0);
    const KerrCoherentState state(after_first.a1, after_first.a2, kerr, seq.t_hold);

    // Heisenberg-picture output modes of the second pulse, as combinations of
    // the modes at the end of the hold.
    const double c = std::cos(seq.theta2);
    const double s = std::sin(seq.theta2);
    const cplx minus_i(0.0, -1.0);
    const cplx e = std::polar(1.0, seq.phi);
    const std::array<cplx, 2> out2{minus_i * s * std::conj(e), c};
    const std::array<cplx, 2> out1{c, minus_i * s * e};

    const auto [mean2, var2] = output_mode_statistics(state, out2);
    cplx mean1 = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            mean1 += std::conj(out1[i] * state.amplitude(i)) * out1[k] * state.amplitude(k) *
                     std::exp(state.log_factor(creation(i) + annihilation(k)));
    return {mean1.real(), mean2, var2};
}

MomentSet closed_form_moments(const InitialEnsemble& init, const SequenceSpec& seq,
                              const KerrParams& kerr)
{
    init.validate();
    if (init.fano != 1.0)
        throw ParameterError("closed_form_moments requires fano = 1; use mixture_moments");
    const auto out = kerr_ramsey_sequence(cplx(std::sqrt(init.n0_mean), 0.0), seq, kerr);
    return moments_from_mean_variance(out.mean_n2, std::max(out.var_n2, 0.0));
}

MomentSet mixture_moments(const InitialEnsemble& init, const SequenceSpec& seq,
                          const KerrParams& kerr, const MixtureOptions& options)
{
    init.validate();
    const double excess = (init.fano - 1.0) * init.n0_mean;
    if (!(excess > 0.0))
        return closed_form_moments({init.n0_mean, 1.0}, seq, kerr);

    const double sigma = std::sqrt(excess);
    const double lo = std::max(0.0, init.n0_mean - 12.0 * sigma);
    const double hi = init.n0_mean + 12.0 * sigma;
    // Normalisation of the Gaussian truncated at zero.
    const double z = 0.5 * std::erfc(-init.n0_mean / (std::sqrt(2.0) * sigma));
    auto weight = [&](double n) {
        const double x = (n - init.n0_mean) / sigma;
        return std::exp(-0.5 * x * x) / (std::sqrt(2.0 * kPi) * sigma * z);
    };
    auto stats = [&](double n) {
        return kerr_ramsey_sequence(cplx(std::sqrt(n), 0.0), seq, kerr);
    };

    using Quadrature = boost::math::quadrature::gauss_kronrod<double, 61>;
    auto integrate = [&](auto&& f, const char* what) {
        double error = 0.0;
        double l1 = 0.0;
        const double value =
            Quadrature::integrate(f, lo, hi, options.max_depth, options.rel_tolerance, &error, &l1);
        if (!std::isfinite(value) || error > 100.0 * options.rel_tolerance * std::max(l1, 1e-300)) {
            std::ostringstream msg;
            msg << "mixture quadrature for " << what << " did not converge (estimated relative error "
                << error / std::max(l1, 1e-300) << ")";
            throw NumericalError(msg.str(), error / std::max(l1, 1e-300));
        }
        return value;
    };

    const double mean = integrate([&](double n) { return weight(n) * stats(n).mean_n2; }, "<N2>");
    // Law of total variance keeps the classical spread free of cancellation.
    const double within = integrate([&](double n) { return weight(n) * stats(n).var_n2; }, "Var");
    const double between = integrate(
        [&](double n) {
            const double d = stats(n).mean_n2 - mean;
            return weight(n) * d * d;
        },
        "spread");
    return moments_from_mean_variance(mean, std::max(within + between, 0.0));
}

VarianceMap variance_map(const InitialEnsemble& init, const KerrParams& kerr, double theta1,
                         double theta2, std::vector<double> t_hold_axis,
                         std::vector<double> phi_axis, unsigned threads)
{
    init.validate();
    kerr.validate();
    auto check_axis = [](const std::vector<double>& axis, const char* name) {
        if (axis.empty())
            throw ParameterError(std::string(name) + " axis is empty");
        for (std::size_t i = 1; i < axis.size(); ++i)
            if (!(axis[i] > axis[i - 1]))
                throw ParameterError(std::string(name) + " axis must be strictly ascending");
    };
    check_axis(t_hold_axis, "t_hold");
    check_axis(phi_axis, "phi");

    VarianceMap map;
    map.t_hold_axis = std::move(t_hold_axis);
    map.phi_axis = std::move(phi_axis);
    const std::size_t rows = map.t_hold_axis.size();
    const std::size_t cols = map.phi_axis.size();
    map.values.assign(rows * cols, 0.0);
    map.mean_map.assign(rows * cols, 0.0);
    map.mean_sq_map.assign(rows * cols, 0.0);

    parallel_for(rows, threads, [&](std::size_t i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const SequenceSpec seq{theta1, theta2, map.phi_axis[j], map.t_hold_axis[i]};
            MomentSet m;
            try {
                m = init.fano == 1.0 ? closed_form_moments(init, seq, kerr)
                                     : mixture_moments(init, seq, kerr);
            } catch (const NumericalError& e) {
                std::ostringstream msg;
                msg << e.what() << " at t_hold=" << seq.t_hold << " phi=" << seq.phi;
                throw NumericalError(msg.str(), e.achieved());
            } catch (const ParameterError& e) {
                std::ostringstream msg;
                msg << e.what() << " at t_hold=" << seq.t_hold << " phi=" << seq.phi;
                throw ParameterError(msg.str());
            }
            map.values[i * cols + j] = m.variance_norm;
            map.mean_map[i * cols + j] = m.mean_n2;
            map.mean_sq_map[i * cols + j] = m.mean_n2_sq;
        }
    });
    return map;
}

}  // namespace squeeze
