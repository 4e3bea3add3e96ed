#include "squeeze/fock_oracle.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "squeeze/error.hpp"

namespace squeeze {

namespace {

constexpr double kMaxLeakage = 1e-8;

// Eigen-decomposition of the real tridiagonal generator of block N in the
// basis n2 = 0..N: off-diagonal sqrt((N - k)(k + 1)). The complex generator
// is D T D^dag with D = diag(e^{-i k phi}), so one decomposition per N serves
// every (theta, phi).
struct BlockEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

const BlockEigen& block_eigen(int total)
{
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<BlockEigen>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[total];
    if (!slot) {
        const int n = total + 1;
        Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd sub(std::max(n - 1, 0));
        for (int k = 0; k + 1 < n; ++k)
            sub[k] = std::sqrt(static_cast<double>(total - k) * (k + 1));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
        if (n == 1) {
            slot = std::make_unique<BlockEigen>(BlockEigen{Eigen::VectorXd::Zero(1),
                                                           Eigen::MatrixXd::Identity(1, 1)});
        } else {
            solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
            if (solver.info() != Eigen::Success)
                throw NumericalError("tridiagonal eigensolver failed", 0.0);
            slot = std::make_unique<BlockEigen>(BlockEigen{solver.eigenvalues(), solver.eigenvectors()});
        }
    }
    return *slot;
}

double log_poisson(int n, double mean)
{
    if (mean == 0.0)
        return n == 0 ? 0.0 : -INFINITY;
    return n * std::log(mean) - mean - std::lgamma(n + 1.0);
}

}  // namespace

FockStateTwoMode::FockStateTwoMode(int cutoff)
    : cutoff_(cutoff)
{
    if (cutoff < 0 || cutoff > kMaxFockCutoff)
        throw ParameterError("Fock cutoff must lie in [0, 512]");
    amps_.assign(block_offset(cutoff + 1), cplx(0.0, 0.0));
}

double FockStateTwoMode::norm() const
{
    double total = 0.0;
    for (const auto& a : amps_)
        total += std::norm(a);
    return total;
}

double FockStateTwoMode::shell_probability() const
{
    double total = 0.0;
    for (std::size_t i = block_offset(cutoff_); i < amps_.size(); ++i)
        total += std::norm(amps_[i]);
    return total;
}

int required_cutoff(double total_mean, double leakage)
{
    if (!(total_mean >= 0.0))
        throw ParameterError("mean occupation must be non-negative");
    double inside = 0.0;
    for (int n = 0; n <= 4 * kMaxFockCutoff; ++n) {
        inside += std::exp(log_poisson(n, total_mean));
        if (1.0 - inside < leakage)
            return n;
    }
    return 4 * kMaxFockCutoff;
}

FockStateTwoMode prepare_coherent(cplx alpha, cplx beta, int cutoff)
{
    const double l1 = std::norm(alpha);
    const double l2 = std::norm(beta);
    const int needed = required_cutoff(l1 + l2, kMaxLeakage);
    if (needed > cutoff) {
        std::ostringstream msg;
        msg << "cutoff " << cutoff << " truncates more than 1e-8 of |alpha|^2+|beta|^2 = "
            << l1 + l2 << "; need at least " << needed;
        throw CutoffError(msg.str(), needed);
    }

    FockStateTwoMode state(cutoff);
    const double ph1 = std::arg(alpha);
    const double ph2 = std::arg(beta);
    for (int total = 0; total <= cutoff; ++total) {
        for (int n2 = 0; n2 <= total; ++n2) {
            const int n1 = total - n2;
            const double log_mag = 0.5 * (log_poisson(n1, l1) + log_poisson(n2, l2));
            if (!std::isfinite(log_mag))
                continue;
            state(n1, n2) = std::polar(std::exp(log_mag), n1 * ph1 + n2 * ph2);
        }
    }
    const double norm = std::sqrt(state.norm());
    for (auto& a : state.amplitudes())
        a /= norm;
    return state;
}

FockStateTwoMode apply_beamsplitter_unitary(FockStateTwoMode state, double theta, double phi)
{
    if (theta == 0.0)
        return state;
    std::vector<cplx> gauged;
    std::vector<cplx> modal;
    for (int total = 0; total <= state.cutoff(); ++total) {
        const int n = total + 1;
        const BlockEigen& eig = block_eigen(total);
        cplx* block = state.amplitudes().data() + FockStateTwoMode::block_offset(total);

        gauged.assign(n, 0.0);
        for (int k = 0; k < n; ++k)
            gauged[k] = block[k] * std::polar(1.0, k * phi);  // D^dag
        modal.assign(n, 0.0);
        for (int m = 0; m < n; ++m) {
            cplx acc = 0.0;
            for (int k = 0; k < n; ++k)
                acc += eig.vectors(k, m) * gauged[k];
            modal[m] = acc * std::polar(1.0, -theta * eig.values[m]);
        }
        for (int k = 0; k < n; ++k) {
            cplx acc = 0.0;
            for (int m = 0; m < n; ++m)
                acc += eig.vectors(k, m) * modal[m];
            block[k] = acc * std::polar(1.0, -k * phi);  // D
        }
    }
    return state;
}

FockStateTwoMode apply_kerr_diagonal(FockStateTwoMode state, const KerrParams& kerr, double t)
{
    if (t == 0.0)
        return state;
    for (int total = 0; total <= state.cutoff(); ++total)
        for (int n2 = 0; n2 <= total; ++n2) {
            const int n1 = total - n2;
            state(n1, n2) *= std::polar(1.0, -kerr_energy(n1, n2, kerr) * t);
        }
    return state;
}

MomentSet number_moments(const FockStateTwoMode& state)
{
    double p_total = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    for (int total = 0; total <= state.cutoff(); ++total)
        for (int n2 = 0; n2 <= total; ++n2) {
            const double p = std::norm(state(total - n2, n2));
            p_total += p;
            m1 += p * n2;
            m2 += p * n2 * static_cast<double>(n2);
        }
    m1 /= p_total;
    m2 /= p_total;
    double var = 0.0;
    // Centered second pass for accuracy.
    for (int total = 0; total <= state.cutoff(); ++total)
        for (int n2 = 0; n2 <= total; ++n2) {
            const double d = n2 - m1;
            var += std::norm(state(total - n2, n2)) * d * d;
        }
    var /= p_total;

    MomentSet out;
    out.mean_n2 = m1;
    out.mean_n2_sq = m2;
    if (m1 > 0.0) {
        out.variance_norm = var / m1;
    } else {
        out.variance_norm = 1.0;
        out.flagged = true;
    }
    return out;
}

double mean_n1(const FockStateTwoMode& state)
{
    double p_total = 0.0;
    double m = 0.0;
    for (int total = 0; total <= state.cutoff(); ++total)
        for (int n2 = 0; n2 <= total; ++n2) {
            const double p = std::norm(state(total - n2, n2));
            p_total += p;
            m += p * (total - n2);
        }
    return m / p_total;
}

MomentSet fock_sequence_moments(cplx alpha0, const SequenceSpec& seq, const KerrParams& kerr,
                                int cutoff)
{
    seq.validate();
    kerr.validate();
    const double n0 = std::norm(alpha0);
    if (cutoff <= 0)
        cutoff = static_cast<int>(std::ceil(n0 + 10.0 * std::sqrt(n0) + 20.0));
    auto state = prepare_coherent(alpha0, 0.0, cutoff);
    state = apply_beamsplitter_unitary(std::move(state), seq.theta1, 0.0);
    state = apply_kerr_diagonal(std::move(state), kerr, seq.t_hold);
    state = apply_beamsplitter_unitary(std::move(state), seq.theta2, seq.phi);
    return number_moments(state);
}

}  // namespace squeeze
